#pragma once

#include <stdexcept>
#include <string>

namespace hsps {

/// Input outside the mathematical or physical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inputs are individually valid but jointly describe an impossible bench
/// (an efficiency above one, for instance).
class InconsistentParameters : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CatalogError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MergeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration, record file or command-line specification.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace hsps
