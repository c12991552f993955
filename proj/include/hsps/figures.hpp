#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hsps {

/// P1, P2 and g2(0) of a source, optionally with one-sigma uncertainties.
///
/// p1 is the probability of exactly one photon in an opened gate, p2 the
/// probability of two or more.
struct FiguresOfMerit {
    double p1 = 0.0;
    double p2 = 0.0;
    double g2 = 0.0;
    std::optional<double> sigma_p1;
    std::optional<double> sigma_p2;
    std::optional<double> sigma_g2;
    /// sigma_p2 is a one-sided upper bound (no coincidences observed).
    bool p2_upper_limit_only = false;
    std::vector<std::string> warnings;

    [[nodiscard]] bool has_uncertainties() const { return sigma_p1 && sigma_p2 && sigma_g2; }
};

}  // namespace hsps
