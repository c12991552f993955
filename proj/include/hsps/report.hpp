#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsps/domain.hpp"
#include "hsps/figures.hpp"

namespace hsps::cli {

enum class Column { calculated, predicted, experimental, all };

Column parse_column(std::string_view name);

enum class Status {
    pass,
    fail,
    /// Mismatch that is reported but does not fail the run.
    flagged,
    /// Informational comparison, never fails.
    info,
};

std::string_view to_string(Status status);

/// One computed figure against one published value.
struct FigureCheck {
    std::string column;
    std::string method;  ///< analytic, monte-carlo or estimator
    std::string figure;  ///< p1, p2, g2, suppression, gamma, gamma_prep
    double computed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    Status status = Status::info;
    std::string note;
};

struct ColumnReport {
    std::string column;
    std::string scenario;
    /// Exact parameter set, as a configuration file.
    std::string params;
    std::vector<FigureCheck> checks;
    std::vector<std::string> notes;
};

struct RunReport {
    std::vector<ColumnReport> columns;
    std::uint64_t seed = 1;
    double mc_duration = 0.0;
    std::size_t mc_replicas = 1;

    /// False if any check has Status::fail.
    [[nodiscard]] bool passed() const;
};

struct ReproduceOptions {
    /// Monte Carlo cross-check of the calculated column; 0 skips it.
    double mc_duration = 10.0;
    std::uint64_t seed = 1;
    std::size_t mc_replicas = 1;
};

/// Evaluates the chosen results-table columns against the embedded published
/// values. Failures are recorded in the report, never thrown.
RunReport run_reproduce(Column which, const ReproduceOptions& options = {});

std::string format_table(const RunReport& report);
std::string format_csv(const RunReport& report);

struct SweepSpec {
    std::string param;  ///< mu, delta_t, gamma, eta_trigger or dark_rate_trigger
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 2;
    bool log = false;
};

enum class SweepMethod { analytic, monte_carlo };

SweepMethod parse_sweep_method(std::string_view name);

/// Throws ValidationError for an unusable spec.
void validate(const SweepSpec& spec);

std::vector<double> sweep_values(const SweepSpec& spec);

struct SweepOptions {
    std::optional<Scenario> base;  ///< defaults to paper-experimental
    double duration = 1.0;         ///< Monte Carlo seconds per step
    std::uint64_t seed = 1;
    std::size_t bootstrap_resamples = 200;
};

struct SweepRow {
    double value = 0.0;
    bool valid = true;
    std::string note;
    FiguresOfMerit fom;
    double suppression = 0.0;
};

enum class Trend { increasing, decreasing, constant, mixed };

std::string_view to_string(Trend trend);

struct SweepTable {
    SweepSpec spec;
    SweepMethod method = SweepMethod::analytic;
    std::vector<SweepRow> rows;

    [[nodiscard]] Trend trend(double FiguresOfMerit::*field) const;
    [[nodiscard]] std::string csv() const;
};

SweepTable run_sweep(const SweepSpec& spec, SweepMethod method, const SweepOptions& options = {});

/// CSV number: scientific below 1e-3, plain otherwise.
std::string csv_number(double v);

}  // namespace hsps::cli
