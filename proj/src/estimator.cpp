#include "hsps/estimator.hpp"

#include <cmath>
#include <fmt/format.h>
#include <random>

#include "hsps/errors.hpp"
#include "hsps/rng.hpp"

namespace hsps::est {

namespace {

// 84.13% Poisson upper limit for zero observed events: -ln(1 - 0.8413).
constexpr double kZeroCountUpperLimit = 1.8410;

double dark_probability(const BenchParams& bench)
{
    return std::min(1.0, bench.dark_rate_idler * bench.delta_t);
}

/// Dark-corrected singles and coincidences per herald.
struct Corrected {
    double singles;
    double coincidences;
    std::vector<std::string> warnings;
};

Corrected correct_for_darks(const sim::RawCounts& counts, const BenchParams& bench)
{
    auto h = static_cast<double>(counts.heralds);
    double singles = static_cast<double>(counts.singles) / h;
    double coinc = static_cast<double>(counts.coincidences) / h;
    double pd = dark_probability(bench);
    double dark_singles = 2.0 * pd;
    double p_det = std::max(0.0, singles / 2.0 - pd);
    double accidentals = 2.0 * pd * p_det + pd * pd;

    Corrected c{singles - dark_singles, coinc - accidentals, {}};
    if (c.singles * h < -3.0 * std::sqrt(dark_singles * h)) {
        c.warnings.push_back("singles below the expected dark-count floor by more than 3 sigma: noise model inconsistent");
    }
    if (c.coincidences * h < -3.0 * std::sqrt(accidentals * h)) {
        c.warnings.push_back(
            "coincidences below the expected accidental floor by more than 3 sigma: noise model inconsistent");
    }
    if (c.singles < 0.0) {
        c.singles = 0.0;
        c.warnings.push_back("dark-corrected singles clamped to 0");
    }
    if (c.coincidences < 0.0) {
        c.coincidences = 0.0;
        c.warnings.push_back("dark-corrected coincidences clamped to 0");
    }
    return c;
}

}  // namespace

BenchParams bench_from(const SourceParams& params)
{
    BenchParams b;
    b.eta_idler = params.eta_idler;
    b.splitter_t = params.splitter_t;
    b.dark_rate_idler = params.dark_rate_idler;
    b.delta_t = params.delta_t;
    return b;
}

void validate(const BenchParams& bench)
{
    auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!(bench.eta_idler > 0.0 && bench.eta_idler <= 1.0)) {
        throw DomainError(fmt::format("eta_idler = {} must lie in (0, 1]", bench.eta_idler));
    }
    if (!fraction(bench.splitter_t)) {
        throw DomainError(fmt::format("splitter_t = {} is not a fraction", bench.splitter_t));
    }
    if (!(bench.dark_rate_idler >= 0.0)) {
        throw DomainError("dark_rate_idler must be >= 0");
    }
    if (!(bench.delta_t > 0.0)) {
        throw DomainError("delta_t must be positive");
    }
    if (bench.correction_kappa && !(*bench.correction_kappa > 0.0 && *bench.correction_kappa <= 1.0)) {
        throw DomainError(fmt::format("correction_kappa = {} must lie in (0, 1]", *bench.correction_kappa));
    }
}

double coincidence_efficiency(const BenchParams& bench)
{
    if (bench.correction_kappa) {
        return *bench.correction_kappa;
    }
    double t = bench.splitter_t;
    return 2.0 * t * (1.0 - t) * bench.eta_idler * bench.eta_idler;
}

double two_photon_singles_efficiency(const BenchParams& bench)
{
    double a = 1.0 - bench.splitter_t * bench.eta_idler;
    double b = 1.0 - (1.0 - bench.splitter_t) * bench.eta_idler;
    return (1.0 - a * a) + (1.0 - b * b);
}

FiguresOfMerit estimate(const sim::RawCounts& counts, const BenchParams& bench)
{
    validate(bench);
    if (counts.heralds == 0) {
        throw DomainError("estimate: no heralds");
    }
    double kappa = coincidence_efficiency(bench);
    if (!(kappa > 0.0)) {
        throw DomainError("estimate: coincidence efficiency is zero (splitter sends everything to one port)");
    }
    Corrected c = correct_for_darks(counts, bench);

    FiguresOfMerit fom;
    fom.warnings = std::move(c.warnings);
    fom.p2 = c.coincidences / kappa;
    double m1 = c.singles / bench.eta_idler;
    if (bench.multiphoton_correction) {
        fom.p1 = (c.singles - two_photon_singles_efficiency(bench) * fom.p2) / bench.eta_idler;
        if (fom.p1 < 0.0) {
            fom.p1 = 0.0;
            fom.warnings.push_back("P1 clamped to 0 after the two-photon correction");
        }
    } else {
        fom.p1 = m1;
    }
    fom.g2 = m1 > 0.0 ? 2.0 * fom.p2 / (m1 * m1) : 0.0;
    return fom;
}

double accidental_coincidence_rate(const sim::RawCounts& counts, const BenchParams& bench)
{
    validate(bench);
    if (counts.heralds == 0 || !(counts.duration > 0.0)) {
        return 0.0;
    }
    auto h = static_cast<double>(counts.heralds);
    double pd = dark_probability(bench);
    double p_det = std::max(0.0, static_cast<double>(counts.singles) / (2.0 * h) - pd);
    return h / counts.duration * (2.0 * pd * p_det + pd * pd);
}

FiguresOfMerit bootstrap_errors(const sim::RawCounts& counts, const BenchParams& bench, std::size_t n_resamples,
                                std::uint64_t seed, const BootstrapOptions& options)
{
    if (n_resamples < 100) {
        throw DomainError("bootstrap_errors needs at least 100 resamples");
    }
    FiguresOfMerit nominal = estimate(counts, bench);

    auto resample = [](Rng& rng, std::uint64_t observed) -> std::uint64_t {
        if (observed == 0) {
            return 0;
        }
        std::poisson_distribution<long long> dist(static_cast<double>(observed));
        return static_cast<std::uint64_t>(dist(rng));
    };
    auto draw = [&](Rng& rng) -> std::array<double, 3> {
        sim::RawCounts r = counts;
        r.heralds = std::max<std::uint64_t>(1, resample(rng, counts.heralds));
        r.singles = resample(rng, counts.singles);
        r.coincidences = resample(rng, counts.coincidences);
        r.gates_opened = r.heralds;
        BenchParams b = bench;
        if (options.eta_relative_sigma > 0.0) {
            b.eta_idler = truncated_normal(rng, bench.eta_idler, options.eta_relative_sigma * bench.eta_idler,
                                           1e-6, 1.0);
        }
        FiguresOfMerit f = estimate(r, b);
        return {f.p1, f.p2, f.g2};
    };
    auto stats = chunked_resample<3>(n_resamples, seed, draw, options.threads);

    nominal.sigma_p1 = stats[0].stddev();
    nominal.sigma_p2 = stats[1].stddev();
    nominal.sigma_g2 = stats[2].stddev();
    if (counts.coincidences == 0) {
        nominal.p2_upper_limit_only = true;
        nominal.sigma_p2 = kZeroCountUpperLimit / (coincidence_efficiency(bench) * static_cast<double>(counts.heralds));
        nominal.warnings.push_back("no coincidences: sigma_p2 is a one-sided upper limit");
    }
    return nominal;
}

}  // namespace hsps::est
