#include "hsps/analytic.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "hsps/errors.hpp"
#include "hsps/rng.hpp"

namespace hsps::analytic {

double heralding_fidelity(double n_t, double dark_rate)
{
    if (!(n_t > 0.0) || !(dark_rate >= 0.0) || dark_rate > n_t) {
        throw DomainError(fmt::format("heralding fidelity needs n_t > 0 and 0 <= dark_rate <= n_t (got {}, {})",
                                      n_t, dark_rate));
    }
    return (n_t - dark_rate) / n_t;
}

HeraldStats herald_stats(const SourceParams& params)
{
    HeraldStats s;
    s.n_t = params.herald_rate();
    s.dark_rate = params.dark_rate_trigger;
    // With no heralds at all the ratio is taken at its mu -> 0, D_c = 0 limit.
    s.fidelity = s.n_t > 0.0 ? heralding_fidelity(s.n_t, s.dark_rate) : 1.0;
    return s;
}

double single_detection_rate(const SourceParams& params)
{
    validate(params);
    HeraldStats h = herald_stats(params);
    return params.gamma * params.eta_idler * (h.n_t - h.dark_rate);
}

double empty_window_probability(const SourceParams& params)
{
    if (!(params.gamma >= 0.0 && params.gamma <= 1.0) || !(params.mu >= 0.0) || !(params.delta_t >= 0.0)) {
        throw DomainError("empty_window_probability needs gamma in [0, 1], mu >= 0 and delta_t >= 0");
    }
    return std::exp(-params.gamma * params.mu * params.delta_t);
}

double p2(const SourceParams& params)
{
    validate(params);
    double f = herald_stats(params).fidelity;
    return params.gamma * params.gamma * params.pairs_per_window() * f;
}

double p1(const SourceParams& params)
{
    validate(params);
    double f = herald_stats(params).fidelity;
    double x = params.pairs_per_window();
    double g = params.gamma;
    return g * (f * (1.0 - 2.0 * g * x) + x);
}

double g2_zero(const SourceParams& params)
{
    validate(params);
    double f = herald_stats(params).fidelity;
    double x = params.pairs_per_window();
    double g = params.gamma;
    double num = 2.0 * x * f;
    if (num == 0.0) {
        return 0.0;
    }
    double den = x + (1.0 - 2.0 * g * x) * f;
    return num / (den * den);
}

FiguresOfMerit figures_of_merit(const SourceParams& params)
{
    FiguresOfMerit fom;
    fom.warnings = validate(params).warnings;
    fom.p1 = p1(params);
    fom.p2 = p2(params);
    fom.g2 = g2_zero(params);
    return fom;
}

FiguresOfMerit poissonian_reference(double p1)
{
    if (!(p1 >= 0.0 && p1 <= 1.0)) {
        throw DomainError(fmt::format("P1 = {} is not a probability", p1));
    }
    FiguresOfMerit fom;
    fom.p1 = p1;
    fom.p2 = p1 * p1 / 2.0;
    fom.g2 = 1.0;
    return fom;
}

double multiphoton_suppression(const FiguresOfMerit& fom)
{
    if (!(fom.g2 >= 0.0)) {
        throw DomainError(fmt::format("g2 = {} must be non-negative", fom.g2));
    }
    if (fom.g2 == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / fom.g2;
}

double collection_efficiency_from_counts(double singles, double eta_idler, double n_t, double dark_rate)
{
    if (!(singles >= 0.0)) {
        throw DomainError("singles must be non-negative");
    }
    if (!(eta_idler > 0.0) || !(n_t > dark_rate)) {
        throw DomainError("collection efficiency needs eta_idler > 0 and n_t > dark_rate");
    }
    double gamma = singles / (eta_idler * (n_t - dark_rate));
    if (gamma > 1.0) {
        throw InconsistentParameters(
            fmt::format("collection efficiency {} > 1: more singles than heralded photons", gamma));
    }
    return gamma;
}

double preparation_efficiency(double gamma, double loss_db)
{
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw DomainError(fmt::format("gamma = {} must lie in (0, 1]", gamma));
    }
    double prep = gamma / db_to_transmission(loss_db);
    if (prep > 1.0) {
        throw InconsistentParameters(
            fmt::format("preparation efficiency {} > 1 for gamma = {} and {} dB loss", prep, gamma, loss_db));
    }
    return prep;
}

double fit_mu_from_p2(double p2_target, double gamma, double delta_t, double fidelity)
{
    if (!(p2_target >= 0.0)) {
        throw DomainError("target P2 must be non-negative");
    }
    if (!(gamma > 0.0) || !(delta_t > 0.0) || !(fidelity > 0.0)) {
        throw DomainError("fit_mu_from_p2 needs positive gamma, delta_t and fidelity");
    }
    double mu = p2_target / (gamma * gamma * delta_t * fidelity);
    if (mu * delta_t >= kMaxPairsPerWindow) {
        throw DomainError(fmt::format("fitted mu*delta_t = {} leaves the model domain", mu * delta_t));
    }
    return mu;
}

FiguresOfMerit propagate_uncertainty(const SourceParams& params, const RelativeSigmas& sigmas,
                                     std::size_t n_resamples, std::uint64_t seed)
{
    if (n_resamples < 100) {
        throw DomainError("propagate_uncertainty needs at least 100 resamples");
    }
    FiguresOfMerit nominal = figures_of_merit(params);
    if (sigmas.all_zero()) {
        nominal.sigma_p1 = 0.0;
        nominal.sigma_p2 = 0.0;
        nominal.sigma_g2 = 0.0;
        return nominal;
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    auto draw = [&](Rng& rng) -> std::array<double, 3> {
        SourceParams s = params;
        s.gamma_prep.reset();
        s.delta_t = truncated_normal(rng, params.delta_t, sigmas.delta_t * params.delta_t,
                                     100.0 * params.coherence_time, kInf);
        s.mu = truncated_normal(rng, params.mu, sigmas.mu * params.mu, 0.0,
                                std::nextafter(kMaxPairsPerWindow, 0.0) / s.delta_t);
        s.gamma = truncated_normal(rng, params.gamma, sigmas.gamma * params.gamma, 0.0, 1.0);
        s.eta_trigger = truncated_normal(rng, params.eta_trigger, sigmas.eta_trigger * params.eta_trigger, 0.0, 1.0);
        s.trigger_transmission = truncated_normal(rng, params.trigger_transmission,
                                                  sigmas.trigger_transmission * params.trigger_transmission, 0.0, 1.0);
        s.dark_rate_trigger = truncated_normal(rng, params.dark_rate_trigger,
                                               sigmas.dark_rate_trigger * params.dark_rate_trigger, 0.0, kInf);
        return {p1(s), p2(s), g2_zero(s)};
    };
    auto stats = chunked_resample<3>(n_resamples, seed, draw);

    FiguresOfMerit out;
    out.warnings = nominal.warnings;
    out.p1 = stats[0].mean;
    out.p2 = stats[1].mean;
    out.g2 = stats[2].mean;
    out.sigma_p1 = stats[0].stddev();
    out.sigma_p2 = stats[1].stddev();
    out.sigma_g2 = stats[2].stddev();
    return out;
}

}  // namespace hsps::analytic
