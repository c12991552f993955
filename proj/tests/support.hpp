#pragma once

#include <cmath>
#include <random>

#include "hsps/domain.hpp"
#include "hsps/rng.hpp"

namespace hsps::testing {

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi)
{
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Valid parameter set with mu*dT <= max_pairs and heralding fidelity in [f_lo, 1].
inline SourceParams random_params(Rng& rng, double max_pairs = 0.05, double f_lo = 0.5)
{
    SourceParams p;
    p.delta_t = log_uniform(rng, 1e-9, 50e-9);
    double pairs = log_uniform(rng, 1e-4, max_pairs);
    p.mu = pairs / p.delta_t;
    p.gamma = uniform(rng, 0.05, 1.0);
    p.eta_trigger = uniform(rng, 0.05, 1.0);
    p.trigger_transmission = uniform(rng, 0.1, 1.0);
    double f = uniform(rng, f_lo, 1.0);
    double signal = p.mu * p.heralding_probability();
    p.dark_rate_trigger = signal * (1.0 - f) / f;
    p.eta_idler = uniform(rng, 0.05, 1.0);
    p.splitter_t = uniform(rng, 0.2, 0.8);
    return p;
}

/// Poisson 3-sigma band around an expected count.
inline bool within_3sigma_count(double observed, double expected)
{
    return std::abs(observed - expected) <= 3.0 * std::sqrt(std::max(expected, 1.0));
}

/// Binomial 3-sigma band for a fraction estimated from n trials.
inline bool within_3sigma_fraction(double observed, double p, double n)
{
    double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
    return std::abs(observed - p) <= 3.0 * sigma;
}

/// Same band for gate fractions when gates may share photons: variance
/// scaled by `inflation`, plus one count of continuity correction.
inline bool within_3sigma_clustered(double observed, double p, double n, double inflation)
{
    double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-300) * inflation / n);
    return std::abs(observed - p) <= 3.0 * sigma + 1.0 / n;
}

}  // namespace hsps::testing
