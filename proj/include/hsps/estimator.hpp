#pragma once

#include <cstdint>
#include <optional>

#include "hsps/domain.hpp"
#include "hsps/figures.hpp"
#include "hsps/simulator.hpp"

// Inversion of HBT bench counts to source-output P1, P2 and g2.
//
// The source is truncated at two photons per gate. For a gate holding one
// photon the bench records eta detector firings on average, for two photons
// s2 = [1 - (1 - T eta)^2] + [1 - (1 - (1 - T) eta)^2] firings and a
// coincidence with probability kappa = 2 T (1 - T) eta^2. After removing the
// expected idler dark counts:
//
//   P2 = coincidences / (kappa * heralds)
//   P1 = (singles / heralds - s2 * P2) / eta
//   g2 = 2 * P2 / m1^2,  m1 = singles / (eta * heralds)
//
// g2 uses the mean photon number m1, which makes it the usual normalized
// HBT ratio (exactly 1 for a poissonian source at T = 1/2). With
// multiphoton_correction off, P1 = m1 and g2 = 2 P2 / P1^2.
namespace hsps::est {

struct BenchParams {
    double eta_idler = 0.0;
    double splitter_t = 0.5;
    double dark_rate_idler = 0.0;
    double delta_t = 0.0;
    /// Overrides kappa, e.g. with a calibration constant.
    std::optional<double> correction_kappa;
    /// Remove the two-photon contribution from singles before computing P1.
    bool multiphoton_correction = true;
};

/// Bench parameters matching the HBT part of a SourceParams.
BenchParams bench_from(const SourceParams& params);

/// Throws DomainError when a field is outside its range.
void validate(const BenchParams& bench);

/// 2 T (1 - T) eta^2, or the override when set.
double coincidence_efficiency(const BenchParams& bench);

/// Expected (gate, detector) firings of a gate holding two photons.
double two_photon_singles_efficiency(const BenchParams& bench);

FiguresOfMerit estimate(const sim::RawCounts& counts, const BenchParams& bench);

/// Expected rate of coincidences involving at least one idler dark count.
double accidental_coincidence_rate(const sim::RawCounts& counts, const BenchParams& bench);

struct BootstrapOptions {
    /// Relative one-sigma systematic on eta_idler; 0 means counting statistics only.
    double eta_relative_sigma = 0.0;
    unsigned threads = 0;
};

/// Poisson resampling of the counts; returns the nominal estimate with the
/// resampled standard deviations attached. Deterministic for a given seed.
FiguresOfMerit bootstrap_errors(const sim::RawCounts& counts, const BenchParams& bench, std::size_t n_resamples,
                                std::uint64_t seed, const BootstrapOptions& options = {});

}  // namespace hsps::est
