#pragma once

#include <cstdint>

#include "hsps/domain.hpp"
#include "hsps/figures.hpp"

// Closed-form model of the heralded source. P1 and P2 use the first-order
// (mu*dT << 1) expressions; validate() guards their domain.
namespace hsps::analytic {

/// Trigger-line bookkeeping: raw herald rate, its dark part and the fraction
/// of heralds that announce a real pair.
struct HeraldStats {
    double n_t = 0.0;
    double dark_rate = 0.0;
    double fidelity = 1.0;
};

/// (n_t - dark_rate) / n_t.
double heralding_fidelity(double n_t, double dark_rate);

HeraldStats herald_stats(const SourceParams& params);

/// gamma * eta_idler * (N_T - D_c), with N_T rebuilt from mu and the trigger arm.
double single_detection_rate(const SourceParams& params);

/// exp(-gamma * mu * dT): probability that a gate sees no extra photon.
/// Exact for poissonian emission, so only the basic ranges are checked.
double empty_window_probability(const SourceParams& params);

double p2(const SourceParams& params);
double p1(const SourceParams& params);
double g2_zero(const SourceParams& params);

/// P1, P2 and g2 without uncertainties. Validity warnings are attached.
FiguresOfMerit figures_of_merit(const SourceParams& params);

/// Poissonian source at equal P1: (p1, p1^2/2, 1).
FiguresOfMerit poissonian_reference(double p1);

/// Multi-photon suppression relative to a poissonian source at equal P1,
/// i.e. 1/g2. Returns +infinity exactly when g2 == 0.
double multiphoton_suppression(const FiguresOfMerit& fom);

/// Inverse of the single-detection rate: singles / (eta_idler * (n_t - dark_rate)).
double collection_efficiency_from_counts(double singles, double eta_idler, double n_t, double dark_rate);

/// gamma with the idler component losses divided out.
double preparation_efficiency(double gamma, double loss_db);

/// Pair rate that gives `p2_target` in the P2 expression.
double fit_mu_from_p2(double p2_target, double gamma, double delta_t, double fidelity);

/// Relative one-sigma uncertainty per SourceParams field. Zero means exact.
struct RelativeSigmas {
    double mu = 0.0;
    double gamma = 0.0;
    double delta_t = 0.0;
    double eta_trigger = 0.0;
    double trigger_transmission = 0.0;
    double dark_rate_trigger = 0.0;

    [[nodiscard]] bool all_zero() const
    {
        return mu == 0.0 && gamma == 0.0 && delta_t == 0.0 && eta_trigger == 0.0 &&
               trigger_transmission == 0.0 && dark_rate_trigger == 0.0;
    }
};

inline constexpr std::size_t kDefaultResamples = 10000;

/// Parametric bootstrap: each field is redrawn from a normal truncated to its
/// physical domain and the figures recomputed. Returns the resample means and
/// standard deviations. Bit-identical for a given seed whatever the thread count.
FiguresOfMerit propagate_uncertainty(const SourceParams& params, const RelativeSigmas& sigmas,
                                     std::size_t n_resamples = kDefaultResamples, std::uint64_t seed = 1);

}  // namespace hsps::analytic
