#include "hsps/domain.hpp"

#include <bit>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hsps/analytic.hpp"
#include "hsps/errors.hpp"

namespace hsps {

namespace {

void require_fraction(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError(fmt::format("{} = {} is not a fraction in [0, 1]", name, v));
    }
}

void require_rate(double v, const char* name)
{
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError(fmt::format("{} = {} must be a finite non-negative rate", name, v));
    }
}

}  // namespace

ValidationReport validate(const SourceParams& p)
{
    require_rate(p.mu, "mu");
    require_rate(p.dark_rate_trigger, "dark_rate_trigger");
    require_rate(p.dark_rate_idler, "dark_rate_idler");
    require_fraction(p.gamma, "gamma");
    require_fraction(p.eta_trigger, "eta_trigger");
    require_fraction(p.trigger_transmission, "trigger_transmission");
    require_fraction(p.eta_idler, "eta_idler");
    require_fraction(p.splitter_t, "splitter_t");
    if (!(p.delta_t > 0.0) || !std::isfinite(p.delta_t)) {
        throw DomainError(fmt::format("delta_t = {} must be positive", p.delta_t));
    }
    if (!(p.idler_loss_db >= 0.0)) {
        throw DomainError(fmt::format("idler_loss_db = {} must be >= 0", p.idler_loss_db));
    }
    if (!(p.coherence_time >= 0.0)) {
        throw DomainError(fmt::format("coherence_time = {} must be >= 0", p.coherence_time));
    }
    if (p.gamma_prep) {
        require_fraction(*p.gamma_prep, "gamma_prep");
        double expected = *p.gamma_prep * db_to_transmission(p.idler_loss_db);
        if (std::abs(p.gamma - expected) > p.gamma_rounding_tol) {
            throw DomainError(fmt::format(
                "gamma = {} inconsistent with gamma_prep * 10^(-loss/10) = {} (tolerance {})", p.gamma,
                expected, p.gamma_rounding_tol));
        }
    }
    // Photon counts within a gate are poissonian only if the gate is much
    // longer than the coherence time.
    if (p.coherence_time > p.delta_t / 100.0) {
        throw DomainError(fmt::format("coherence_time = {} exceeds delta_t/100 = {}", p.coherence_time,
                                      p.delta_t / 100.0));
    }

    ValidationReport report;
    double x = p.pairs_per_window();
    if (x >= kMaxPairsPerWindow) {
        throw DomainError(fmt::format("mu*delta_t = {} outside the first-order model domain (< {})", x,
                                      kMaxPairsPerWindow));
    }
    if (x > kWarnPairsPerWindow) {
        report.validity = Validity::warn;
        report.warnings.push_back(
            fmt::format("mu*delta_t = {:.4g} > {}: first-order P1/P2 expressions lose accuracy", x,
                        kWarnPairsPerWindow));
    }
    return report;
}

std::uint64_t params_hash(const SourceParams& p)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    feed(p.mu);
    feed(p.delta_t);
    feed(p.gamma);
    feed(p.gamma_prep.value_or(-1.0));
    feed(p.idler_loss_db);
    feed(p.eta_trigger);
    feed(p.trigger_transmission);
    feed(p.dark_rate_trigger);
    feed(p.eta_idler);
    feed(p.dark_rate_idler);
    feed(p.splitter_t);
    feed(p.coherence_time);
    feed(p.gamma_rounding_tol);
    return h;
}

double db_to_transmission(double loss_db)
{
    if (!(loss_db >= 0.0)) {
        throw DomainError(fmt::format("loss {} dB is negative; gain is not modeled", loss_db));
    }
    return std::pow(10.0, -loss_db / 10.0);
}

double collection_from_preparation(double gamma_prep, double loss_db)
{
    require_fraction(gamma_prep, "gamma_prep");
    return gamma_prep * db_to_transmission(loss_db);
}

double derive_trigger_transmission(double n_t, double dark_rate_trigger, double eta_trigger, double mu)
{
    if (!(eta_trigger > 0.0) || !(mu > 0.0)) {
        throw DomainError("derive_trigger_transmission needs eta_trigger > 0 and mu > 0");
    }
    if (!(n_t > dark_rate_trigger)) {
        throw DomainError(fmt::format("herald rate {} does not exceed the dark rate {}", n_t, dark_rate_trigger));
    }
    double t = (n_t - dark_rate_trigger) / (eta_trigger * mu);
    if (t > 1.0) {
        throw InconsistentParameters(
            fmt::format("trigger transmission {} > 1: mu too small for the observed herald rate", t));
    }
    return t;
}

namespace {

Scenario paper_experimental()
{
    SourceParams p;
    p.mu = published::kPairRate;
    p.delta_t = published::kGate;
    p.gamma = published::kCollection;
    p.gamma_prep = published::kPreparation;
    p.idler_loss_db = published::kIdlerLossDb;
    p.eta_trigger = published::kTriggerEfficiency;
    p.dark_rate_trigger = published::kTriggerDarkRate;
    p.trigger_transmission =
        derive_trigger_transmission(published::kHeraldRate, published::kTriggerDarkRate, published::kTriggerEfficiency, p.mu);
    p.eta_idler = published::kIdlerEfficiency;
    p.dark_rate_idler = 0.0;
    p.splitter_t = 0.5;
    p.coherence_time = 1e-12;
    p.gamma_rounding_tol = 0.01;

    FiguresOfMerit expected;
    expected.p1 = 0.38;
    expected.p2 = 0.003;
    expected.g2 = 0.05;
    expected.sigma_p1 = 0.02;
    expected.sigma_p2 = 0.001;
    expected.sigma_g2 = 0.02;
    return {"paper-experimental", p, expected,
            "pump 10 uW, 3 ns gates, Ge-APD trigger; expected = calculated column of the results table"};
}

Scenario paper_predicted()
{
    Scenario base = paper_experimental();
    SourceParams p = base.params;
    p.gamma_prep = published::kPredictedPreparation;
    p.gamma = collection_from_preparation(published::kPredictedPreparation, published::kIdlerLossDb);
    p.eta_trigger = published::kPredictedTriggerEfficiency;
    p.dark_rate_trigger = 0.0;
    p.mu = published::kPredictedPairRate;
    p.gamma_rounding_tol = 1e-9;

    FiguresOfMerit expected;
    expected.p1 = 0.54;
    expected.p2 = 7e-4;
    expected.g2 = 0.005;
    return {"paper-predicted", p, expected,
            "pigtailed fiber (Gamma = 0.7) and Si-APD trigger (eta = 0.6, no dark counts); mu fitted to P2 = 7e-4"};
}

}  // namespace

Scenario make_faint_laser(double p1, double clock_rate)
{
    if (!(p1 > 0.0 && p1 < kMaxPairsPerWindow)) {
        throw DomainError(fmt::format("faint laser P1 = {} must lie in (0, {})", p1, kMaxPairsPerWindow));
    }
    if (!(clock_rate > 0.0)) {
        throw DomainError("faint laser clock rate must be positive");
    }
    SourceParams p;
    p.delta_t = published::kGate;
    p.gamma = 1.0;
    p.mu = p1 / p.delta_t;
    p.eta_trigger = published::kTriggerEfficiency;
    // No photon-correlated heralds: gates are opened by the clock alone.
    p.trigger_transmission = 0.0;
    p.dark_rate_trigger = clock_rate;
    p.eta_idler = published::kIdlerEfficiency;
    p.splitter_t = 0.5;
    p.coherence_time = 1e-12;
    return {"faint-laser-equivalent", p, analytic::poissonian_reference(p1),
            fmt::format("poissonian source, mean photon number {} per gate, clock-gated", p1)};
}

Scenario make_scenario(std::string_view name)
{
    if (name == "paper-experimental") {
        return paper_experimental();
    }
    if (name == "paper-predicted") {
        return paper_predicted();
    }
    if (name == "faint-laser-equivalent") {
        return make_faint_laser(published::kTable1[0].p1);
    }
    throw CatalogError(fmt::format("unknown scenario '{}'; valid names: {}", name, fmt::join(kScenarioNames, ", ")));
}

}  // namespace hsps
