#include <doctest.h>

#include <cmath>
#include <limits>

#include "hsps/analytic.hpp"
#include "hsps/errors.hpp"
#include "support.hpp"

using namespace hsps;
using doctest::Approx;

namespace {

SourceParams experimental() { return make_scenario("paper-experimental").params; }
SourceParams predicted() { return make_scenario("paper-predicted").params; }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("heralding_fidelity")
{
    CHECK(near(analytic::heralding_fidelity(124302, 20000), 0.83910, 1e-5));
    CHECK(analytic::heralding_fidelity(5000, 0) == 1.0);
    CHECK(analytic::heralding_fidelity(5000, 5000) == 0.0);
    CHECK_THROWS_AS(analytic::heralding_fidelity(0, 0), DomainError);
    CHECK_THROWS_AS(analytic::heralding_fidelity(10, 20), DomainError);
}

TEST_CASE("single_detection_rate")
{
    CHECK(near(analytic::single_detection_rate(experimental()), 4798, 1.0));
    SourceParams p = experimental();
    p.gamma = 0.0;
    p.gamma_prep.reset();
    CHECK(analytic::single_detection_rate(p) == 0.0);

    SourceParams ideal;
    ideal.mu = 1e6;
    ideal.gamma = 1.0;
    ideal.eta_trigger = 0.5;
    ideal.eta_idler = 1.0;
    CHECK(analytic::single_detection_rate(ideal) == ideal.herald_rate());
}

TEST_CASE("empty_window_probability")
{
    SourceParams p = experimental();
    CHECK(near(analytic::empty_window_probability(p), 0.99093, 1e-5));
    p.mu = 0.0;
    CHECK(analytic::empty_window_probability(p) == 1.0);

    p = experimental();
    p.delta_t = 0.0;
    CHECK(analytic::empty_window_probability(p) == 1.0);

    SourceParams half;
    half.gamma = 1.0;
    half.delta_t = 1e-9;
    half.mu = std::log(2.0) / half.delta_t;
    CHECK(near(analytic::empty_window_probability(half), 0.5, 1e-12));
}

TEST_CASE("p2")
{
    CHECK(near(analytic::p2(experimental()), 0.00352, 2e-5));
    SourceParams p = experimental();
    p.mu = 0.0;
    p.trigger_transmission = 1.0;
    CHECK(analytic::p2(p) == 0.0);
    CHECK(near(analytic::p2(predicted()), 7e-4, 0.3e-4));
}

TEST_CASE("p1")
{
    CHECK(near(analytic::p1(experimental()), 0.388, 0.002));
    CHECK(near(analytic::p1(predicted()), 0.543, 0.002));
}

TEST_CASE("g2_zero")
{
    CHECK(near(analytic::g2_zero(experimental()), 0.0467, 0.0005));
    CHECK(near(analytic::g2_zero(predicted()), 0.00475, 0.0002));
}

TEST_CASE("figures_of_merit")
{
    FiguresOfMerit e = analytic::figures_of_merit(experimental());
    CHECK(near(e.p1, 0.388, 0.002));
    CHECK(near(e.p2, 0.00352, 2e-5));
    CHECK(near(e.g2, 0.0467, 0.0005));
    CHECK_FALSE(e.has_uncertainties());

    SourceParams vacuum = experimental();
    vacuum.mu = 0.0;
    vacuum.dark_rate_trigger = 0.0;
    // N_T = 0: fidelity taken as 1.
    FiguresOfMerit v = analytic::figures_of_merit(vacuum);
    CHECK(v.p1 == vacuum.gamma);
    CHECK(v.p2 == 0.0);
    CHECK(v.g2 == 0.0);

    FiguresOfMerit pr = analytic::figures_of_merit(predicted());
    CHECK(near(pr.p1, 0.543, 0.002));
    CHECK(near(pr.p2, 7e-4, 0.3e-4));
    CHECK(near(pr.g2, 0.0047, 0.0002));

    SourceParams warned = experimental();
    warned.mu = 0.2 / warned.delta_t;
    CHECK_FALSE(analytic::figures_of_merit(warned).warnings.empty());
}

TEST_CASE("poissonian_reference")
{
    FiguresOfMerit a = analytic::poissonian_reference(0.37);
    CHECK(a.p1 == 0.37);
    CHECK(near(a.p2, 0.06845, 1e-12));
    CHECK(a.g2 == 1.0);
    FiguresOfMerit z = analytic::poissonian_reference(0.0);
    CHECK(z.p1 == 0.0);
    CHECK(z.p2 == 0.0);
    CHECK(z.g2 == 1.0);
    FiguresOfMerit o = analytic::poissonian_reference(1.0);
    CHECK(o.p2 == 0.5);
    CHECK(o.g2 == 1.0);

    Rng rng = make_rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        CHECK(analytic::poissonian_reference(testing::uniform(rng, 0.0, 1.0)).g2 == 1.0);
    }
}

TEST_CASE("multiphoton_suppression")
{
    FiguresOfMerit f;
    f.g2 = 0.08;
    CHECK(near(analytic::multiphoton_suppression(f), 12.5, 1e-12));
    f.g2 = 0.005;
    CHECK(near(analytic::multiphoton_suppression(f), 200, 1e-9));
    f.g2 = 1.0;
    CHECK(analytic::multiphoton_suppression(f) == 1.0);
    f.g2 = 0.0;
    CHECK(std::isinf(analytic::multiphoton_suppression(f)));
    f.g2 = -0.1;
    CHECK_THROWS_AS(analytic::multiphoton_suppression(f), DomainError);
}

TEST_CASE("collection_efficiency_from_counts")
{
    CHECK(near(analytic::collection_efficiency_from_counts(4702, 0.10, 124302, 20000), 0.4508, 0.0005));
    CHECK(analytic::collection_efficiency_from_counts(0, 0.10, 124302, 20000) == 0.0);
    CHECK(near(analytic::collection_efficiency_from_counts(10430.2, 0.10, 124302, 20000), 1.0, 1e-12));
    CHECK_THROWS_AS(analytic::collection_efficiency_from_counts(11000, 0.10, 124302, 20000), InconsistentParameters);
}

TEST_CASE("preparation_efficiency")
{
    CHECK(near(analytic::preparation_efficiency(0.4508, 1.1), 0.5807, 0.001));
    CHECK(analytic::preparation_efficiency(0.42, 0.0) == 0.42);
    CHECK_THROWS_AS(analytic::preparation_efficiency(0.9, 1.1), InconsistentParameters);
}

TEST_CASE("fit_mu_from_p2")
{
    double gamma = collection_from_preparation(0.7, 1.1);
    CHECK(near(analytic::fit_mu_from_p2(7e-4, gamma, 3e-9, 1.0), 7.9e5, 0.1e5));
    CHECK(analytic::fit_mu_from_p2(0.0, gamma, 3e-9, 1.0) == 0.0);
    CHECK_THROWS_AS(analytic::fit_mu_from_p2(0.9, 0.9, 3e-9, 1.0), DomainError);
}

TEST_CASE("propagate_uncertainty")
{
    analytic::RelativeSigmas s;
    s.gamma = 0.05;
    s.mu = 0.05;
    FiguresOfMerit a = analytic::propagate_uncertainty(experimental(), s, 10000, 3);
    REQUIRE(a.has_uncertainties());
    CHECK(*a.sigma_p1 > 0.015);
    CHECK(*a.sigma_p1 < 0.025);
    CHECK(near(a.p1, 0.388, 0.003));

    FiguresOfMerit b = analytic::propagate_uncertainty(experimental(), s, 10000, 3);
    CHECK(a.p1 == b.p1);
    CHECK(a.p2 == b.p2);
    CHECK(a.g2 == b.g2);
    CHECK(*a.sigma_p1 == *b.sigma_p1);
    CHECK(*a.sigma_p2 == *b.sigma_p2);
    CHECK(*a.sigma_g2 == *b.sigma_g2);

    FiguresOfMerit z = analytic::propagate_uncertainty(experimental(), analytic::RelativeSigmas{}, 10000, 3);
    CHECK(*z.sigma_p1 == 0.0);
    CHECK(*z.sigma_p2 == 0.0);
    CHECK(*z.sigma_g2 == 0.0);
    CHECK(z.p1 == analytic::p1(experimental()));
}

// Property tests over randomly drawn valid parameter sets.

TEST_CASE("property: g2 agrees with 2 P2 / P1^2 for mu dT <= 0.05")
{
    Rng rng = make_rng(101, 0);
    for (int i = 0; i < 2000; ++i) {
        SourceParams p = testing::random_params(rng, 0.05, 0.05);
        FiguresOfMerit f = analytic::figures_of_merit(p);
        double first_order = 2.0 * f.p2 / (f.p1 * f.p1);
        CHECK(std::abs(f.g2 - first_order) / f.g2 <= 0.05);
    }
}

TEST_CASE("property: P2 strictly increases in gamma, mu and dT")
{
    Rng rng = make_rng(102, 0);
    for (int i = 0; i < 1000; ++i) {
        SourceParams p = testing::random_params(rng, 0.04);
        double base = analytic::p2(p);
        double k = testing::uniform(rng, 1.001, 1.2);

        SourceParams q = p;
        q.gamma = std::min(1.0, p.gamma * k);
        if (q.gamma > p.gamma) {
            CHECK(analytic::p2(q) > base);
        }
        q = p;
        q.mu = p.mu * k;
        CHECK(analytic::p2(q) > base);
        q = p;
        q.delta_t = p.delta_t * k;
        CHECK(analytic::p2(q) > base);
    }
}

TEST_CASE("property: g2 strictly increases in mu dT")
{
    Rng rng = make_rng(103, 0);
    for (int i = 0; i < 1000; ++i) {
        // Varying dT moves mu*dT at fixed fidelity.
        SourceParams p = testing::random_params(rng, 0.4);
        SourceParams q = p;
        q.delta_t = p.delta_t * testing::uniform(rng, 1.001, 0.49 / p.pairs_per_window());
        CHECK(analytic::g2_zero(q) > analytic::g2_zero(p));

        // Noiseless trigger: varying mu at fidelity 1.
        SourceParams r = p;
        r.dark_rate_trigger = 0.0;
        SourceParams s = r;
        s.mu = r.mu * testing::uniform(rng, 1.001, 0.49 / r.pairs_per_window());
        CHECK(analytic::g2_zero(s) > analytic::g2_zero(r));
    }
}

TEST_CASE("property: empty window probability strictly decreases in gamma mu dT")
{
    Rng rng = make_rng(104, 0);
    for (int i = 0; i < 1000; ++i) {
        SourceParams p = testing::random_params(rng, 0.4);
        SourceParams q = p;
        q.mu = p.mu * testing::uniform(rng, 1.001, 0.49 / p.pairs_per_window());
        CHECK(analytic::empty_window_probability(q) < analytic::empty_window_probability(p));
        q = p;
        q.gamma = p.gamma * testing::uniform(rng, 0.5, 0.999);
        CHECK(analytic::empty_window_probability(q) > analytic::empty_window_probability(p));
    }
}

TEST_CASE("property: bounds")
{
    Rng rng = make_rng(105, 0);
    for (int i = 0; i < 2000; ++i) {
        SourceParams p = testing::random_params(rng, 0.49, 0.0);
        double f = analytic::herald_stats(p).fidelity;
        double n = p.pairs_per_window();
        double p1 = analytic::p1(p);
        double p2 = analytic::p2(p);
        CHECK(p1 <= p.gamma * (f + n));
        CHECK(p2 <= p.gamma * p.gamma * n);
        CHECK(p2 >= 0.0);
        CHECK(p2 <= p1);
        CHECK(p1 <= 1.0);
        CHECK(analytic::g2_zero(p) >= 0.0);
    }
}

TEST_CASE("property: weak-source limit")
{
    Rng rng = make_rng(106, 0);
    for (int i = 0; i < 500; ++i) {
        SourceParams p = testing::random_params(rng);
        p.dark_rate_trigger = 0.0;
        p.mu = 1e-6 / p.delta_t;
        CHECK(std::abs(analytic::p1(p) - p.gamma) <= 1e-4);
        CHECK(std::abs(analytic::g2_zero(p)) <= 1e-4);
    }
}

TEST_CASE("property: inverse pairs")
{
    Rng rng = make_rng(107, 0);
    for (int i = 0; i < 2000; ++i) {
        SourceParams p = testing::random_params(rng, 0.3);
        double f = analytic::herald_stats(p).fidelity;
        double mu = analytic::fit_mu_from_p2(analytic::p2(p), p.gamma, p.delta_t, f);
        CHECK(std::abs(mu - p.mu) / p.mu <= 1e-9);

        double n_t = p.herald_rate();
        double gamma = analytic::collection_efficiency_from_counts(analytic::single_detection_rate(p), p.eta_idler,
                                                                    n_t, p.dark_rate_trigger);
        CHECK(std::abs(gamma - p.gamma) / p.gamma <= 1e-9);

        double loss = testing::uniform(rng, 0.0, 30.0);
        double g = testing::uniform(rng, 1e-6, 1.0) * db_to_transmission(loss);
        double back = collection_from_preparation(analytic::preparation_efficiency(g, loss), loss);
        CHECK(std::abs(back - g) <= 1e-12);
    }
}

TEST_CASE("property: validity domain guard")
{
    Rng rng = make_rng(108, 0);
    for (int i = 0; i < 500; ++i) {
        SourceParams p = testing::random_params(rng);
        p.mu = testing::uniform(rng, 0.5, 5.0) / p.delta_t;
        CHECK_THROWS_AS(analytic::figures_of_merit(p), DomainError);
        p.mu = testing::uniform(rng, 0.1001, 0.4999) / p.delta_t;
        CHECK_FALSE(analytic::figures_of_merit(p).warnings.empty());
        p.mu = testing::uniform(rng, 1e-5, 0.0999) / p.delta_t;
        CHECK(analytic::figures_of_merit(p).warnings.empty());
    }
}
