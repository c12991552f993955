#include <doctest.h>

#include <cmath>

#include "hsps/analytic.hpp"
#include "hsps/errors.hpp"
#include "hsps/estimator.hpp"
#include "support.hpp"

using namespace hsps;

namespace {

sim::RawCounts table_counts()
{
    sim::RawCounts c;
    c.heralds = 124302;
    c.gates_opened = c.heralds;
    c.singles = 4702;
    c.coincidences = 8;
    c.duration = 1.0;
    return c;
}

est::BenchParams table_bench()
{
    est::BenchParams b;
    b.eta_idler = 0.10;
    b.delta_t = 3e-9;
    return b;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("efficiency factors")
{
    est::BenchParams b = table_bench();
    CHECK(near(est::coincidence_efficiency(b), 0.005, 1e-15));
    b.splitter_t = 0.3;
    CHECK(near(est::coincidence_efficiency(b), 2 * 0.3 * 0.7 * 0.01, 1e-15));
    b.correction_kappa = 0.0129;
    CHECK(est::coincidence_efficiency(b) == 0.0129);
    b = table_bench();
    CHECK(near(est::two_photon_singles_efficiency(b), 2.0 * (1.0 - 0.95 * 0.95), 1e-15));
    b.correction_kappa = 1.5;
    CHECK_THROWS_AS(est::validate(b), DomainError);
    b = table_bench();
    b.eta_idler = 0.0;
    CHECK_THROWS_AS(est::validate(b), DomainError);
}

TEST_CASE("estimate: saturated ideal source")
{
    sim::RawCounts c;
    c.heralds = 100000;
    c.singles = 10000;
    c.coincidences = 0;
    c.duration = 1.0;
    FiguresOfMerit f = est::estimate(c, table_bench());
    CHECK(near(f.p1, 1.0, 1e-12));
    CHECK(f.p2 == 0.0);
    CHECK(f.g2 == 0.0);
}

TEST_CASE("estimate: published raw counts")
{
    est::BenchParams literal = table_bench();
    literal.multiphoton_correction = false;
    FiguresOfMerit f = est::estimate(table_counts(), literal);
    CHECK(near(f.p1, 0.378, 0.0005));
    CHECK(near(f.p2, 0.0129, 0.00005));
    CHECK(near(f.g2, 2.0 * f.p2 / (f.p1 * f.p1), 1e-15));

    FiguresOfMerit corrected = est::estimate(table_counts(), table_bench());
    CHECK(near(corrected.p2, 0.0129, 0.00005));
    CHECK(near(corrected.p1, 0.353, 0.001));

    est::BenchParams calibrated = table_bench();
    calibrated.correction_kappa = 0.0129;
    FiguresOfMerit c = est::estimate(table_counts(), calibrated);
    CHECK(near(c.p2, 0.005, 0.0002));
    CHECK(near(c.p1, 0.368, 0.001));
}

TEST_CASE("estimate: errors and clamping")
{
    sim::RawCounts c = table_counts();
    c.heralds = 0;
    CHECK_THROWS_AS(est::estimate(c, table_bench()), DomainError);

    est::BenchParams noisy = table_bench();
    noisy.dark_rate_idler = 1e6;
    sim::RawCounts few = table_counts();
    few.singles = 10;
    few.coincidences = 0;
    FiguresOfMerit f = est::estimate(few, noisy);
    CHECK(f.p1 == 0.0);
    CHECK(f.p2 == 0.0);
    CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("property: scale invariance")
{
    Rng rng = make_rng(301, 0);
    for (int i = 0; i < 500; ++i) {
        sim::RawCounts c;
        c.heralds = static_cast<std::uint64_t>(testing::log_uniform(rng, 1e3, 1e8));
        c.singles = static_cast<std::uint64_t>(static_cast<double>(c.heralds) * testing::uniform(rng, 0.0, 0.5));
        c.coincidences = static_cast<std::uint64_t>(static_cast<double>(c.singles) * testing::uniform(rng, 0.0, 0.1));
        c.duration = testing::uniform(rng, 0.1, 100.0);
        est::BenchParams b = table_bench();
        b.eta_idler = testing::uniform(rng, 0.05, 1.0);
        b.dark_rate_idler = i % 2 == 0 ? 0.0 : testing::log_uniform(rng, 1.0, 1e4);
        auto k = static_cast<std::uint64_t>(testing::uniform(rng, 2, 50));
        sim::RawCounts s = c;
        s.heralds *= k;
        s.singles *= k;
        s.coincidences *= k;
        s.duration *= static_cast<double>(k);
        FiguresOfMerit a = est::estimate(c, b);
        FiguresOfMerit z = est::estimate(s, b);
        if (b.dark_rate_idler == 0.0) {
            CHECK(a.p1 == z.p1);
            CHECK(a.p2 == z.p2);
            CHECK(a.g2 == z.g2);
        } else {
            CHECK(near(a.p1, z.p1, 1e-12 * std::max(1.0, a.p1)));
            CHECK(near(a.p2, z.p2, 1e-12 * std::max(1.0, a.p2)));
            CHECK(near(a.g2, z.g2, 1e-12 * std::max(1.0, a.g2)));
        }
    }
}

TEST_CASE("property: kappa override scales P2 by 1/c")
{
    Rng rng = make_rng(302, 0);
    for (int i = 0; i < 500; ++i) {
        sim::RawCounts c = table_counts();
        c.coincidences = static_cast<std::uint64_t>(testing::uniform(rng, 1, 200));
        est::BenchParams b = table_bench();
        b.eta_idler = testing::uniform(rng, 0.05, 1.0);
        double factor = testing::uniform(rng, 0.1, 10.0);
        est::BenchParams scaled = b;
        scaled.correction_kappa = factor * est::coincidence_efficiency(b);
        if (*scaled.correction_kappa > 1.0) {
            continue;
        }
        FiguresOfMerit a = est::estimate(c, b);
        FiguresOfMerit s = est::estimate(c, scaled);
        CHECK(near(s.p2, a.p2 / factor, 1e-12 * a.p2));
    }
}

TEST_CASE("property: g2 consistency")
{
    Rng rng = make_rng(303, 0);
    for (int i = 0; i < 500; ++i) {
        sim::RawCounts c = table_counts();
        c.singles = static_cast<std::uint64_t>(testing::uniform(rng, 100, 10000));
        c.coincidences = static_cast<std::uint64_t>(testing::uniform(rng, 0, 100));
        est::BenchParams b = table_bench();
        b.multiphoton_correction = false;
        FiguresOfMerit f = est::estimate(c, b);
        CHECK(near(f.g2, 2.0 * f.p2 / (f.p1 * f.p1), 1e-12 * std::max(1.0, f.g2)));

        b.multiphoton_correction = true;
        FiguresOfMerit g = est::estimate(c, b);
        double m1 = static_cast<double>(c.singles) / (b.eta_idler * static_cast<double>(c.heralds));
        CHECK(near(g.g2, 2.0 * g.p2 / (m1 * m1), 1e-12 * std::max(1.0, g.g2)));
        CHECK(g.p2 == f.p2);
    }
}

TEST_CASE("accidental_coincidence_rate")
{
    est::BenchParams b = table_bench();
    CHECK(est::accidental_coincidence_rate(table_counts(), b) == 0.0);
    b.dark_rate_idler = 1e4;
    CHECK(near(est::accidental_coincidence_rate(table_counts(), b), 0.14, 0.005));
    sim::RawCounts dark = table_counts();
    dark.singles = 0;
    double pd = 1e4 * 3e-9;
    CHECK(near(est::accidental_coincidence_rate(dark, b), 124302 * pd * pd, 1e-15));
}

TEST_CASE("bootstrap_errors")
{
    est::BenchParams b = table_bench();
    b.multiphoton_correction = false;
    FiguresOfMerit counting = est::bootstrap_errors(table_counts(), b, 4000, 5);
    REQUIRE(counting.has_uncertainties());
    CHECK(*counting.sigma_p1 > 0.004);
    CHECK(*counting.sigma_p1 < 0.008);
    CHECK(*counting.sigma_p2 / counting.p2 > 0.3);
    CHECK(*counting.sigma_p2 / counting.p2 < 0.4);
    CHECK(counting.p1 == est::estimate(table_counts(), b).p1);

    est::BootstrapOptions sys;
    sys.eta_relative_sigma = 0.05;
    FiguresOfMerit with_eta = est::bootstrap_errors(table_counts(), b, 4000, 5, sys);
    CHECK(*with_eta.sigma_p1 > 0.015);
    CHECK(*with_eta.sigma_p1 < 0.025);

    FiguresOfMerit again = est::bootstrap_errors(table_counts(), b, 4000, 5, sys);
    CHECK(*again.sigma_p1 == *with_eta.sigma_p1);
    CHECK(*again.sigma_g2 == *with_eta.sigma_g2);
    sys.threads = 1;
    FiguresOfMerit serial = est::bootstrap_errors(table_counts(), b, 4000, 5, sys);
    CHECK(*serial.sigma_p2 == *with_eta.sigma_p2);

    sim::RawCounts huge;
    huge.heralds = 1'000'000'000'000;
    huge.singles = 40'000'000'000;
    huge.coincidences = 100'000'000;
    huge.duration = 1.0;
    FiguresOfMerit h = est::bootstrap_errors(huge, b, 200, 5);
    CHECK(*h.sigma_p1 / h.p1 < 1e-4);
    CHECK(*h.sigma_p2 / h.p2 < 1e-3);

    sim::RawCounts none = table_counts();
    none.coincidences = 0;
    FiguresOfMerit z = est::bootstrap_errors(none, b, 200, 5);
    CHECK(z.p2_upper_limit_only);
    CHECK(*z.sigma_p2 > 0.0);

    CHECK_THROWS_AS(est::bootstrap_errors(table_counts(), b, 50, 5), DomainError);
}
