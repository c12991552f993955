#include <doctest.h>

#include <cmath>

#include "hsps/errors.hpp"
#include "hsps/report.hpp"

using namespace hsps;

namespace {

bool all_pass(const cli::ColumnReport& col, std::string_view method)
{
    bool any = false;
    for (const cli::FigureCheck& c : col.checks) {
        if (c.method == method && c.status != cli::Status::info) {
            any = true;
            if (c.status != cli::Status::pass) {
                return false;
            }
        }
    }
    return any;
}

}  // namespace

TEST_CASE("reproduce: calculated and predicted columns pass")
{
    cli::ReproduceOptions opts;
    opts.mc_duration = 0.0;
    cli::RunReport calc = cli::run_reproduce(cli::Column::calculated, opts);
    REQUIRE(calc.columns.size() == 1);
    CHECK(all_pass(calc.columns[0], "analytic"));
    CHECK(calc.passed());
    CHECK(calc.columns[0].params.find("mu=6600000") != std::string::npos);

    cli::RunReport pred = cli::run_reproduce(cli::Column::predicted, opts);
    REQUIRE(pred.columns.size() == 1);
    CHECK(all_pass(pred.columns[0], "analytic"));
    CHECK(pred.passed());
}

TEST_CASE("reproduce: experimental column flags instead of failing")
{
    cli::RunReport exp = cli::run_reproduce(cli::Column::experimental);
    REQUIRE(exp.columns.size() == 1);
    bool flagged_p2 = false;
    for (const cli::FigureCheck& c : exp.columns[0].checks) {
        CHECK(c.status != cli::Status::fail);
        if (c.figure == "p2" && c.status == cli::Status::flagged) {
            flagged_p2 = true;
        }
    }
    CHECK(flagged_p2);
    CHECK_FALSE(exp.columns[0].notes.empty());
    CHECK(exp.passed());
}

TEST_CASE("reproduce: reports round-trip their parameters")
{
    cli::ReproduceOptions opts;
    opts.mc_duration = 0.0;
    cli::RunReport all = cli::run_reproduce(cli::Column::all, opts);
    CHECK(all.columns.size() == 3);
    std::string table = cli::format_table(all);
    std::string csv = cli::format_csv(all);
    CHECK(table.find("PASS") != std::string::npos);
    CHECK(csv.find("column,scenario,method,figure") == 0);
    CHECK_THROWS_AS(cli::parse_column("middle"), ValidationError);
}

TEST_CASE("sweep specification validation")
{
    cli::SweepSpec s{"gamma", 0.0, 0.0, 1, false};
    CHECK_THROWS_AS(cli::validate(s), ValidationError);
    s = {"gamma", 0.1, 0.9, 1, false};
    CHECK_THROWS_AS(cli::validate(s), ValidationError);
    s = {"gamma", 0.0, 0.9, 5, true};
    CHECK_THROWS_AS(cli::validate(s), ValidationError);
    s = {"delta_t", 0.5e-9, 50e-9, 5, false};
    CHECK_THROWS_AS(cli::validate(s), ValidationError);
    s = {"colour", 0.1, 0.9, 5, false};
    CHECK_THROWS_AS(cli::validate(s), ValidationError);
    s = {"delta_t", 3e-9, 50e-9, 5, false};
    CHECK_NOTHROW(cli::validate(s));
    std::vector<double> v = cli::sweep_values(s);
    CHECK(v.front() == 3e-9);
    CHECK(v.back() == 50e-9);
}

TEST_CASE("sweep: gate width raises g2")
{
    cli::SweepSpec s{"delta_t", 3e-9, 50e-9, 12, false};
    cli::SweepTable t = cli::run_sweep(s, cli::SweepMethod::analytic);
    REQUIRE(t.rows.size() == 12);
    for (const cli::SweepRow& r : t.rows) {
        CHECK(r.valid);
    }
    CHECK(t.trend(&FiguresOfMerit::g2) == cli::Trend::increasing);
    CHECK(t.csv().find("# trend") != std::string::npos);
}

TEST_CASE("sweep: invalid rows are marked and the sweep continues")
{
    cli::SweepSpec s{"mu", 1e6, 3e8, 6, true};
    cli::SweepTable t = cli::run_sweep(s, cli::SweepMethod::analytic);
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows.front().valid);
    CHECK_FALSE(t.rows.back().valid);
}

TEST_CASE("sweep: suppression stays above 10 over the source's operating range")
{
    cli::SweepSpec s{"mu", 1e5, 6.6e6, 20, true};
    cli::SweepTable t = cli::run_sweep(s, cli::SweepMethod::analytic);
    for (const cli::SweepRow& r : t.rows) {
        CHECK(r.valid);
        CHECK(r.suppression >= 10.0);
    }
}

TEST_CASE("sweep: CSV output is bit-stable")
{
    cli::SweepSpec s{"gamma", 0.2, 0.9, 3, false};
    cli::SweepOptions o;
    o.duration = 0.05;
    o.seed = 17;
    o.bootstrap_resamples = 100;
    std::string a = cli::run_sweep(s, cli::SweepMethod::monte_carlo, o).csv();
    std::string b = cli::run_sweep(s, cli::SweepMethod::monte_carlo, o).csv();
    CHECK(a == b);
    CHECK(a.find("sigma_p1") != std::string::npos);
    std::string c = cli::run_sweep(s, cli::SweepMethod::analytic).csv();
    CHECK(c == cli::run_sweep(s, cli::SweepMethod::analytic).csv());
}

TEST_CASE("csv_number")
{
    CHECK(cli::csv_number(0.388) == "0.388");
    CHECK(cli::csv_number(0.00352) == "0.00352");
    CHECK(cli::csv_number(0.000352) == "3.520000e-04");
    CHECK(cli::csv_number(INFINITY) == "inf");
}
