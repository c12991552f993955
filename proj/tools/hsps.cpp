// Command-line front end. Exit codes: 0 success, 1 golden-test failure,
// 2 validation error.
#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>

#include "hsps/analytic.hpp"
#include "hsps/errors.hpp"
#include "hsps/estimator.hpp"
#include "hsps/records.hpp"
#include "hsps/report.hpp"
#include "hsps/simulator.hpp"

namespace {

constexpr int kExitGoldenFailure = 1;
constexpr int kExitValidation = 2;

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const std::string& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace hsps;

    CLI::App app{"Heralded single-photon source statistics: analytic model, Monte Carlo bench and count estimator"};
    app.require_subcommand(1);

    std::string which = "all";
    std::string format = "table";
    double mc_duration = 10.0;
    std::uint64_t seed = 1;
    auto* reproduce = app.add_subcommand("reproduce", "compare the model against the published results tables");
    reproduce->add_option("--which", which, "calculated, predicted, experimental or all");
    reproduce->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
    reproduce->add_option("--mc-duration", mc_duration, "Monte Carlo cross-check length in seconds (0 skips it)");
    reproduce->add_option("--seed", seed, "Monte Carlo seed");

    std::string config_path;
    auto* analytic_cmd = app.add_subcommand("analytic", "closed-form P1, P2 and g2 for a configuration");
    analytic_cmd->add_option("--config", config_path, "configuration file")->required();
    double rel_sigma = 0.0;
    std::size_t resamples = 10000;
    analytic_cmd->add_option("--relative-sigma", rel_sigma, "relative uncertainty on gamma and mu for error bars");
    analytic_cmd->add_option("--resamples", resamples, "parametric bootstrap resamples");
    analytic_cmd->add_option("--seed", seed, "bootstrap seed");

    double duration = 0.0;
    std::size_t replicas = 0;
    std::string out_path;
    std::string mode;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run of the bench");
    simulate_cmd->add_option("--config", config_path, "configuration file")->required();
    simulate_cmd->add_option("--duration", duration, "seconds per replica (overrides [sim] duration)");
    auto* seed_opt = simulate_cmd->add_option("--seed", seed, "master seed (overrides [sim] seed)");
    simulate_cmd->add_option("--replicas", replicas, "independent replicas (overrides [sim] replicas)");
    simulate_cmd->add_option("--mode", mode, "restricted or brute_force")
        ->check(CLI::IsMember({"restricted", "brute_force"}));
    simulate_cmd->add_option("--out", out_path, "output record file (stdout when omitted)");

    std::string counts_path;
    std::size_t bootstrap = 0;
    double eta_sigma = 0.0;
    auto* estimate_cmd = app.add_subcommand("estimate", "P1, P2 and g2 from a counts record");
    estimate_cmd->add_option("--counts", counts_path, "counts record file")->required();
    estimate_cmd->add_option("--config", config_path, "configuration file")->required();
    estimate_cmd->add_option("--bootstrap", bootstrap, "bootstrap resamples for error bars (0 skips)");
    estimate_cmd->add_option("--eta-sigma", eta_sigma, "relative systematic on eta_idler in the bootstrap");
    estimate_cmd->add_option("--seed", seed, "bootstrap seed");

    cli::SweepSpec spec;
    std::string method = "analytic";
    double sweep_duration = 1.0;
    std::string scenario_name;
    auto* sweep_cmd = app.add_subcommand("sweep", "one-parameter sweep written as CSV");
    sweep_cmd->add_option("--param", spec.param, "mu, delta_t, gamma, eta_trigger or dark_rate_trigger")->required();
    sweep_cmd->add_option("--min", spec.min)->required();
    sweep_cmd->add_option("--max", spec.max)->required();
    sweep_cmd->add_option("--steps", spec.steps)->required();
    sweep_cmd->add_flag("--log", spec.log, "logarithmic spacing");
    sweep_cmd->add_option("--method", method, "analytic or monte-carlo");
    sweep_cmd->add_option("--seed", seed);
    sweep_cmd->add_option("--duration", sweep_duration, "Monte Carlo seconds per step");
    sweep_cmd->add_option("--config", config_path, "base configuration (default: paper-experimental)");
    sweep_cmd->add_option("--scenario", scenario_name, "base scenario from the catalog");

    std::string name;
    auto* scenario_cmd = app.add_subcommand("scenario", "print a catalog scenario as a configuration file");
    scenario_cmd->add_option("--name", name, "paper-experimental, paper-predicted or faint-laser-equivalent")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*reproduce) {
            cli::ReproduceOptions opts;
            opts.mc_duration = mc_duration;
            opts.seed = seed;
            cli::RunReport report = cli::run_reproduce(cli::parse_column(which), opts);
            std::cout << (format == "csv" ? cli::format_csv(report) : cli::format_table(report));
            return report.passed() ? 0 : kExitGoldenFailure;
        }
        if (*analytic_cmd) {
            io::ConfigFile cfg = io::read_config(io::read_text_file(config_path));
            FiguresOfMerit fom;
            if (rel_sigma > 0.0) {
                analytic::RelativeSigmas sigmas;
                sigmas.gamma = rel_sigma;
                sigmas.mu = rel_sigma;
                fom = analytic::propagate_uncertainty(cfg.scenario.params, sigmas, resamples, seed);
            } else {
                fom = analytic::figures_of_merit(cfg.scenario.params);
            }
            std::cout << io::write_figures(fom);
            std::cout << fmt::format("# single_detection_rate={}\n# empty_window_probability={}\n",
                                     io::format_number(analytic::single_detection_rate(cfg.scenario.params)),
                                     io::format_number(analytic::empty_window_probability(cfg.scenario.params)));
            return 0;
        }
        if (*simulate_cmd) {
            io::ConfigFile cfg = io::read_config(io::read_text_file(config_path));
            sim::SimConfig sc;
            sc.params = cfg.scenario.params;
            sc.duration = duration > 0.0 ? duration : cfg.sim.duration;
            sc.seed = seed_opt->count() > 0 ? seed : cfg.sim.seed;
            sc.replicas = replicas > 0 ? replicas : cfg.sim.replicas;
            sc.mode = cfg.sim.mode;
            if (!mode.empty()) {
                sc.mode = mode == "restricted" ? sim::EventMode::restricted : sim::EventMode::brute_force;
            }
            sc.idler_dead_time = cfg.sim.idler_dead_time;
            sim::SimResult result = sim::simulate(sc);
            print_warnings(result.warnings);
            std::string text = io::write_sim_result(result);
            if (out_path.empty()) {
                std::cout << text;
            } else {
                io::write_text_file(out_path, text);
            }
            return 0;
        }
        if (*estimate_cmd) {
            io::ConfigFile cfg = io::read_config(io::read_text_file(config_path));
            sim::RawCounts counts = io::read_raw_counts(io::read_text_file(counts_path));
            FiguresOfMerit fom;
            if (bootstrap > 0) {
                est::BootstrapOptions bo;
                bo.eta_relative_sigma = eta_sigma;
                fom = est::bootstrap_errors(counts, cfg.bench, bootstrap, seed, bo);
            } else {
                fom = est::estimate(counts, cfg.bench);
            }
            std::cout << io::write_figures(fom);
            std::cout << fmt::format("# accidental_coincidence_rate={}\n",
                                     io::format_number(est::accidental_coincidence_rate(counts, cfg.bench)));
            return 0;
        }
        if (*sweep_cmd) {
            cli::SweepOptions opts;
            opts.seed = seed;
            opts.duration = sweep_duration;
            if (!config_path.empty()) {
                opts.base = io::read_config(io::read_text_file(config_path)).scenario;
            } else if (!scenario_name.empty()) {
                opts.base = make_scenario(scenario_name);
            }
            cli::SweepTable table = cli::run_sweep(spec, cli::parse_sweep_method(method), opts);
            std::cout << table.csv();
            return 0;
        }
        if (*scenario_cmd) {
            std::cout << io::write_config(make_scenario(name), io::SimSettings{});
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
