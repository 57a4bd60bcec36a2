// Command-line front end: one subcommand per experiment scenario, CSV or
// text table output with a JSON run manifest.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "agg/errors.hpp"
#include "agg/experiment.hpp"

namespace {

agg::EnsembleSpec parse_neighbors(const std::string& text) {
    agg::EnsembleSpec spec;
    if (text.empty()) return spec;
    if (text.rfind("random:", 0) == 0) {
        spec.mode = agg::EnsembleSpec::Mode::random_odd;
        spec.count = std::stoi(text.substr(7));
        return spec;
    }
    spec.mode = agg::EnsembleSpec::Mode::fixed_list;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) spec.list.push_back(std::stoi(item));
    }
    return spec;
}

struct CliOptions {
    agg::ExperimentConfig cfg;
    std::string neighbors;
    std::string theta_form = "exp";
    std::string format = "csv";
    double h1 = 0.0;
    double h2 = 0.0;
    std::vector<long long> sweep_ls;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--n", opt.cfg.n, "training-sample size");
    cmd->add_option("--k", opt.cfg.k, "size of the base-classifier half of the split");
    cmd->add_option("--alpha", opt.cfg.alphas, "agreement relaxation level(s) in [0,1)")
        ->expected(-1);
    cmd->add_option("--reps", opt.cfg.reps, "repetition count");
    cmd->add_option("--seed", opt.cfg.seed, "master seed");
    cmd->add_option("--test-size", opt.cfg.test_size, "test-set size (0: scenario default)");
    cmd->add_option("--dim", opt.cfg.dim, "ambient dimension (0: scenario default)");
    cmd->add_option("--neighbors", opt.neighbors,
                    "comma list of odd neighbor counts, or random:M");
    cmd->add_option("--threads", opt.cfg.threads, "worker threads for repetitions");
    cmd->add_option("--out", opt.cfg.out, "output path (default: stdout)");
    cmd->add_option("--format", opt.format, "csv|text")
        ->check(CLI::IsMember({"csv", "text"}));
}

agg::ExperimentConfig finalize(CliOptions& opt, agg::Scenario scenario) {
    opt.cfg.scenario = scenario;
    if (!opt.neighbors.empty()) {
        opt.cfg.ensemble = parse_neighbors(opt.neighbors);
    } else if (scenario == agg::Scenario::highdim_random) {
        opt.cfg.ensemble.mode = agg::EnsembleSpec::Mode::random_odd;
    }
    if (opt.cfg.alphas.empty()) opt.cfg.alphas = {0.0};
    opt.cfg.format = opt.format == "text" ? agg::OutputFormat::text : agg::OutputFormat::csv;
    opt.cfg.theta_form = opt.theta_form == "inverse-square" ? agg::ThetaForm::inverse_square
                                                            : agg::ThetaForm::exponential;
    if (opt.h1 > 0.0 || opt.h2 > 0.0) {
        agg::SmootherSpec sm;
        if (opt.h1 > 0.0) sm.h1 = opt.h1;
        if (opt.h2 > 0.0) sm.h2 = opt.h2;
        opt.cfg.smoother = sm;
    }
    if (!opt.sweep_ls.empty()) {
        opt.cfg.sweep_ls.clear();
        for (long long l : opt.sweep_ls) opt.cfg.sweep_ls.push_back(l);
    }
    return opt.cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlinear aggregation-type classifier experiments"};
    app.require_subcommand(1);

    CliOptions opt;
    opt.cfg.alphas.clear();

    auto* hd_fixed = app.add_subcommand("highdim-fixed",
                                        "translated-cube model, fixed odd neighbor list");
    auto* hd_random = app.add_subcommand("highdim-random",
                                         "translated-cube model, random odd neighbor counts vs cv-kNN");
    auto* fun1 = app.add_subcommand("functional-I", "sine-basis curve model I");
    auto* fun2 = app.add_subcommand("functional-II",
                                    "sine-basis curve model II with training-set smoothing");
    auto* sweep = app.add_subcommand("thm2-sweep",
                                     "risk vs pool size for a fixed base-classifier fit");
    auto* bridge = app.add_subcommand("oracle-bridge",
                                      "empirical cell-table limit risk vs test risk");
    for (CLI::App* cmd : {hd_fixed, hd_random, fun1, fun2, sweep, bridge}) {
        add_common_flags(cmd, opt);
    }
    fun2->add_option("--h1", opt.h1, "bandwidth for population 1 (label 1)");
    fun2->add_option("--h2", opt.h2, "bandwidth for population 2 (label 0)");
    fun2->add_flag("--cv-bandwidths", opt.cfg.select_bandwidths,
                   "select bandwidths per repetition by pipeline cross-validation");
    fun2->add_option("--theta-form", opt.theta_form, "error eigenvalue form")
        ->check(CLI::IsMember({"exp", "inverse-square"}));
    for (CLI::App* cmd : {sweep, bridge}) {
        cmd->add_option("--sweep-l", opt.sweep_ls, "pool size(s) l for the sweep")->expected(-1);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (hd_fixed->parsed() || hd_random->parsed() || fun1->parsed() || fun2->parsed()) {
            agg::Scenario sc = agg::Scenario::highdim_fixed;
            if (hd_random->parsed()) sc = agg::Scenario::highdim_random;
            if (fun1->parsed()) sc = agg::Scenario::functional_I;
            if (fun2->parsed()) sc = agg::Scenario::functional_II;
            const agg::ExperimentConfig cfg = finalize(opt, sc);
            const agg::ExperimentResult result = agg::run_experiment(cfg);
            agg::emit_table(result, cfg.format, cfg.out);
        } else if (sweep->parsed()) {
            const agg::ExperimentConfig cfg = finalize(opt, agg::Scenario::thm2_sweep);
            const agg::SweepResult result = agg::thm2_sweep(cfg);
            agg::emit_text(agg::format_sweep(result, cfg.format), agg::manifest_line(cfg),
                           cfg.format, cfg.out);
        } else {
            const agg::ExperimentConfig cfg = finalize(opt, agg::Scenario::oracle_bridge);
            const agg::BridgeResult result = agg::oracle_bridge(cfg);
            agg::emit_text(agg::format_bridge(result, cfg.format), agg::manifest_line(cfg),
                           cfg.format, cfg.out);
        }
    } catch (const agg::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
