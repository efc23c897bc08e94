// ats: run benchmark experiments or drive an optimization through state files.

#include "ats/ask_tell.hpp"
#include "ats/benchmarks.hpp"
#include "ats/config.hpp"
#include "ats/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kState = 4 };

int cmd_run(const std::string& config_path, std::optional<ats::Seed> seed, const std::string& out_dir) {
    ats::ExperimentConfig cfg = ats::load_config(config_path);
    if (seed) {
        cfg.root_seed = *seed;
        cfg.batch.root_seed = *seed;
    }
    if (!out_dir.empty()) cfg.output = out_dir;

    const ats::ExperimentTrace trace = ats::run_experiment(cfg);
    if (!cfg.output.empty()) ats::write_outputs(trace, cfg.output);

    std::cout << "iter,evals,mean_best,se_best,mean_regret,n_ok,n_failed\n";
    for (const auto& r : ats::aggregate(trace)) {
        std::cout << r.iter << ',' << r.evals << ',' << ats::format_number(r.mean_best) << ','
                  << ats::format_number(r.se_best) << ',' << ats::format_number(r.mean_regret) << ',' << r.n_ok
                  << ',' << r.n_failed << '\n';
    }
    for (const auto& f : trace.failures) {
        std::cerr << "repetition " << f.rep << " failed at iteration " << f.iter << ": " << f.message << '\n';
    }
    return trace.failures.empty() ? kOk : kNumerical;
}

int cmd_suggest(const std::string& state_path) {
    ats::AskTellState state = ats::load_state(state_path);
    const auto pts = ats::suggest(state);
    ats::save_state(state, state_path);
    nlohmann::json out = {{"iteration", state.next_iteration()}, {"points", nlohmann::json::array()}};
    for (const auto& x : pts) out["points"].push_back(std::vector<double>(x.data(), x.data() + x.size()));
    std::cout << out.dump(1) << '\n';
    return kOk;
}

int cmd_update(const std::string& state_path, const std::string& results_path) {
    ats::AskTellState state = ats::load_state(state_path);
    const auto results = ats::load_results(results_path);
    ats::update(state, results);
    ats::save_state(state, state_path);
    std::cout << "evaluations " << state.data.size() << ", best " << ats::format_number(state.data.min_output())
              << '\n';
    return kOk;
}

int cmd_benchmarks_list() {
    for (const auto& name : ats::benchmark_names()) {
        const auto& b = ats::find_benchmark(name);
        std::cout << name << "  d=" << b.dim() << "  domain=";
        for (Eigen::Index i = 0; i < b.dim(); ++i) {
            std::cout << (i ? "x" : "") << '[' << b.domain.lo[i] << ',' << b.domain.hi[i] << ']';
        }
        std::cout << "  min=" << (b.known_minimum ? ats::format_number(*b.known_minimum) : "unknown") << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch Bayesian optimization with acquisition Thompson sampling"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<ats::Seed> seed;
    auto* run = app.add_subcommand("run", "Run a benchmark experiment");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--seed", seed, "Root seed, overrides the config");
    run->add_option("--out", out_dir, "Directory for trace.csv, aggregate.csv and trace.json");

    std::string state_path;
    auto* sug = app.add_subcommand("suggest", "Print the pending batch, computing it if needed");
    sug->add_option("--state", state_path, "State file (JSON)")->required();

    std::string results_path;
    auto* upd = app.add_subcommand("update", "Record evaluations of the pending batch");
    upd->add_option("--state", state_path, "State file (JSON)")->required();
    upd->add_option("--results", results_path, "Results file (JSON)")->required();

    auto* bench = app.add_subcommand("benchmarks", "Built-in objectives");
    bench->require_subcommand(1);
    auto* list = bench->add_subcommand("list", "List built-in objectives");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    // Errors while reading the state file count as state errors; those while
    // reading the config or results file count as config errors.
    bool reading_state = false;
    try {
        if (run->parsed()) return cmd_run(config_path, seed, out_dir);
        if (sug->parsed()) {
            reading_state = true;
            return cmd_suggest(state_path);
        }
        if (upd->parsed()) {
            reading_state = true;
            ats::load_state(state_path);
            reading_state = false;
            return cmd_update(state_path, results_path);
        }
        if (list->parsed()) return cmd_benchmarks_list();
    } catch (const ats::StateMismatchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kState;
    } catch (const ats::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return reading_state ? kState : kConfig;
    } catch (const ats::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ats::LookupError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ats::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const ats::McmcInitError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
