// Command-line driver: scenario generation, training, evaluation, the fixed
// case study, parameter sweeps, and SVG plots. Every command is a pure
// function of its flags and input files, so repeated runs produce identical
// output bytes.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "voiplan/baselines.hpp"
#include "voiplan/env.hpp"
#include "voiplan/errors.hpp"
#include "voiplan/experiments.hpp"
#include "voiplan/learner.hpp"
#include "voiplan/plot.hpp"
#include "voiplan/scenario.hpp"
#include "voiplan/text.hpp"

namespace {

namespace fs = std::filesystem;
using namespace voiplan;

struct GlobalFlags {
    std::uint64_t seed = 1;
    long episodes = 200000;
    std::string out_dir = ".";
    std::string reward_scale = "spectral";
    int threads = 0;

    // set when the user passed the flag explicitly (beats file contents)
    bool seed_given = false;
    bool episodes_given = false;

    RewardScale scale() const { return reward_scale_from_string(reward_scale); }
};

std::string resolve_output(const GlobalFlags& global, const std::string& explicit_path,
                           const char* default_name) {
    if (!explicit_path.empty()) {
        return explicit_path;
    }
    fs::create_directories(global.out_dir);
    return (fs::path(global.out_dir) / default_name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot open for writing: " + path);
    }
    out << content;
    if (!out) {
        throw error("write failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw error("cannot open: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Applies explicit global flags on top of the learner block from a file.
LearnerConfig effective_config(LearnerConfig config, const GlobalFlags& global) {
    if (global.episodes_given) {
        config.episodes = global.episodes;
        config.epsilon_decrement = global.episodes > 0
                                       ? config.epsilon_init / static_cast<double>(global.episodes)
                                       : 0.0;
    }
    if (global.seed_given) {
        config.rng_seed = global.seed;
    }
    return config;
}

int run(int argc, char** argv) {
    CLI::App app{"Joint path planning and scheduling for value-of-information data collection"};
    app.require_subcommand(1);

    GlobalFlags global;
    app.add_option("--seed", global.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--episodes", global.episodes, "Training episodes")->capture_default_str();
    app.add_option("--out-dir", global.out_dir, "Directory for default output files")
        ->capture_default_str();
    app.add_option("--reward-scale", global.reward_scale,
                   "Reward normalization: spectral (min VoI / bandwidth) or raw (bits/s)")
        ->check(CLI::IsMember({"spectral", "raw"}))
        ->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();

    // gen -------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a random scenario file");
    int gen_nodes = 4;
    int gen_grid = 5;
    int gen_horizon = 30;
    double gen_rho_center = 0.5;
    double gen_rho_halfwidth = 0.5;
    double gen_tx_power = 1.0;
    std::string gen_output;
    gen->add_option("--nodes", gen_nodes, "Number of sensing nodes")->capture_default_str();
    gen->add_option("--grid", gen_grid, "Lattice extent G (points 0..G per axis)")
        ->capture_default_str();
    gen->add_option("--horizon", gen_horizon, "Slots per episode")->capture_default_str();
    gen->add_option("--rho-center", gen_rho_center, "Correlation interval center")
        ->capture_default_str();
    gen->add_option("--rho-halfwidth", gen_rho_halfwidth, "Correlation interval halfwidth")
        ->capture_default_str();
    gen->add_option("--tx-power", gen_tx_power, "Per-node transmit power, W")
        ->capture_default_str();
    gen->add_option("-o,--output", gen_output, "Output path (default <out-dir>/scenario.json)");

    // train -----------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Train a Q-table for a scenario");
    std::string train_scenario;
    std::string train_output;
    std::string train_policy = "voi-optimal";
    train_cmd->add_option("scenario", train_scenario, "Scenario JSON file")->required();
    train_cmd->add_option("--policy", train_policy, "Training objective")
        ->check(CLI::IsMember({"voi-optimal", "aoi-optimal"}))
        ->capture_default_str();
    train_cmd->add_option("-o,--output", train_output,
                          "Output path (default <out-dir>/qtable.bin)");

    // eval ------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Roll out a policy and write its trace CSV");
    std::string eval_scenario;
    std::string eval_policy = "voi-optimal";
    std::string eval_qtable;
    std::string eval_output;
    eval_cmd->add_option("scenario", eval_scenario, "Scenario JSON file")->required();
    eval_cmd->add_option("--policy", eval_policy, "Policy to evaluate")
        ->check(CLI::IsMember({"voi-optimal", "aoi-optimal", "shortest-path", "oracle"}))
        ->capture_default_str();
    eval_cmd->add_option("--qtable", eval_qtable,
                         "Q-table file for learned policies (trains in-process when omitted)");
    eval_cmd->add_option("-o,--output", eval_output, "Output path (default <out-dir>/trace.csv)");

    // case-study ------------------------------------------------------
    auto* case_cmd = app.add_subcommand(
        "case-study", "Run the fixed three-node comparison and write its tables");
    int case_seeds = 5;
    case_cmd->add_option("--seeds", case_seeds, "Training seeds to average over")
        ->capture_default_str();

    // sweep -----------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a spec file");
    std::string sweep_spec_path;
    std::string sweep_output;
    sweep_cmd->add_option("spec", sweep_spec_path, "Sweep spec JSON file")->required();
    sweep_cmd->add_option("-o,--output", sweep_output,
                          "Output path (default <out-dir>/sweep.csv)");

    // plot ------------------------------------------------------------
    auto* plot_cmd = app.add_subcommand("plot", "Render a result CSV as an SVG line chart");
    std::string plot_input;
    std::string plot_output;
    plot_cmd->add_option("csv", plot_input, "Sweep or case-study series CSV")->required();
    plot_cmd->add_option("-o,--output", plot_output, "Output path (default <out-dir>/plot.svg)");

    // Global flags may appear before or after the subcommand name.
    for (auto* sub : {gen, train_cmd, eval_cmd, case_cmd, sweep_cmd, plot_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        app.exit(e);
        return 1;
    }

    global.seed_given = app.count("--seed") > 0;
    global.episodes_given = app.count("--episodes") > 0;

    if (gen->parsed()) {
        Scenario scenario =
            generate_random(gen_nodes, gen_grid, gen_rho_center, gen_rho_halfwidth, global.seed);
        scenario.horizon = gen_horizon;
        scenario.radio.tx_power_watts.assign(scenario.nodes.size(), gen_tx_power);
        scenario.validate();
        const LearnerConfig config = desk_config(global.episodes, global.seed);
        const std::string path = resolve_output(global, gen_output, "scenario.json");
        save_file(scenario, config, path);
        std::cout << "wrote " << path << " (" << scenario.node_count() << " nodes, horizon "
                  << scenario.horizon << ")\n";
        return 0;
    }

    if (train_cmd->parsed()) {
        auto [scenario, file_config] = load_file(train_scenario);
        const LearnerConfig config = effective_config(file_config, global);
        const RewardFn reward_fn = train_policy == "aoi-optimal"
                                       ? make_aoi_reward(config.penalty)
                                       : RewardFn(env_reward);
        auto [table, report] = train(scenario, config, reward_fn, global.scale());
        const std::string path = resolve_output(global, train_output, "qtable.bin");
        save_qtable(table, scenario, config, path);
        std::cout << "wrote " << path << " (" << table.state_count() << " states after "
                  << report.episodes_run << " episodes, final epsilon "
                  << format_double(report.final_epsilon) << ")\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        auto [scenario, file_config] = load_file(eval_scenario);
        const LearnerConfig config = effective_config(file_config, global);
        const RewardOptions reward{config.penalty, global.scale()};
        EpisodeTrace trace;
        if (eval_policy == "shortest-path") {
            trace = rollout(scenario, shortest_path_policy(scenario), scenario.horizon, reward);
        } else if (eval_policy == "oracle") {
            const OracleResult oracle =
                exhaustive_oracle(scenario, scenario.horizon, config.discount, env_reward, reward);
            trace = rollout(scenario, plan_policy(oracle.actions), scenario.horizon, reward);
        } else {
            const RewardFn reward_fn = eval_policy == "aoi-optimal"
                                           ? make_aoi_reward(config.penalty)
                                           : RewardFn(env_reward);
            QTable table = eval_qtable.empty()
                               ? std::move(train(scenario, config, reward_fn, global.scale()).first)
                               : load_qtable(eval_qtable, scenario);
            trace = rollout(scenario, greedy_policy(table, scenario), scenario.horizon, reward);
        }
        const std::string path = resolve_output(global, eval_output, "trace.csv");
        write_text_file(path, trace_csv(trace, scenario));
        std::cout << "wrote " << path << " (time-avg min VoI "
                  << format_double(trace.time_avg_min_voi) << " bits/s)\n";
        return 0;
    }

    if (case_cmd->parsed()) {
        CaseStudyOptions options;
        options.episodes = global.episodes;
        options.seeds = case_seeds;
        options.base_seed = global.seed;
        options.scale = global.scale();
        options.threads = global.threads;
        const CaseStudyResult result = run_case_study(case_study_scenario(), options);

        fs::create_directories(global.out_dir);
        const std::string stats_path =
            (fs::path(global.out_dir) / "case_study_stats.csv").string();
        const std::string series_path =
            (fs::path(global.out_dir) / "case_study_series.csv").string();
        write_text_file(stats_path, case_study_csv(result));
        write_text_file(series_path, case_study_series_csv(result));
        for (std::size_t k = 0; k < result.kinds.size(); ++k) {
            const std::string trace_path =
                (fs::path(global.out_dir) /
                 (std::string("case_study_trace_") + to_string(result.kinds[k]) + ".csv"))
                    .string();
            write_text_file(trace_path, trace_csv(result.traces[k][0], result.scenario));
        }
        std::cout << "wrote " << stats_path << " and " << series_path << '\n';
        for (PolicyKind kind : result.kinds) {
            std::cout << to_string(kind) << ": time-avg mean VoI "
                      << format_double(result.mean_time_avg_mean_voi(kind)) << " bits/s\n";
        }
        return 0;
    }

    if (sweep_cmd->parsed()) {
        SweepSpec spec = load_sweep_spec_file(sweep_spec_path);
        if (global.episodes_given) spec.episodes = global.episodes;
        if (global.seed_given) spec.base_seed = global.seed;
        if (global.threads > 0) spec.threads = global.threads;
        if (app.count("--reward-scale") > 0) spec.scale = global.scale();
        const SweepResult result = run_sweep(spec);
        const std::string path = resolve_output(global, sweep_output, "sweep.csv");
        write_text_file(path, sweep_csv(result));
        std::cout << "wrote " << path << " (" << result.cells.size() << " rows)\n";
        return 0;
    }

    if (plot_cmd->parsed()) {
        const LineChart chart = chart_from_csv(read_text_file(plot_input));
        const std::string path = resolve_output(global, plot_output, "plot.svg");
        write_text_file(path, render_svg(chart));
        std::cout << "wrote " << path << '\n';
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const voiplan::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
