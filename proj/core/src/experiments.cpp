#include "voiplan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "voiplan/errors.hpp"
#include "voiplan/text.hpp"

namespace voiplan {

namespace {

int worker_count(int requested, std::size_t tasks) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), tasks));
}

// Runs tasks[0..n) on a small pool. Each task writes only its own slot, so
// the combined result does not depend on scheduling. The first failing task
// (by index) wins error reporting.
void run_tasks(const std::vector<std::function<void()>>& tasks, int threads) {
    if (tasks.empty()) return;
    const int n = worker_count(threads, tasks.size());
    if (n == 1) {
        for (const auto& task : tasks) task();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    tasks[i]();
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
}

RunStats stats_from(const EpisodeTrace& trace, PolicyKind kind, std::uint64_t seed,
                    double gamma) {
    RunStats s;
    s.kind = kind;
    s.seed = seed;
    s.time_avg_min_voi = trace.time_avg_min_voi;
    s.time_avg_mean_voi = trace.time_avg_mean_voi;
    s.final_min_voi = trace.min_voi_series.empty() ? 0.0 : trace.min_voi_series.back();
    s.discounted_return = trace.discounted_return(gamma);
    return s;
}

EpisodeTrace train_and_rollout(const Scenario& scenario, const LearnerConfig& config,
                               const RewardFn& reward_fn, RewardScale scale) {
    auto [table, report] = train(scenario, config, reward_fn, scale);
    (void)report;
    const Policy policy = greedy_policy(table, scenario);
    return rollout(scenario, policy, scenario.horizon, {config.penalty, scale});
}

} // namespace

Scenario case_study_scenario() {
    // Three nodes around a hub the collector can serve without moving: the
    // interesting comparison is pure scheduling (which node, how often), and
    // every policy can reach a zero-penalty rotation.
    Scenario s;
    s.grid_extent = 5;
    s.horizon = 10;
    s.entity_start = {3, 3};
    s.nodes = {
        {{2, 3}, 0.7, 2},
        {{4, 3}, 0.6, 4},
        {{3, 2}, 0.5, 4},
    };
    s.radio.tx_power_watts = {1.0, 1.0, 1.0};
    s.validate();
    return s;
}

double CaseStudyResult::mean_time_avg_min_voi(PolicyKind kind) const {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        if (kinds[k] != kind) continue;
        std::vector<double> vals;
        vals.reserve(stats[k].size());
        for (const auto& s : stats[k]) vals.push_back(s.time_avg_min_voi);
        return mean(vals);
    }
    throw contract_error("case study: policy not present");
}

double CaseStudyResult::mean_time_avg_mean_voi(PolicyKind kind) const {
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        if (kinds[k] != kind) continue;
        std::vector<double> vals;
        vals.reserve(stats[k].size());
        for (const auto& s : stats[k]) vals.push_back(s.time_avg_mean_voi);
        return mean(vals);
    }
    throw contract_error("case study: policy not present");
}

CaseStudyResult run_case_study(const Scenario& scenario, const CaseStudyOptions& options) {
    scenario.validate();
    if (options.seeds < 1) {
        throw contract_error("case study: at least one seed required");
    }

    CaseStudyResult result;
    result.scenario = scenario;
    result.kinds = {PolicyKind::VoiOptimal, PolicyKind::AoiOptimal, PolicyKind::ShortestPath};
    const std::size_t seeds = static_cast<std::size_t>(options.seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
        result.seeds.push_back(derive_seed(options.base_seed, s));
    }
    result.traces.assign(result.kinds.size(), std::vector<EpisodeTrace>(seeds));
    result.stats.assign(result.kinds.size(), std::vector<RunStats>(seeds));

    // The tour policy has no training randomness: one rollout serves for
    // every seed row.
    const Policy tour = shortest_path_policy(scenario);
    const double gamma = LearnerConfig{}.discount;
    const RewardOptions eval_reward{LearnerConfig{}.penalty, options.scale};
    const EpisodeTrace tour_trace = rollout(scenario, tour, scenario.horizon, eval_reward);

    std::vector<std::function<void()>> tasks;
    for (std::size_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = result.seeds[s];
        tasks.push_back([&, s, seed] {
            const LearnerConfig config = desk_config(options.episodes, seed);
            result.traces[0][s] =
                train_and_rollout(scenario, config, env_reward, options.scale);
            result.stats[0][s] =
                stats_from(result.traces[0][s], PolicyKind::VoiOptimal, seed, config.discount);
        });
        tasks.push_back([&, s, seed] {
            const LearnerConfig config = desk_config(options.episodes, seed);
            result.traces[1][s] = train_and_rollout(scenario, config,
                                                    make_aoi_reward(config.penalty), options.scale);
            result.stats[1][s] =
                stats_from(result.traces[1][s], PolicyKind::AoiOptimal, seed, config.discount);
        });
        result.traces[2][s] = tour_trace;
        result.stats[2][s] = stats_from(tour_trace, PolicyKind::ShortestPath, seed, gamma);
    }
    run_tasks(tasks, options.threads);
    return result;
}

const char* to_string(SweepParameter parameter) {
    switch (parameter) {
    case SweepParameter::TxPower: return "tx_power";
    case SweepParameter::RhoHalfwidth: return "rho_halfwidth";
    case SweepParameter::NodeCount: return "node_count";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
    if (name == "tx_power") return SweepParameter::TxPower;
    if (name == "rho_halfwidth") return SweepParameter::RhoHalfwidth;
    if (name == "node_count") return SweepParameter::NodeCount;
    throw error("unknown sweep parameter: " + name +
                " (expected tx_power, rho_halfwidth, or node_count)");
}

void SweepSpec::validate() const {
    if (values.empty()) {
        throw invariant_error("sweep.values", "at least one value required");
    }
    if (policies.empty()) {
        throw invariant_error("sweep.policies", "at least one policy required");
    }
    for (PolicyKind kind : policies) {
        if (kind == PolicyKind::Oracle) {
            throw invariant_error("sweep.policies", "the oracle is not a sweep policy");
        }
    }
    if (instances < 1) {
        throw invariant_error("sweep.instances", "must be at least 1");
    }
    if (node_count < 1) {
        throw invariant_error("sweep.node_count", "must be at least 1");
    }
    if (grid_extent < 1) {
        throw invariant_error("sweep.grid_extent", "must be at least 1");
    }
    if (horizon < 1) {
        throw invariant_error("sweep.horizon", "must be at least 1");
    }
    if (!(tx_power > 0.0)) {
        throw invariant_error("sweep.tx_power", "must be strictly positive");
    }
    if (episodes < 0) {
        throw invariant_error("sweep.episodes", "must be non-negative");
    }
    for (double v : values) {
        switch (parameter) {
        case SweepParameter::TxPower:
            if (!(v > 0.0)) {
                throw invariant_error("sweep.values", "transmit power must be positive");
            }
            break;
        case SweepParameter::RhoHalfwidth:
            if (!(v >= 0.0)) {
                throw invariant_error("sweep.values", "halfwidth must be non-negative");
            }
            break;
        case SweepParameter::NodeCount:
            if (!(v >= 1.0) || v != std::floor(v)) {
                throw invariant_error("sweep.values", "node count must be a positive integer");
            }
            break;
        }
    }
}

const SweepCell& SweepResult::cell(double value, PolicyKind kind) const {
    for (const auto& c : cells) {
        if (c.value == value && c.kind == kind) return c;
    }
    throw contract_error("sweep result: no such cell");
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();

    SweepResult result;
    result.spec = spec;

    const std::size_t values = spec.values.size();
    const std::size_t policies = spec.policies.size();
    const std::size_t instances = static_cast<std::size_t>(spec.instances);

    // cells laid out values-major, policies minor; the per-instance slots
    // inside each cell are preallocated so worker tasks never share writes.
    result.cells.assign(values * policies, SweepCell{});
    for (std::size_t vi = 0; vi < values; ++vi) {
        for (std::size_t k = 0; k < policies; ++k) {
            auto& cell = result.cells[vi * policies + k];
            cell.value = spec.values[vi];
            cell.kind = spec.policies[k];
            cell.per_instance.assign(instances, RunStats{});
        }
    }

    std::vector<std::function<void()>> tasks;
    for (std::size_t vi = 0; vi < values; ++vi) {
        const double value = spec.values[vi];
        for (std::size_t i = 0; i < instances; ++i) {
            // Instance i keeps its seed across sweep values, so curves are
            // paired: only the swept parameter changes between points.
            const std::uint64_t layout_seed = derive_seed(spec.base_seed, i);
            for (std::size_t k = 0; k < policies; ++k) {
                const PolicyKind kind = spec.policies[k];
                auto* slot = &result.cells[vi * policies + k].per_instance[i];
                tasks.push_back([&spec, value, layout_seed, kind, slot, k] {
                    try {
                        int n = spec.node_count;
                        double halfwidth = spec.rho_halfwidth;
                        if (spec.parameter == SweepParameter::NodeCount) {
                            n = static_cast<int>(value);
                        } else if (spec.parameter == SweepParameter::RhoHalfwidth) {
                            halfwidth = value;
                        }
                        Scenario scenario = generate_random(n, spec.grid_extent, spec.rho_center,
                                                            halfwidth, layout_seed);
                        scenario.horizon = spec.horizon;
                        const double power =
                            spec.parameter == SweepParameter::TxPower ? value : spec.tx_power;
                        scenario.radio.tx_power_watts.assign(static_cast<std::size_t>(n), power);

                        const std::uint64_t train_seed = derive_seed(layout_seed, 0x100 + k);
                        const LearnerConfig config = desk_config(spec.episodes, train_seed);
                        EpisodeTrace trace;
                        if (kind == PolicyKind::ShortestPath) {
                            const Policy tour = shortest_path_policy(scenario);
                            trace = rollout(scenario, tour, scenario.horizon,
                                            {config.penalty, spec.scale});
                        } else {
                            const RewardFn reward_fn = kind == PolicyKind::AoiOptimal
                                                           ? make_aoi_reward(config.penalty)
                                                           : RewardFn(env_reward);
                            trace = train_and_rollout(scenario, config, reward_fn, spec.scale);
                        }
                        *slot = stats_from(trace, kind, layout_seed, config.discount);
                    } catch (const std::exception& e) {
                        throw error("sweep instance failed (layout seed " +
                                    format_int(static_cast<std::int64_t>(layout_seed)) +
                                    "): " + e.what());
                    }
                });
            }
        }
    }
    run_tasks(tasks, spec.threads);

    for (auto& cell : result.cells) {
        std::vector<double> mins;
        std::vector<double> means;
        mins.reserve(cell.per_instance.size());
        means.reserve(cell.per_instance.size());
        for (const auto& s : cell.per_instance) {
            mins.push_back(s.time_avg_min_voi);
            means.push_back(s.time_avg_mean_voi);
        }
        cell.mean_min_voi = mean(mins);
        cell.stderr_min_voi = sample_stderr(mins);
        cell.mean_mean_voi = mean(means);
    }
    return result;
}

std::string save(const SweepSpec& spec) {
    nlohmann::ordered_json policies = nlohmann::ordered_json::array();
    for (PolicyKind kind : spec.policies) policies.push_back(to_string(kind));
    nlohmann::ordered_json doc{{"parameter", to_string(spec.parameter)},
                               {"values", spec.values},
                               {"policies", std::move(policies)},
                               {"node_count", spec.node_count},
                               {"grid_extent", spec.grid_extent},
                               {"horizon", spec.horizon},
                               {"tx_power", spec.tx_power},
                               {"rho_center", spec.rho_center},
                               {"rho_halfwidth", spec.rho_halfwidth},
                               {"instances", spec.instances},
                               {"episodes", spec.episodes},
                               {"base_seed", spec.base_seed},
                               {"reward_scale", to_string(spec.scale)},
                               {"threads", spec.threads}};
    return doc.dump(2) + "\n";
}

SweepSpec load_sweep_spec(const std::string& document) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error("/", e.what());
    }
    if (!doc.is_object()) {
        throw schema_error("/", "expected an object");
    }

    SweepSpec spec;
    try {
        spec.parameter = sweep_parameter_from_string(doc.at("parameter").get<std::string>());
        spec.values = doc.at("values").get<std::vector<double>>();
        if (doc.contains("policies")) {
            spec.policies.clear();
            for (const auto& name : doc.at("policies")) {
                spec.policies.push_back(policy_kind_from_string(name.get<std::string>()));
            }
        }
        if (doc.contains("node_count")) spec.node_count = doc.at("node_count").get<int>();
        if (doc.contains("grid_extent")) spec.grid_extent = doc.at("grid_extent").get<int>();
        if (doc.contains("horizon")) spec.horizon = doc.at("horizon").get<int>();
        if (doc.contains("tx_power")) spec.tx_power = doc.at("tx_power").get<double>();
        if (doc.contains("rho_center")) spec.rho_center = doc.at("rho_center").get<double>();
        if (doc.contains("rho_halfwidth")) spec.rho_halfwidth = doc.at("rho_halfwidth").get<double>();
        if (doc.contains("instances")) spec.instances = doc.at("instances").get<int>();
        if (doc.contains("episodes")) spec.episodes = doc.at("episodes").get<long>();
        if (doc.contains("base_seed")) spec.base_seed = doc.at("base_seed").get<std::uint64_t>();
        if (doc.contains("reward_scale")) {
            spec.scale = reward_scale_from_string(doc.at("reward_scale").get<std::string>());
        }
        if (doc.contains("threads")) spec.threads = doc.at("threads").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("/", e.what());
    }
    spec.validate();
    return spec;
}

SweepSpec load_sweep_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw error("cannot open: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_sweep_spec(buffer.str());
}

std::string case_study_csv(const CaseStudyResult& result) {
    std::ostringstream out;
    out << "policy,seed,time_avg_min_voi,time_avg_mean_voi,final_min_voi,discounted_return\n";
    for (std::size_t k = 0; k < result.kinds.size(); ++k) {
        for (const auto& s : result.stats[k]) {
            out << to_string(result.kinds[k]) << ',' << s.seed << ','
                << format_double(s.time_avg_min_voi) << ',' << format_double(s.time_avg_mean_voi)
                << ',' << format_double(s.final_min_voi) << ','
                << format_double(s.discounted_return) << '\n';
        }
    }
    return out.str();
}

std::string case_study_series_csv(const CaseStudyResult& result) {
    std::ostringstream out;
    out << "t";
    for (PolicyKind kind : result.kinds) out << ',' << to_string(kind);
    out << '\n';
    const std::size_t horizon =
        result.traces.empty() || result.traces[0].empty() ? 0 : result.traces[0][0].slots.size();
    for (std::size_t t = 0; t < horizon; ++t) {
        out << (t + 1);
        for (std::size_t k = 0; k < result.kinds.size(); ++k) {
            // Fig.-4-style series: per-slot mean VoI, averaged across seeds.
            double acc = 0.0;
            for (const auto& trace : result.traces[k]) acc += trace.mean_voi_series[t];
            out << ',' << format_double(acc / static_cast<double>(result.traces[k].size()));
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "parameter,value,policy,instances,mean_min_voi,stderr_min_voi,mean_mean_voi\n";
    for (const auto& cell : result.cells) {
        out << to_string(result.spec.parameter) << ',' << format_double(cell.value) << ','
            << to_string(cell.kind) << ',' << cell.per_instance.size() << ','
            << format_double(cell.mean_min_voi) << ',' << format_double(cell.stderr_min_voi)
            << ',' << format_double(cell.mean_mean_voi) << '\n';
    }
    return out.str();
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double sample_stderr(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    const double variance = acc / static_cast<double>(xs.size() - 1);
    return std::sqrt(variance / static_cast<double>(xs.size()));
}

namespace {

std::vector<double> ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw contract_error("spearman: need two same-length series of at least 2 points");
    }
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    const double mx = mean(rx);
    const double my = mean(ry);
    double cov = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) {
        throw contract_error("spearman: a series is constant");
    }
    return cov / std::sqrt(vx * vy);
}

} // namespace voiplan
