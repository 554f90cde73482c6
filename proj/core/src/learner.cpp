#include "voiplan/learner.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "voiplan/errors.hpp"

namespace voiplan {

namespace {

int bits_for(std::uint64_t max_value) {
    return max_value == 0 ? 1 : std::bit_width(max_value);
}

void push_bits(StateKey& key, int& used, std::uint64_t value, int bits) {
    if (used < 64) {
        key.lo |= value << used;
        if (used + bits > 64) {
            key.hi |= value >> (64 - used);
        }
    } else {
        key.hi |= value << (used - 64);
    }
    used += bits;
}

} // namespace

StateCodec::StateCodec(const Scenario& scenario, int horizon) {
    node_count_ = scenario.node_count();
    int max_initial_aoi = 1;
    for (const auto& node : scenario.nodes) {
        max_initial_aoi = std::max(max_initial_aoi, node.initial_aoi);
    }
    // Within one episode the age cannot exceed its start value plus the
    // horizon, and squared distances are bounded by the grid diagonal.
    max_aoi_ = max_initial_aoi + std::max(horizon, 0);
    max_dist_sq_ = 2ll * scenario.grid_extent * scenario.grid_extent;
    pos_bits_ = bits_for(static_cast<std::uint64_t>(scenario.grid_extent));
    aoi_bits_ = bits_for(static_cast<std::uint64_t>(max_aoi_));
    dist_bits_ = bits_for(static_cast<std::uint64_t>(max_dist_sq_));
    total_bits_ = 2 * pos_bits_ + node_count_ * (aoi_bits_ + dist_bits_);
    if (total_bits_ > 128) {
        throw contract_error("state key exceeds 128 bits for this scenario/horizon");
    }
}

std::optional<StateKey> StateCodec::encode(const State& state) const {
    if (static_cast<int>(state.freshness.size()) != node_count_) {
        throw contract_error("encode: state does not match the scenario's node count");
    }
    StateKey key;
    int used = 0;
    const std::uint64_t max_pos = (1ull << pos_bits_) - 1;
    if (state.entity_pos.x < 0 || state.entity_pos.y < 0 ||
        static_cast<std::uint64_t>(state.entity_pos.x) > max_pos ||
        static_cast<std::uint64_t>(state.entity_pos.y) > max_pos) {
        return std::nullopt;
    }
    push_bits(key, used, static_cast<std::uint64_t>(state.entity_pos.x), pos_bits_);
    push_bits(key, used, static_cast<std::uint64_t>(state.entity_pos.y), pos_bits_);
    for (const auto& f : state.freshness) {
        if (f.aoi < 1 || f.aoi > max_aoi_ || f.eff_dist_sq < 0 || f.eff_dist_sq > max_dist_sq_) {
            return std::nullopt;
        }
        push_bits(key, used, static_cast<std::uint64_t>(f.aoi), aoi_bits_);
        push_bits(key, used, static_cast<std::uint64_t>(f.eff_dist_sq), dist_bits_);
    }
    return key;
}

QTable::QTable(const Scenario& scenario, int horizon, double default_value)
    : codec_(scenario, horizon),
      node_count_(scenario.node_count()),
      row_size_(action_space_size(scenario.node_count())),
      default_value_(default_value) {}

std::vector<double>& QTable::row(const StateKey& key) {
    auto it = rows_.find(key);
    if (it == rows_.end()) {
        it = rows_.emplace(key, std::vector<double>(static_cast<std::size_t>(row_size_),
                                                    default_value_))
                 .first;
    }
    return it->second;
}

const std::vector<double>* QTable::find_row(const State& state) const {
    auto key = codec_.encode(state);
    if (!key) return nullptr;
    auto it = rows_.find(*key);
    return it == rows_.end() ? nullptr : &it->second;
}

double QTable::lookup(const State& state, const Action& action) const {
    const auto* r = find_row(state);
    if (!r) return default_value_;
    return (*r)[static_cast<std::size_t>(action_index(action, node_count_))];
}

double QTable::max_over(const State& state, std::span<const Action> feasible) const {
    if (feasible.empty()) {
        throw contract_error("max_over: empty action set");
    }
    const auto* r = find_row(state);
    if (!r) return default_value_;
    double best = (*r)[static_cast<std::size_t>(action_index(feasible[0], node_count_))];
    for (std::size_t i = 1; i < feasible.size(); ++i) {
        best = std::max(best,
                        (*r)[static_cast<std::size_t>(action_index(feasible[i], node_count_))]);
    }
    return best;
}

double QTable::update(const State& s, const Action& a, double reward, const State& next_state,
                      std::span<const Action> next_feasible, double beta, double gamma) {
    auto key = codec_.encode(s);
    if (!key) {
        throw contract_error("update: state outside the key bounds");
    }
    const double next_max = max_over(next_state, next_feasible);
    auto& r = row(*key);
    auto& q = r[static_cast<std::size_t>(action_index(a, node_count_))];
    q = (1.0 - beta) * q + beta * reward + beta * gamma * next_max;
    return q;
}

Action QTable::greedy(const State& state, std::span<const Action> feasible) const {
    if (feasible.empty()) {
        throw contract_error("greedy: empty action set");
    }
    const auto* r = find_row(state);
    if (!r) return feasible[0];
    Action best = feasible[0];
    double best_value = (*r)[static_cast<std::size_t>(action_index(best, node_count_))];
    for (std::size_t i = 1; i < feasible.size(); ++i) {
        const double v =
            (*r)[static_cast<std::size_t>(action_index(feasible[i], node_count_))];
        if (v > best_value) { // strict: ties keep the lowest action index
            best_value = v;
            best = feasible[i];
        }
    }
    return best;
}

std::vector<std::tuple<StateKey, int, double>> QTable::entries() const {
    std::vector<std::tuple<StateKey, int, double>> out;
    out.reserve(entry_count());
    for (const auto& [key, row] : rows_) {
        for (int i = 0; i < row_size_; ++i) {
            out.emplace_back(key, i, row[static_cast<std::size_t>(i)]);
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        const auto& ka = std::get<0>(a);
        const auto& kb = std::get<0>(b);
        return std::tie(ka.hi, ka.lo, std::get<1>(a)) < std::tie(kb.hi, kb.lo, std::get<1>(b));
    });
    return out;
}

Action select_action(const QTable& q, const State& state, std::span<const Action> feasible,
                     double epsilon, std::mt19937_64& rng) {
    if (feasible.empty()) {
        throw contract_error("select_action: empty action set");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw contract_error("select_action: epsilon outside [0,1]");
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
        std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
        return feasible[pick(rng)];
    }
    return q.greedy(state, feasible);
}

double env_reward(const StepOutcome& outcome) { return outcome.reward; }

std::pair<QTable, TrainingReport> train(const Scenario& scenario, const LearnerConfig& config,
                                        const RewardFn& reward_fn, RewardScale scale) {
    scenario.validate();
    config.validate();

    QTable q(scenario, scenario.horizon);
    TrainingReport report;
    report.episode_returns.reserve(static_cast<std::size_t>(config.episodes));

    const RewardOptions reward_options{config.penalty, scale};
    std::mt19937_64 rng(config.rng_seed);
    double epsilon = config.epsilon_init;

    std::vector<Action> feasible;
    std::vector<Action> next_feasible;
    for (long episode = 0; episode < config.episodes; ++episode) {
        State state = initial_state(scenario);
        feasible_actions(scenario, state, feasible);
        double episode_return = 0.0;
        double weight = 1.0;
        for (int t = 0; t < scenario.horizon; ++t) {
            const Action a = select_action(q, state, feasible, epsilon, rng);
            StepOutcome outcome = step(scenario, state, a, reward_options);
            const double r = reward_fn(outcome);
            feasible_actions(scenario, outcome.next_state, next_feasible);
            q.update(state, a, r, outcome.next_state, next_feasible, config.learning_rate,
                     config.discount);
            episode_return += weight * r;
            weight *= config.discount;
            state = std::move(outcome.next_state);
            feasible.swap(next_feasible);
        }
        report.episode_returns.push_back(episode_return);
        epsilon = std::max(0.0, epsilon - config.epsilon_decrement);
    }

    report.episodes_run = config.episodes;
    report.final_epsilon = epsilon;
    report.q_entries = q.entry_count();
    return {std::move(q), std::move(report)};
}

Policy greedy_policy(const QTable& q, const Scenario& scenario) {
    return [&q, scenario](const State& state, int) {
        const auto feasible = feasible_actions(scenario, state);
        return q.greedy(state, feasible);
    };
}

namespace {

void write_raw(std::ofstream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void write_u64(std::ofstream& out, std::uint64_t v) { write_raw(out, &v, sizeof v); }

void read_raw(std::ifstream& in, void* data, std::size_t size, const std::string& path) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (in.gcount() != static_cast<std::streamsize>(size)) {
        throw error("truncated q-table file: " + path);
    }
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
    std::uint64_t v = 0;
    read_raw(in, &v, sizeof v, path);
    return v;
}

constexpr char kMagic[6] = {'V', 'O', 'I', 'Q', 'T', '\x01'};

} // namespace

void save_qtable(const QTable& q, const Scenario& scenario, const LearnerConfig& config,
                 const std::string& path) {
    nlohmann::ordered_json header{{"fingerprint", scenario_fingerprint(scenario)},
                                  {"horizon", scenario.horizon},
                                  {"row_size", q.row_size_},
                                  {"default_value", q.default_value_},
                                  {"states", q.rows_.size()},
                                  {"beta", config.learning_rate},
                                  {"gamma", config.discount},
                                  {"episodes", config.episodes},
                                  {"epsilon_init", config.epsilon_init},
                                  {"epsilon_decrement", config.epsilon_decrement},
                                  {"penalty", config.penalty},
                                  {"seed", config.rng_seed}};
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot open for writing: " + path);
    }
    write_raw(out, kMagic, sizeof kMagic);
    write_u64(out, header_text.size());
    write_raw(out, header_text.data(), header_text.size());

    // Rows sorted by key so the file bytes are a pure function of contents.
    std::vector<const std::pair<const StateKey, std::vector<double>>*> sorted;
    sorted.reserve(q.rows_.size());
    for (const auto& entry : q.rows_) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
        return std::tie(a->first.hi, a->first.lo) < std::tie(b->first.hi, b->first.lo);
    });
    for (const auto* entry : sorted) {
        write_u64(out, entry->first.hi);
        write_u64(out, entry->first.lo);
        write_raw(out, entry->second.data(), entry->second.size() * sizeof(double));
    }
    if (!out) {
        throw error("write failed: " + path);
    }
}

QTable load_qtable(const std::string& path, const Scenario& scenario) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw error("cannot open: " + path);
    }
    char magic[sizeof kMagic];
    read_raw(in, magic, sizeof magic, path);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw error("not a q-table file: " + path);
    }
    const std::uint64_t header_size = read_u64(in, path);
    std::string header_text(header_size, '\0');
    read_raw(in, header_text.data(), header_text.size(), path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw error("corrupt q-table header: " + path + ": " + e.what());
    }

    const auto fingerprint = header.at("fingerprint").get<std::uint64_t>();
    if (fingerprint != scenario_fingerprint(scenario)) {
        throw error("q-table was trained on a different scenario: " + path);
    }
    const int horizon = header.at("horizon").get<int>();
    const int row_size = header.at("row_size").get<int>();
    const auto states = header.at("states").get<std::uint64_t>();
    const double default_value = header.at("default_value").get<double>();

    QTable q(scenario, horizon, default_value);
    if (row_size != q.row_size_) {
        throw error("q-table row size does not match the scenario: " + path);
    }
    q.rows_.reserve(states);
    for (std::uint64_t i = 0; i < states; ++i) {
        StateKey key;
        key.hi = read_u64(in, path);
        key.lo = read_u64(in, path);
        std::vector<double> row(static_cast<std::size_t>(row_size));
        read_raw(in, row.data(), row.size() * sizeof(double), path);
        q.rows_.emplace(key, std::move(row));
    }
    return q;
}

} // namespace voiplan
