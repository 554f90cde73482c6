#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "voiplan/env.hpp"
#include "voiplan/scenario.hpp"

namespace voiplan {

// 128-bit packed state key. Positions, ages, and squared effective
// distances are all small integers, so the whole state bit-packs exactly.
struct StateKey {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;
    bool operator==(const StateKey&) const = default;
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const {
        std::uint64_t z = k.lo + 0x9e3779b97f4a7c15ull * (k.hi + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return static_cast<std::size_t>(z ^ (z >> 31));
    }
};

// Packs states for one scenario/horizon into StateKeys. Field widths are
// sized from the scenario bounds; encode returns nullopt for states outside
// them (e.g. ages beyond the covered horizon), which callers treat as
// never-seen.
class StateCodec {
public:
    StateCodec(const Scenario& scenario, int horizon);

    std::optional<StateKey> encode(const State& state) const;
    int total_bits() const { return total_bits_; }

private:
    int pos_bits_ = 0;
    int aoi_bits_ = 0;
    int dist_bits_ = 0;
    int node_count_ = 0;
    int total_bits_ = 0;
    int max_aoi_ = 0;
    std::int64_t max_dist_sq_ = 0;
};

struct TrainingReport {
    long episodes_run = 0;
    std::vector<double> episode_returns; // discounted, under the trained reward
    double final_epsilon = 0.0;
    std::size_t q_entries = 0;
};

// Sparse state-action value table. Rows are created on first write; reads of
// absent entries return default_value without inserting. One row holds the
// full direction x schedule grid for its state.
class QTable {
public:
    QTable(const Scenario& scenario, int horizon, double default_value = 0.0);

    double default_value() const { return default_value_; }
    int row_size() const { return row_size_; }
    std::size_t state_count() const { return rows_.size(); }
    std::size_t entry_count() const { return rows_.size() * static_cast<std::size_t>(row_size_); }

    double lookup(const State& state, const Action& action) const;
    double max_over(const State& state, std::span<const Action> feasible) const;

    // Q(s,a) <- (1-beta) Q(s,a) + beta r + beta gamma max_{a' feasible} Q(s',a').
    // Returns the updated entry.
    double update(const State& s, const Action& a, double reward, const State& next_state,
                  std::span<const Action> next_feasible, double beta, double gamma);

    // Greedy action: highest value over the feasible set, ties to the lowest
    // action index.
    Action greedy(const State& state, std::span<const Action> feasible) const;

    // Sorted (key, action index, value) snapshot; stable across runs.
    std::vector<std::tuple<StateKey, int, double>> entries() const;

    const StateCodec& codec() const { return codec_; }
    int node_count() const { return node_count_; }

    friend void save_qtable(const QTable&, const Scenario&, const LearnerConfig&, const std::string&);
    friend QTable load_qtable(const std::string&, const Scenario&);

private:
    std::vector<double>& row(const StateKey& key);
    const std::vector<double>* find_row(const State& state) const;

    StateCodec codec_;
    int node_count_;
    int row_size_;
    double default_value_;
    std::unordered_map<StateKey, std::vector<double>, StateKeyHash> rows_;
};

// Epsilon-greedy selection: explore uniformly with probability epsilon,
// otherwise exploit the table. Deterministic given the rng state.
Action select_action(const QTable& q, const State& state, std::span<const Action> feasible,
                     double epsilon, std::mt19937_64& rng);

using RewardFn = std::function<double(const StepOutcome&)>;

// Reward actually fed to the learner: the outcome's own (VoI-based) reward.
double env_reward(const StepOutcome& outcome);

// Tabular Q-learning: config.episodes rounds of config-horizon episodes from
// the scenario's initial state, epsilon decremented per round and clamped at
// zero. reward_fn swaps the training objective; rollouts and reported VoI
// are unaffected by it.
std::pair<QTable, TrainingReport> train(const Scenario& scenario, const LearnerConfig& config,
                                        const RewardFn& reward_fn = env_reward,
                                        RewardScale scale = RewardScale::Spectral);

// Greedy lookup policy over the finished table. States the table never saw
// fall through to the tie-break (first feasible action). The table must
// outlive the policy.
Policy greedy_policy(const QTable& q, const Scenario& scenario);

// Binary Q-table file with an embedded header recording the scenario
// fingerprint and config; loading against a different scenario throws.
void save_qtable(const QTable& q, const Scenario& scenario, const LearnerConfig& config,
                 const std::string& path);
QTable load_qtable(const std::string& path, const Scenario& scenario);

} // namespace voiplan
