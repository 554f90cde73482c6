#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "voiplan/channel.hpp"
#include "voiplan/scenario.hpp"

namespace voiplan {

enum class Direction : std::uint8_t { North = 0, South = 1, East = 2, West = 3, Stay = 4 };

const char* to_string(Direction d);

// Movement plus at most one scheduled node per slot. schedule is a 0-based
// node index; nullopt schedules nobody.
struct Action {
    Direction direction = Direction::Stay;
    std::optional<int> schedule;

    bool operator==(const Action&) const = default;
};

// Fixed total order used everywhere a tie must break deterministically:
// directions North..West before Stay, node schedules before None.
inline int action_index(const Action& a, int node_count) {
    const int sched = a.schedule ? *a.schedule : node_count;
    return static_cast<int>(a.direction) * (node_count + 1) + sched;
}

inline Action action_from_index(int index, int node_count) {
    const int per_dir = node_count + 1;
    Action a;
    a.direction = static_cast<Direction>(index / per_dir);
    const int sched = index % per_dir;
    if (sched < node_count) a.schedule = sched;
    return a;
}

constexpr int kDirectionCount = 5;

inline int action_space_size(int node_count) { return kDirectionCount * (node_count + 1); }

// Full MDP state: collector position plus each node's freshness.
struct State {
    GridPoint entity_pos;
    std::vector<FreshnessState> freshness;

    bool operator==(const State&) const = default;
};

enum class RewardScale {
    Spectral, // min VoI divided by bandwidth; keeps the penalty term dominant
    Raw,      // min VoI in bits/s as written
};

struct RewardOptions {
    double penalty = 100.0;
    RewardScale scale = RewardScale::Spectral;
};

RewardScale reward_scale_from_string(const std::string& name);
const char* to_string(RewardScale scale);

struct StepOutcome {
    State next_state;
    double reward = 0.0;              // min VoI under the chosen scale, minus penalty on empty slots
    std::vector<double> per_node_voi; // raw bits/s, after this slot's freshness update
    std::optional<int> served;        // node scheduled this slot, if any
    bool success = false;             // whether that transmission got through
};

// Entity at its start, ages at their configured initial values, effective
// distances anchored at the start position.
State initial_state(const Scenario& scenario);

// Every (direction, schedule) pair whose move stays on the lattice, in the
// fixed action order. Stay is always legal.
std::vector<Action> feasible_actions(const Scenario& scenario, const State& state);
void feasible_actions(const Scenario& scenario, const State& state, std::vector<Action>& out);

// One slot: the scheduled transmission (if any) is evaluated at the current
// position, freshness updates, the entity moves, and the reward is taken on
// the updated freshness. Deterministic. Throws contract_error on an
// infeasible action.
StepOutcome step(const Scenario& scenario, const State& state, const Action& action,
                 const RewardOptions& reward = {});

// A policy maps (state, slot index) to an action. Stationary policies ignore
// the slot; precomputed tours index into their plan with it.
using Policy = std::function<Action(const State&, int)>;

struct SlotRecord {
    State state; // state the slot started in
    Action action;
    StepOutcome outcome;
};

struct EpisodeTrace {
    State initial;
    std::vector<SlotRecord> slots;
    std::vector<double> min_voi_series;  // per-slot min over nodes, bits/s
    std::vector<double> mean_voi_series; // per-slot mean over nodes, bits/s
    double time_avg_min_voi = 0.0;
    double time_avg_mean_voi = 0.0;

    double discounted_return(double gamma) const;
};

EpisodeTrace rollout(const Scenario& scenario, const Policy& policy, int horizon,
                     const RewardOptions& reward = {});

// CSV export: t, x, y, direction, scheduled_node (1-based, 0 = none),
// success, aoi_1..aoi_N, q_sq_1..q_sq_N, voi_1..voi_N, reward.
void write_trace_csv(const EpisodeTrace& trace, const Scenario& scenario, std::ostream& out);
std::string trace_csv(const EpisodeTrace& trace, const Scenario& scenario);

} // namespace voiplan
