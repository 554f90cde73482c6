#pragma once

#include <functional>
#include <string>
#include <vector>

#include "voiplan/env.hpp"
#include "voiplan/learner.hpp"
#include "voiplan/scenario.hpp"

namespace voiplan {

enum class PolicyKind {
    VoiOptimal,   // Q-learning on the VoI reward
    AoiOptimal,   // Q-learning on the age reward below
    ShortestPath, // fixed cyclic tour, no learning
    Oracle        // exhaustive search, tiny instances only
};

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

// Age-based training signal: negative worst age after the slot, minus the
// same no-delivery penalty the VoI reward uses. Swapping this in reproduces
// the freshness-only planner the VoI objective is compared against.
double aoi_reward(const StepOutcome& outcome, double penalty);
RewardFn make_aoi_reward(double penalty);

// Deterministic tour baseline: visit every node in the cheapest fixed order
// (exact over all permutations up to 10 nodes; beyond that, pass
// greedy_fallback to order nodes nearest-first instead), walking x-then-y to
// the nearest lattice point in range of each target and transmitting on the
// first slot the target is in range. The tour repeats for as long as the
// episode runs. The returned policy is a pure function of (state, slot).
Policy shortest_path_policy(const Scenario& scenario, bool greedy_fallback = false);

// The planned visiting order, one service waypoint per node.
struct TourStop {
    GridPoint waypoint;
    int node = 0;
};
std::vector<TourStop> shortest_path_tour(const Scenario& scenario, bool greedy_fallback = false);

struct OracleResult {
    std::vector<Action> actions; // optimal open-loop plan, lexicographically least
    double discounted_return = 0.0;
    long sequences_seen = 0; // completed action sequences
};

// Exhaustive depth-first search over all action sequences up to the horizon.
// The dynamics are deterministic, so the best open-loop plan is the best
// policy. Ties resolve to the lexicographically least plan in canonical
// action order. Throws if the worst-case sequence count exceeds the guard.
OracleResult exhaustive_oracle(const Scenario& scenario, int horizon, double gamma,
                               const RewardFn& reward_fn = env_reward,
                               const RewardOptions& reward = {},
                               long max_sequences = 100000000L);

// Replays a fixed plan as a policy (slot index -> plan action). Throws when
// asked for a slot past the end of the plan.
Policy plan_policy(std::vector<Action> plan);

} // namespace voiplan
