#include "voiplan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "voiplan/errors.hpp"

namespace voiplan {

namespace {

constexpr int kExactTourLimit = 10;

int manhattan(GridPoint a, GridPoint b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

// Nearest lattice point to `from` (Manhattan metric) that lies within the
// success distance of the node; ties break on smaller (x, y). Such a point
// always exists: the node's own cell qualifies.
GridPoint service_point(const Scenario& scenario, int node, GridPoint from) {
    const GridPoint center = scenario.nodes[static_cast<std::size_t>(node)].position;
    const int reach = static_cast<int>(std::floor(scenario.radio.success_distance));
    const std::int64_t reach_sq =
        static_cast<std::int64_t>(scenario.radio.success_distance * scenario.radio.success_distance);
    GridPoint best = center;
    int best_cost = manhattan(from, center);
    for (int dx = -reach; dx <= reach; ++dx) {
        for (int dy = -reach; dy <= reach; ++dy) {
            const GridPoint p{center.x + dx, center.y + dy};
            if (!scenario.contains(p)) continue;
            if (distance_sq(p, center) > reach_sq) continue;
            const int cost = manhattan(from, p);
            if (cost < best_cost ||
                (cost == best_cost && std::tie(p.x, p.y) < std::tie(best.x, best.y))) {
                best = p;
                best_cost = cost;
            }
        }
    }
    return best;
}

long tour_cost(const Scenario& scenario, const std::vector<int>& order) {
    long cost = 0;
    GridPoint at = scenario.entity_start;
    for (int node : order) {
        const GridPoint w = service_point(scenario, node, at);
        cost += manhattan(at, w);
        at = w;
    }
    return cost;
}

std::vector<int> exact_order(const Scenario& scenario) {
    std::vector<int> order(static_cast<std::size_t>(scenario.node_count()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> best = order;
    long best_cost = tour_cost(scenario, order);
    // Lexicographic permutation scan with strict improvement keeps the
    // index-order tie-break for free.
    while (std::next_permutation(order.begin(), order.end())) {
        const long cost = tour_cost(scenario, order);
        if (cost < best_cost) {
            best = order;
            best_cost = cost;
        }
    }
    return best;
}

std::vector<int> greedy_order(const Scenario& scenario) {
    const int n = scenario.node_count();
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    GridPoint at = scenario.entity_start;
    for (int k = 0; k < n; ++k) {
        int pick = -1;
        int pick_cost = 0;
        for (int j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const int cost = manhattan(at, service_point(scenario, j, at));
            if (pick < 0 || cost < pick_cost) { // ties keep the lower node index
                pick = j;
                pick_cost = cost;
            }
        }
        used[static_cast<std::size_t>(pick)] = true;
        order.push_back(pick);
        at = service_point(scenario, pick, at);
    }
    return order;
}

// One move toward the waypoint, x leg first.
Direction step_toward(GridPoint from, GridPoint to) {
    if (from.x < to.x) return Direction::East;
    if (from.x > to.x) return Direction::West;
    if (from.y < to.y) return Direction::North;
    if (from.y > to.y) return Direction::South;
    return Direction::Stay;
}

struct TourWalk {
    std::vector<Action> prefix; // slots before the cycle closes
    std::size_t cycle_start = 0;

    Action at(std::size_t t) const {
        if (t < prefix.size()) return prefix[t];
        const std::size_t period = prefix.size() - cycle_start;
        return prefix[cycle_start + (t - cycle_start) % period];
    }
};

// Unrolls the tour into per-slot actions until the walk state repeats, which
// it must: (position, tour index, waypoint) has finitely many values.
TourWalk unroll(const Scenario& scenario, const std::vector<int>& order) {
    const RadioLinear radio = linear(scenario.radio);
    TourWalk walk;
    std::map<std::tuple<int, int, std::size_t, int, int>, std::size_t> seen;

    GridPoint pos = scenario.entity_start;
    std::size_t target = 0;
    GridPoint waypoint = service_point(scenario, order[0], pos);
    for (;;) {
        const auto state_key =
            std::make_tuple(pos.x, pos.y, target, waypoint.x, waypoint.y);
        auto [it, fresh] = seen.emplace(state_key, walk.prefix.size());
        if (!fresh) {
            walk.cycle_start = it->second;
            return walk;
        }

        const int node = order[target];
        Action a;
        if (success(radio, distance(scenario.nodes[static_cast<std::size_t>(node)].position, pos),
                    true)) {
            // In range now: transmit this slot and start walking to the next
            // target from the current position.
            a.schedule = node;
            target = (target + 1) % order.size();
            waypoint = service_point(scenario, order[target], pos);
        }
        a.direction = step_toward(pos, waypoint);
        switch (a.direction) {
        case Direction::North: pos.y += scenario.step_length; break;
        case Direction::South: pos.y -= scenario.step_length; break;
        case Direction::East: pos.x += scenario.step_length; break;
        case Direction::West: pos.x -= scenario.step_length; break;
        case Direction::Stay: break;
        }
        walk.prefix.push_back(a);
    }
}

} // namespace

const char* to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::VoiOptimal: return "voi-optimal";
    case PolicyKind::AoiOptimal: return "aoi-optimal";
    case PolicyKind::ShortestPath: return "shortest-path";
    case PolicyKind::Oracle: return "oracle";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "voi-optimal") return PolicyKind::VoiOptimal;
    if (name == "aoi-optimal") return PolicyKind::AoiOptimal;
    if (name == "shortest-path") return PolicyKind::ShortestPath;
    if (name == "oracle") return PolicyKind::Oracle;
    throw error("unknown policy: " + name +
                " (expected voi-optimal, aoi-optimal, shortest-path, or oracle)");
}

double aoi_reward(const StepOutcome& outcome, double penalty) {
    int worst = 0;
    for (const auto& f : outcome.next_state.freshness) worst = std::max(worst, f.aoi);
    return -static_cast<double>(worst) - (outcome.success ? 0.0 : penalty);
}

RewardFn make_aoi_reward(double penalty) {
    return [penalty](const StepOutcome& outcome) { return aoi_reward(outcome, penalty); };
}

std::vector<TourStop> shortest_path_tour(const Scenario& scenario, bool greedy_fallback) {
    scenario.validate();
    if (scenario.node_count() > kExactTourLimit && !greedy_fallback) {
        throw contract_error(
            "shortest-path tour: exact permutation search is limited to 10 nodes; "
            "enable the greedy-nearest fallback for larger networks");
    }
    const std::vector<int> order = scenario.node_count() > kExactTourLimit
                                       ? greedy_order(scenario)
                                       : exact_order(scenario);
    std::vector<TourStop> stops;
    stops.reserve(order.size());
    GridPoint at = scenario.entity_start;
    for (int node : order) {
        const GridPoint w = service_point(scenario, node, at);
        stops.push_back({w, node});
        at = w;
    }
    return stops;
}

Policy shortest_path_policy(const Scenario& scenario, bool greedy_fallback) {
    scenario.validate();
    if (scenario.node_count() > kExactTourLimit && !greedy_fallback) {
        throw contract_error(
            "shortest-path tour: exact permutation search is limited to 10 nodes; "
            "enable the greedy-nearest fallback for larger networks");
    }
    const std::vector<int> order = scenario.node_count() > kExactTourLimit
                                       ? greedy_order(scenario)
                                       : exact_order(scenario);
    const TourWalk walk = unroll(scenario, order);
    return [walk](const State&, int t) { return walk.at(static_cast<std::size_t>(t)); };
}

OracleResult exhaustive_oracle(const Scenario& scenario, int horizon, double gamma,
                               const RewardFn& reward_fn, const RewardOptions& reward,
                               long max_sequences) {
    scenario.validate();
    if (horizon < 0) {
        throw contract_error("exhaustive oracle: negative horizon");
    }
    // Worst-case count of open-loop sequences; overflow-safe.
    double worst = 1.0;
    for (int t = 0; t < horizon; ++t) worst *= static_cast<double>(action_space_size(scenario.node_count()));
    if (worst > static_cast<double>(max_sequences)) {
        throw contract_error("exhaustive oracle: action tree exceeds the sequence guard");
    }

    OracleResult result;
    if (horizon == 0) {
        return result;
    }
    result.discounted_return = -std::numeric_limits<double>::infinity();

    const RewardOptions& reward_options = reward;
    std::vector<Action> plan(static_cast<std::size_t>(horizon));
    std::vector<std::vector<Action>> feasible(static_cast<std::size_t>(horizon));

    // Iterative DFS in canonical action order: the first plan reaching the
    // best return is the lexicographically least one.
    struct Frame {
        State state;
        std::size_t next = 0; // next action to try at this depth
        double value = 0.0;   // discounted return accumulated above this depth
    };
    std::vector<Frame> stack;
    stack.reserve(static_cast<std::size_t>(horizon) + 1);
    stack.push_back({initial_state(scenario), 0, 0.0});
    feasible_actions(scenario, stack.back().state, feasible[0]);

    std::vector<double> discount(static_cast<std::size_t>(horizon), 1.0);
    for (int t = 1; t < horizon; ++t) discount[static_cast<std::size_t>(t)] = discount[static_cast<std::size_t>(t - 1)] * gamma;

    while (!stack.empty()) {
        const std::size_t depth = stack.size() - 1;
        Frame& frame = stack.back();
        auto& options = feasible[depth];
        if (frame.next >= options.size()) {
            stack.pop_back();
            continue;
        }
        const Action a = options[frame.next++];
        StepOutcome outcome = step(scenario, frame.state, a, reward_options);
        const double value = frame.value + discount[depth] * reward_fn(outcome);
        plan[depth] = a;
        if (depth + 1 == static_cast<std::size_t>(horizon)) {
            ++result.sequences_seen;
            if (value > result.discounted_return) {
                result.discounted_return = value;
                result.actions = plan;
            }
        } else {
            stack.push_back({std::move(outcome.next_state), 0, value});
            feasible_actions(scenario, stack.back().state, feasible[depth + 1]);
        }
    }
    return result;
}

Policy plan_policy(std::vector<Action> plan) {
    return [plan = std::move(plan)](const State&, int t) {
        if (t < 0 || static_cast<std::size_t>(t) >= plan.size()) {
            throw contract_error("plan policy: slot index past the end of the plan");
        }
        return plan[static_cast<std::size_t>(t)];
    };
}

} // namespace voiplan
