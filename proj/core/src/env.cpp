#include "voiplan/env.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "voiplan/errors.hpp"
#include "voiplan/text.hpp"

namespace voiplan {

namespace {

GridPoint moved(GridPoint p, Direction d, int step) {
    switch (d) {
    case Direction::North: return {p.x, p.y + step};
    case Direction::South: return {p.x, p.y - step};
    case Direction::East: return {p.x + step, p.y};
    case Direction::West: return {p.x - step, p.y};
    case Direction::Stay: return p;
    }
    return p;
}

} // namespace

const char* to_string(Direction d) {
    switch (d) {
    case Direction::North: return "north";
    case Direction::South: return "south";
    case Direction::East: return "east";
    case Direction::West: return "west";
    case Direction::Stay: return "stay";
    }
    return "?";
}

RewardScale reward_scale_from_string(const std::string& name) {
    if (name == "spectral") return RewardScale::Spectral;
    if (name == "raw") return RewardScale::Raw;
    throw error("unknown reward scale: " + name + " (expected spectral or raw)");
}

const char* to_string(RewardScale scale) {
    return scale == RewardScale::Spectral ? "spectral" : "raw";
}

State initial_state(const Scenario& scenario) {
    State s;
    s.entity_pos = scenario.entity_start;
    s.freshness.reserve(scenario.nodes.size());
    for (const auto& node : scenario.nodes) {
        // Ages start at their configured values; the effective distance is
        // anchored at the start position so the initial VoI is finite.
        s.freshness.push_back(
            {node.initial_aoi, distance_sq(node.position, scenario.entity_start)});
    }
    return s;
}

void feasible_actions(const Scenario& scenario, const State& state, std::vector<Action>& out) {
    out.clear();
    const int n = scenario.node_count();
    for (int d = 0; d < kDirectionCount; ++d) {
        const auto dir = static_cast<Direction>(d);
        if (!scenario.contains(moved(state.entity_pos, dir, scenario.step_length))) {
            continue;
        }
        for (int sched = 0; sched <= n; ++sched) {
            Action a;
            a.direction = dir;
            if (sched < n) a.schedule = sched;
            out.push_back(a);
        }
    }
}

std::vector<Action> feasible_actions(const Scenario& scenario, const State& state) {
    std::vector<Action> out;
    feasible_actions(scenario, state, out);
    return out;
}

StepOutcome step(const Scenario& scenario, const State& state, const Action& action,
                 const RewardOptions& reward) {
    const int n = scenario.node_count();
    if (static_cast<int>(state.freshness.size()) != n) {
        throw contract_error("step: state does not match the scenario's node count");
    }
    if (action.schedule && (*action.schedule < 0 || *action.schedule >= n)) {
        throw contract_error("step: scheduled node out of range");
    }
    const GridPoint next_pos = moved(state.entity_pos, action.direction, scenario.step_length);
    if (!scenario.contains(next_pos)) {
        throw contract_error("step: move leaves the lattice");
    }

    StepOutcome out;
    out.served = action.schedule;

    // Transmission happens before the move, at this slot's position.
    const RadioLinear radio = linear(scenario.radio);
    std::int64_t link_dist_sq = 0;
    if (action.schedule) {
        const int j = *action.schedule;
        link_dist_sq = distance_sq(scenario.nodes[static_cast<std::size_t>(j)].position,
                                   state.entity_pos);
        const double d = std::sqrt(static_cast<double>(link_dist_sq));
        out.success = success(radio, d, true);
    }

    out.next_state.entity_pos = next_pos;
    out.next_state.freshness.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const bool delivered = out.success && action.schedule && *action.schedule == i;
        out.next_state.freshness.push_back(
            step_freshness(state.freshness[static_cast<std::size_t>(i)], delivered, link_dist_sq));
    }

    out.per_node_voi.reserve(static_cast<std::size_t>(n));
    double min_voi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = voi(radio, scenario.radio.tx_power_watts[static_cast<std::size_t>(i)],
                             scenario.nodes[static_cast<std::size_t>(i)].correlation,
                             out.next_state.freshness[static_cast<std::size_t>(i)]);
        out.per_node_voi.push_back(v);
        min_voi = i == 0 ? v : std::min(min_voi, v);
    }

    const double scaled =
        reward.scale == RewardScale::Spectral ? min_voi / radio.bandwidth_hz : min_voi;
    out.reward = out.success ? scaled : scaled - reward.penalty;
    return out;
}

double EpisodeTrace::discounted_return(double gamma) const {
    double total = 0.0;
    double weight = 1.0;
    for (const auto& slot : slots) {
        total += weight * slot.outcome.reward;
        weight *= gamma;
    }
    return total;
}

EpisodeTrace rollout(const Scenario& scenario, const Policy& policy, int horizon,
                     const RewardOptions& reward) {
    EpisodeTrace trace;
    trace.initial = initial_state(scenario);
    State state = trace.initial;
    trace.slots.reserve(static_cast<std::size_t>(std::max(horizon, 0)));
    for (int t = 0; t < horizon; ++t) {
        SlotRecord rec;
        rec.state = state;
        rec.action = policy(state, t);
        rec.outcome = step(scenario, state, rec.action, reward);
        state = rec.outcome.next_state;

        const auto& vois = rec.outcome.per_node_voi;
        const double lo = *std::min_element(vois.begin(), vois.end());
        double sum = 0.0;
        for (double v : vois) sum += v;
        trace.min_voi_series.push_back(lo);
        trace.mean_voi_series.push_back(sum / static_cast<double>(vois.size()));
        trace.slots.push_back(std::move(rec));
    }
    if (!trace.slots.empty()) {
        double min_sum = 0.0;
        double mean_sum = 0.0;
        for (std::size_t t = 0; t < trace.slots.size(); ++t) {
            min_sum += trace.min_voi_series[t];
            mean_sum += trace.mean_voi_series[t];
        }
        trace.time_avg_min_voi = min_sum / static_cast<double>(trace.slots.size());
        trace.time_avg_mean_voi = mean_sum / static_cast<double>(trace.slots.size());
    }
    return trace;
}

void write_trace_csv(const EpisodeTrace& trace, const Scenario& scenario, std::ostream& out) {
    const int n = scenario.node_count();
    out << "t,x,y,direction,scheduled_node,success";
    for (int i = 1; i <= n; ++i) out << ",aoi_" << i;
    for (int i = 1; i <= n; ++i) out << ",q_sq_" << i;
    for (int i = 1; i <= n; ++i) out << ",voi_" << i;
    out << ",reward\n";
    for (std::size_t t = 0; t < trace.slots.size(); ++t) {
        const auto& rec = trace.slots[t];
        // Position is where the slot's transmission was evaluated; freshness
        // and VoI columns reflect the state after the slot's update.
        out << (t + 1) << ',' << rec.state.entity_pos.x << ',' << rec.state.entity_pos.y << ','
            << to_string(rec.action.direction) << ','
            << (rec.action.schedule ? *rec.action.schedule + 1 : 0) << ','
            << (rec.outcome.success ? 1 : 0);
        for (const auto& f : rec.outcome.next_state.freshness) out << ',' << f.aoi;
        for (const auto& f : rec.outcome.next_state.freshness) out << ',' << f.eff_dist_sq;
        for (double v : rec.outcome.per_node_voi) out << ',' << format_double(v);
        out << ',' << format_double(rec.outcome.reward) << '\n';
    }
}

std::string trace_csv(const EpisodeTrace& trace, const Scenario& scenario) {
    std::ostringstream out;
    write_trace_csv(trace, scenario, out);
    return out.str();
}

} // namespace voiplan
