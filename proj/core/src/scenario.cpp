#include "voiplan/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "voiplan/errors.hpp"
#include "voiplan/text.hpp"

namespace voiplan {

namespace {

using json = nlohmann::ordered_json;

const json& member(const json& object, const char* key, const std::string& path) {
    if (!object.is_object()) {
        throw schema_error(path.empty() ? "/" : path, "expected an object");
    }
    auto it = object.find(key);
    if (it == object.end()) {
        throw schema_error(path + "/" + key, "missing key");
    }
    return *it;
}

double as_number(const json& value, const std::string& path) {
    if (!value.is_number()) {
        throw schema_error(path, "expected a number");
    }
    return value.get<double>();
}

int as_int(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw schema_error(path, "expected an integer");
    }
    return value.get<int>();
}

long as_long(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw schema_error(path, "expected an integer");
    }
    return value.get<long>();
}

std::uint64_t as_uint64(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw schema_error(path, "expected an integer");
    }
    if (value.is_number_unsigned()) {
        return value.get<std::uint64_t>();
    }
    long long v = value.get<long long>();
    if (v < 0) {
        throw schema_error(path, "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

GridPoint as_point(const json& value, const std::string& path) {
    return {as_int(member(value, "x", path), path + "/x"),
            as_int(member(value, "y", path), path + "/y")};
}

json point_json(GridPoint p) {
    return json{{"x", p.x}, {"y", p.y}};
}

json scenario_json(const Scenario& s) {
    json nodes = json::array();
    for (const auto& node : s.nodes) {
        nodes.push_back(json{{"x", node.position.x},
                             {"y", node.position.y},
                             {"rho", node.correlation},
                             {"initial_aoi", node.initial_aoi}});
    }
    json radio{{"tx_power", s.radio.tx_power_watts},
               {"ref_gain_db", s.radio.ref_gain_db},
               {"bandwidth_hz", s.radio.bandwidth_hz},
               {"noise_psd_dbm_hz", s.radio.noise_psd_dbm_hz},
               {"success_distance", s.radio.success_distance}};
    return json{{"grid_extent", s.grid_extent},
                {"nodes", std::move(nodes)},
                {"entity_start", point_json(s.entity_start)},
                {"horizon", s.horizon},
                {"step_length", s.step_length},
                {"radio", std::move(radio)}};
}

} // namespace

void Scenario::validate() const {
    if (grid_extent < 0) {
        throw invariant_error("grid_extent", "must be non-negative");
    }
    if (nodes.empty()) {
        throw invariant_error("nodes", "at least one node is required");
    }
    if (!contains(entity_start)) {
        throw invariant_error("entity_start", "outside the lattice");
    }
    if (horizon < 1) {
        throw invariant_error("horizon", "must be at least 1");
    }
    if (step_length != 1) {
        throw invariant_error("step_length", "only unit steps are supported");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& node = nodes[i];
        const std::string field = "nodes[" + format_int(static_cast<std::int64_t>(i)) + "]";
        if (!contains(node.position)) {
            throw invariant_error(field + ".position", "outside the lattice");
        }
        if (!(node.correlation > 0.0 && node.correlation < 1.0)) {
            throw invariant_error(field + ".rho", "must lie strictly inside (0,1)");
        }
        if (node.initial_aoi < 1) {
            throw invariant_error(field + ".initial_aoi", "must be at least 1");
        }
    }
    if (radio.tx_power_watts.size() != nodes.size()) {
        throw invariant_error("radio.tx_power", "one entry per node required");
    }
    for (std::size_t i = 0; i < radio.tx_power_watts.size(); ++i) {
        if (!(radio.tx_power_watts[i] > 0.0)) {
            throw invariant_error("radio.tx_power[" + format_int(static_cast<std::int64_t>(i)) + "]",
                                  "must be strictly positive");
        }
    }
    if (!(radio.bandwidth_hz > 0.0)) {
        throw invariant_error("radio.bandwidth_hz", "must be strictly positive");
    }
    if (!(radio.ref_gain() > 0.0)) {
        throw invariant_error("radio.ref_gain_db", "gain must be strictly positive");
    }
    if (!(radio.noise_psd() > 0.0)) {
        throw invariant_error("radio.noise_psd_dbm_hz", "noise density must be strictly positive");
    }
    if (!(radio.success_distance > 0.0)) {
        throw invariant_error("radio.success_distance", "must be strictly positive");
    }
}

void LearnerConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw invariant_error("learner.beta", "must lie in (0,1]");
    }
    if (!(discount >= 0.0 && discount <= 1.0)) {
        throw invariant_error("learner.gamma", "must lie in [0,1]");
    }
    if (episodes < 0) {
        throw invariant_error("learner.episodes", "must be non-negative");
    }
    if (!(epsilon_init >= 0.0 && epsilon_init <= 1.0)) {
        throw invariant_error("learner.epsilon_init", "must lie in [0,1]");
    }
    if (!(epsilon_decrement >= 0.0)) {
        throw invariant_error("learner.epsilon_decrement", "must be non-negative");
    }
    if (!(penalty >= 0.0)) {
        throw invariant_error("learner.penalty", "must be non-negative");
    }
}

LearnerConfig desk_config(long episodes, std::uint64_t seed) {
    LearnerConfig config;
    config.episodes = episodes;
    // Epsilon hits zero on the last episode regardless of the episode budget.
    config.epsilon_decrement = episodes > 0 ? config.epsilon_init / static_cast<double>(episodes) : 0.0;
    config.rng_seed = seed;
    return config;
}

Scenario generate_random(int node_count, int grid_extent, double rho_center,
                         double rho_halfwidth, std::uint64_t seed) {
    if (node_count < 1) {
        throw contract_error("generate_random: node_count must be at least 1");
    }
    if (grid_extent < 0) {
        throw contract_error("generate_random: grid_extent must be non-negative");
    }
    if (rho_halfwidth < 0.0) {
        throw contract_error("generate_random: rho_halfwidth must be non-negative");
    }
    const long lattice_points = static_cast<long>(grid_extent + 1) * (grid_extent + 1);
    if (node_count > lattice_points) {
        throw contract_error("generate_random: more nodes than lattice points");
    }
    // The sampling interval is the requested one clipped to (0,1) open.
    const double lo = std::max(rho_center - rho_halfwidth, 0.0);
    const double hi = std::min(rho_center + rho_halfwidth, 1.0);
    if (!(lo < 1.0 && hi > 0.0 && lo <= hi)) {
        throw contract_error("generate_random: correlation interval does not intersect (0,1)");
    }
    if (rho_halfwidth == 0.0 && !(rho_center > 0.0 && rho_center < 1.0)) {
        throw contract_error("generate_random: degenerate correlation outside (0,1)");
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(0, grid_extent);
    std::uniform_real_distribution<double> rho(lo, hi);

    Scenario s;
    s.grid_extent = grid_extent;
    s.nodes.reserve(static_cast<std::size_t>(node_count));
    while (s.node_count() < node_count) {
        GridPoint p{coord(rng), coord(rng)};
        bool taken = std::any_of(s.nodes.begin(), s.nodes.end(),
                                 [&](const NodeSpec& n) { return n.position == p; });
        if (taken) {
            continue; // rejection keeps placements uniform over distinct layouts
        }
        NodeSpec node;
        node.position = p;
        if (rho_halfwidth == 0.0) {
            node.correlation = rho_center;
        } else {
            // uniform_real_distribution may return either endpoint; resample
            // until the draw is strictly inside (0,1).
            do {
                node.correlation = rho(rng);
            } while (!(node.correlation > 0.0 && node.correlation < 1.0));
        }
        node.initial_aoi = 1;
        s.nodes.push_back(node);
    }
    s.entity_start = {coord(rng), coord(rng)};
    s.radio.tx_power_watts.assign(static_cast<std::size_t>(node_count), 1.0);
    s.validate();
    return s;
}

std::string save(const Scenario& scenario, const LearnerConfig& config) {
    json doc = scenario_json(scenario);
    doc["learner"] = json{{"beta", config.learning_rate},
                          {"gamma", config.discount},
                          {"episodes", config.episodes},
                          {"epsilon_init", config.epsilon_init},
                          {"epsilon_decrement", config.epsilon_decrement},
                          {"penalty", config.penalty},
                          {"seed", config.rng_seed}};
    return doc.dump(2) + "\n";
}

std::pair<Scenario, LearnerConfig> load(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw schema_error("/", e.what());
    }

    Scenario s;
    s.grid_extent = as_int(member(doc, "grid_extent", ""), "/grid_extent");
    const json& nodes = member(doc, "nodes", "");
    if (!nodes.is_array()) {
        throw schema_error("/nodes", "expected an array");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "/nodes/" + format_int(static_cast<std::int64_t>(i));
        const json& entry = nodes[i];
        NodeSpec node;
        node.position = as_point(entry, path);
        node.correlation = as_number(member(entry, "rho", path), path + "/rho");
        node.initial_aoi = as_int(member(entry, "initial_aoi", path), path + "/initial_aoi");
        s.nodes.push_back(node);
    }
    s.entity_start = as_point(member(doc, "entity_start", ""), "/entity_start");
    s.horizon = as_int(member(doc, "horizon", ""), "/horizon");
    s.step_length = as_int(member(doc, "step_length", ""), "/step_length");

    const json& radio = member(doc, "radio", "");
    const json& power = member(radio, "tx_power", "/radio");
    if (power.is_number()) {
        // A scalar means every node transmits at the same power.
        s.radio.tx_power_watts.assign(s.nodes.size(), as_number(power, "/radio/tx_power"));
    } else if (power.is_array()) {
        for (std::size_t i = 0; i < power.size(); ++i) {
            s.radio.tx_power_watts.push_back(
                as_number(power[i], "/radio/tx_power/" + format_int(static_cast<std::int64_t>(i))));
        }
    } else {
        throw schema_error("/radio/tx_power", "expected a number or an array");
    }
    s.radio.ref_gain_db = as_number(member(radio, "ref_gain_db", "/radio"), "/radio/ref_gain_db");
    s.radio.bandwidth_hz = as_number(member(radio, "bandwidth_hz", "/radio"), "/radio/bandwidth_hz");
    s.radio.noise_psd_dbm_hz =
        as_number(member(radio, "noise_psd_dbm_hz", "/radio"), "/radio/noise_psd_dbm_hz");
    s.radio.success_distance =
        as_number(member(radio, "success_distance", "/radio"), "/radio/success_distance");

    const json& learner = member(doc, "learner", "");
    LearnerConfig config;
    config.learning_rate = as_number(member(learner, "beta", "/learner"), "/learner/beta");
    config.discount = as_number(member(learner, "gamma", "/learner"), "/learner/gamma");
    config.episodes = as_long(member(learner, "episodes", "/learner"), "/learner/episodes");
    config.epsilon_init =
        as_number(member(learner, "epsilon_init", "/learner"), "/learner/epsilon_init");
    config.epsilon_decrement =
        as_number(member(learner, "epsilon_decrement", "/learner"), "/learner/epsilon_decrement");
    config.penalty = as_number(member(learner, "penalty", "/learner"), "/learner/penalty");
    config.rng_seed = as_uint64(member(learner, "seed", "/learner"), "/learner/seed");

    s.validate();
    config.validate();
    return {std::move(s), config};
}

void save_file(const Scenario& scenario, const LearnerConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot open for writing: " + path);
    }
    out << save(scenario, config);
    if (!out) {
        throw error("write failed: " + path);
    }
}

std::pair<Scenario, LearnerConfig> load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw error("cannot open: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load(buffer.str());
}

std::uint64_t scenario_fingerprint(const Scenario& scenario) {
    return fnv1a64(scenario_json(scenario).dump());
}

} // namespace voiplan
