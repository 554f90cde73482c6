#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace voiplan {

struct GridPoint {
    int x = 0;
    int y = 0;
    bool operator==(const GridPoint&) const = default;
};

// Radio constants shared by all links. Gain and noise density are kept in
// the dB units the scenario file uses so save/load round-trips bit-exactly;
// linear() converts once for the math.
struct RadioParams {
    std::vector<double> tx_power_watts; // P_i, one entry per node
    double ref_gain_db = -50.0;         // power gain at 1 m reference distance
    double bandwidth_hz = 2e6;
    double noise_psd_dbm_hz = -110.0;
    double success_distance = 1.0;      // d_th; transmissions from farther away fail

    double ref_gain() const { return std::pow(10.0, ref_gain_db / 10.0); }
    double noise_psd() const { return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0); }

    bool operator==(const RadioParams&) const = default;
};

// Linear-unit snapshot of RadioParams for the hot loops.
struct RadioLinear {
    double ref_gain = 0.0;
    double bandwidth_hz = 0.0;
    double noise_psd = 0.0;
    double success_distance = 0.0;
};

inline RadioLinear linear(const RadioParams& r) {
    return {r.ref_gain(), r.bandwidth_hz, r.noise_psd(), r.success_distance};
}

struct NodeSpec {
    GridPoint position;
    double correlation = 0.5; // one-slot autocorrelation, strictly inside (0,1)
    int initial_aoi = 1;

    bool operator==(const NodeSpec&) const = default;
};

// Immutable world description: lattice {0..grid_extent}^2, fixed sensing
// nodes, one mobile collector.
struct Scenario {
    int grid_extent = 5;
    std::vector<NodeSpec> nodes;
    GridPoint entity_start;
    int horizon = 30;    // slots per episode
    int step_length = 1; // lattice units moved per slot
    RadioParams radio;

    int node_count() const { return static_cast<int>(nodes.size()); }
    bool contains(GridPoint p) const {
        return p.x >= 0 && p.y >= 0 && p.x <= grid_extent && p.y <= grid_extent;
    }

    // Throws invariant_error naming the offending field.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

struct LearnerConfig {
    double learning_rate = 0.75;       // beta
    double discount = 0.9;             // gamma
    long episodes = 200000;
    double epsilon_init = 1.0;
    double epsilon_decrement = 5e-6;   // per-episode; clamped at zero
    double penalty = 100.0;            // charged on slots with no successful reception
    std::uint64_t rng_seed = 1;

    void validate() const;

    bool operator==(const LearnerConfig&) const = default;
};

// Defaults with the exploration schedule rescaled so epsilon reaches zero
// on the final episode.
LearnerConfig desk_config(long episodes, std::uint64_t seed = 1);

// Uniform random world: distinct node positions on the lattice, correlations
// uniform on (rho_center - rho_halfwidth, rho_center + rho_halfwidth)
// intersected with the open interval (0,1), entity start anywhere on the
// lattice. Pure function of its arguments.
Scenario generate_random(int node_count, int grid_extent, double rho_center,
                         double rho_halfwidth, std::uint64_t seed);

// JSON document round-trip. save followed by load reproduces every field
// bit-for-bit; load validates schema (schema_error with a field path) and
// invariants (invariant_error with a field name).
std::string save(const Scenario& scenario, const LearnerConfig& config);
std::pair<Scenario, LearnerConfig> load(const std::string& document);

void save_file(const Scenario& scenario, const LearnerConfig& config, const std::string& path);
std::pair<Scenario, LearnerConfig> load_file(const std::string& path);

// Stable 64-bit digest of the world description (not the learner config);
// Q-table files record it and refuse to load against a different world.
std::uint64_t scenario_fingerprint(const Scenario& scenario);

} // namespace voiplan
