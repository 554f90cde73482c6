#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "voiplan/scenario.hpp"

namespace voiplan {

// Age / effective-distance pair for one node. Effective distance is kept
// squared as an exact integer: positions live on the integer lattice, so
// squared distances are integers and states hash exactly.
struct FreshnessState {
    int aoi = 1;                  // slots since the newest delivered sample
    std::int64_t eff_dist_sq = 0; // squared distance of the last successful reception

    bool operator==(const FreshnessState&) const = default;
};

inline std::int64_t distance_sq(GridPoint a, GridPoint b) {
    const std::int64_t dx = a.x - b.x;
    const std::int64_t dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(GridPoint node_pos, GridPoint entity_pos) {
    return std::sqrt(static_cast<double>(distance_sq(node_pos, entity_pos)));
}

// Free-space path loss SNR: P * g0 * d^-2 / (B * N0), zero when the node is
// not scheduled. A scheduled transmission at distance zero has unbounded
// SNR; returned as +infinity rather than dividing by zero.
inline double snr(const RadioLinear& radio, double tx_power_watts, double dist,
                  bool scheduled) {
    if (!scheduled) return 0.0;
    if (dist == 0.0) return std::numeric_limits<double>::infinity();
    return tx_power_watts * radio.ref_gain / (dist * dist * radio.bandwidth_hz * radio.noise_psd);
}

inline double snr(const RadioParams& radio, int node_index, double dist, bool scheduled) {
    return snr(linear(radio), radio.tx_power_watts.at(static_cast<std::size_t>(node_index)),
               dist, scheduled);
}

// Equal transmit powers reduce the SNR threshold to a distance threshold;
// the boundary distance counts as a success.
inline bool success(const RadioLinear& radio, double dist, bool scheduled) {
    return scheduled && dist <= radio.success_distance;
}

inline bool success(const RadioParams& radio, double dist, bool scheduled) {
    return scheduled && dist <= radio.success_distance;
}

// One slot's link evaluation for a single node.
struct LinkSample {
    double distance = 0.0;
    bool scheduled = false;
    double snr = 0.0;
    bool success = false;
};

inline LinkSample sample_link(const RadioParams& radio, int node_index, GridPoint node_pos,
                              GridPoint entity_pos, bool scheduled) {
    LinkSample s;
    s.distance = distance(node_pos, entity_pos);
    s.scheduled = scheduled;
    s.snr = snr(radio, node_index, s.distance, scheduled);
    s.success = success(radio, s.distance, scheduled);
    return s;
}

// Per-slot freshness recursion: a delivered sample resets the age to one and
// re-anchors the effective distance at the reception distance; otherwise the
// age grows and the effective distance stays frozen.
inline FreshnessState step_freshness(FreshnessState prev, bool delivered,
                                     std::int64_t current_dist_sq) {
    if (delivered) return {1, current_dist_sq};
    return {prev.aoi + 1, prev.eff_dist_sq};
}

// Value of information, in bits/s, of the newest delivered sample about the
// source's current state:
//
//   V = -B * log2(1 - P g0 rho^A / (B N0 q^2 + P g0))
//
// Computed through log1p so values stay strict and well-ordered when the
// fraction is tiny (large age or weak correlation).
inline double voi(const RadioLinear& radio, double tx_power_watts, double correlation,
                  const FreshnessState& fresh) {
    const double pg = tx_power_watts * radio.ref_gain;
    const double num = pg * std::pow(correlation, static_cast<double>(fresh.aoi));
    const double den = radio.bandwidth_hz * radio.noise_psd * static_cast<double>(fresh.eff_dist_sq) + pg;
    const double frac = num / den; // in [0, 1) for any finite age
    return -radio.bandwidth_hz * std::log1p(-frac) / std::numbers::ln2;
}

inline double voi(const RadioParams& radio, int node_index, const NodeSpec& node,
                  const FreshnessState& fresh) {
    return voi(linear(radio), radio.tx_power_watts.at(static_cast<std::size_t>(node_index)),
               node.correlation, fresh);
}

} // namespace voiplan
