#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voiplan/baselines.hpp"
#include "voiplan/env.hpp"
#include "voiplan/scenario.hpp"

namespace voiplan {

// Summary statistics for one evaluation rollout.
struct RunStats {
    PolicyKind kind = PolicyKind::VoiOptimal;
    std::uint64_t seed = 0;
    double time_avg_min_voi = 0.0;
    double time_avg_mean_voi = 0.0;
    double final_min_voi = 0.0;
    double discounted_return = 0.0;
};

// The three-node reference layout used for the head-to-head comparison:
// correlations 0.7/0.6/0.5, starting ages 2/4/4, one-watt uplinks, ten slots.
Scenario case_study_scenario();

struct CaseStudyOptions {
    long episodes = 200000;
    int seeds = 5;
    std::uint64_t base_seed = 1;
    RewardScale scale = RewardScale::Spectral;
    int threads = 0; // 0 = hardware concurrency
};

struct CaseStudyResult {
    Scenario scenario;
    std::vector<std::uint64_t> seeds;
    std::vector<PolicyKind> kinds;
    // traces[k][s]: policy kinds[k] under seeds[s]. The shortest-path policy
    // has no training randomness, so its rollouts repeat across seeds.
    std::vector<std::vector<EpisodeTrace>> traces;
    std::vector<std::vector<RunStats>> stats;

    double mean_time_avg_min_voi(PolicyKind kind) const;
    double mean_time_avg_mean_voi(PolicyKind kind) const;
};

// Trains the VoI and age learners once per seed, rolls out all three
// policies on the fixed scenario, and collects traces plus summary stats.
CaseStudyResult run_case_study(const Scenario& scenario, const CaseStudyOptions& options);

enum class SweepParameter {
    TxPower,      // uniform transmit power across nodes, W
    RhoHalfwidth, // correlation spread around the center
    NodeCount     // number of nodes
};

const char* to_string(SweepParameter parameter);
SweepParameter sweep_parameter_from_string(const std::string& name);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::TxPower;
    std::vector<double> values;
    std::vector<PolicyKind> policies = {PolicyKind::VoiOptimal};
    int node_count = 4;
    int grid_extent = 5;
    int horizon = 30;
    double tx_power = 1.0;
    double rho_center = 0.5;
    double rho_halfwidth = 0.5;
    int instances = 10;
    long episodes = 200000;
    std::uint64_t base_seed = 1;
    RewardScale scale = RewardScale::Spectral;
    int threads = 0;

    void validate() const;
};

// Aggregate for one (sweep value, policy) cell.
struct SweepCell {
    double value = 0.0;
    PolicyKind kind = PolicyKind::VoiOptimal;
    std::vector<RunStats> per_instance; // ordered by instance index
    double mean_min_voi = 0.0;
    double stderr_min_voi = 0.0;
    double mean_mean_voi = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells; // values-major, then policies

    const SweepCell& cell(double value, PolicyKind kind) const;
};

// Runs the sweep. Instances are paired across sweep values: instance i draws
// the same layout seed at every value, so curves differ only through the
// swept parameter. Trainings fan out across threads; aggregation folds in
// instance order, so the result is a pure function of the spec.
SweepResult run_sweep(const SweepSpec& spec);

// JSON round-trip for sweep specifications (the `sweep` subcommand input).
std::string save(const SweepSpec& spec);
SweepSpec load_sweep_spec(const std::string& document);
SweepSpec load_sweep_spec_file(const std::string& path);

// CSV emitters. All numeric formatting is shortest round-trip, so repeated
// runs produce identical bytes.
std::string case_study_csv(const CaseStudyResult& result);
std::string sweep_csv(const SweepResult& result);

// Per-slot mean-VoI series table for the case study (one column per policy).
std::string case_study_series_csv(const CaseStudyResult& result);

// Spearman rank correlation (average ranks on ties). Used for trend checks.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

double mean(const std::vector<double>& xs);
double sample_stderr(const std::vector<double>& xs);

} // namespace voiplan
