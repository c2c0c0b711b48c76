#pragma once

#include "aoiris/aoi.hpp"
#include "aoiris/baselines.hpp"
#include "aoiris/channel.hpp"
#include "aoiris/sca.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace aoiris {

struct ScenarioConfig {
    NetworkSizes sizes;
    int max_scheduled = 2;
    PathLossParams pathloss;
    double noise_power = 1e-10;                 // watts (-70 dBm)
    double gamma_th = 1e3;                      // linear (30 dB)
    double harvest_min = 3.1622776601683794e-5; // watts (-15 dBm)
    double power_budget = 3.0;                  // watts
    std::vector<double> lambdas;                // per IU; scalar default 0.6
    int slots = 200;
    int reps = 5;
    BaselineKind policy = BaselineKind::proposed;
    ScaConfig sca;
    AfConfig af;
    std::uint64_t seed = 1;
    bool record_traces = true;
    int threads = 0;  // 0: hardware concurrency

    void validate() const;  // throws invalid_argument naming the offending key
    /// Copy with lambdas expanded to one entry per stream.
    ScenarioConfig resolved() const;
};

// Per-slot record of what happened, enough to replay the run offline.
struct SlotRecord {
    std::vector<int> arrivals;
    std::vector<int> scheduled;
    std::vector<int> delivered;
    std::vector<long long> age;          // after the step
    std::vector<double> snr;             // realized, per IU
    std::vector<double> harvested;       // watts, per EU
    ComplexVec ris_phase;                // empty for the relay policy
    std::vector<ComplexVec> iu_beams;
    std::vector<ComplexVec> eu_beams;
    bool feasible = true;
    int solver_calls = 0;
    long long solver_iterations = 0;
};

struct SolverStats {
    long long solves = 0;
    long long iterations = 0;
    int max_phase_sca_iters = 0;    // worst inner phase-loop length seen
    int max_beam_sca_iters = 0;
    int max_penalty_rounds = 0;
    int max_ao_rounds = 0;
    int restorations = 0;
    double optimize_seconds = 0.0;

    void absorb(const SlotDecision& dec);
    void merge(const SolverStats& other);
};

struct RepResult {
    long long sum_age = 0;  // sum over slots and streams of the post-step age
    long long arrivals = 0;
    long long deliveries = 0;
    long long infeasible_slots = 0;
    double harvested_sum = 0.0;  // watt-slots over all EUs
    SolverStats stats;
    std::vector<SlotRecord> slots;  // populated when record_traces is on
};

struct RunMetrics {
    double mean_sum_aoi = 0.0;      // mean over repetitions of the age sum
    double time_avg_sum_aoi = 0.0;  // divided by the horizon
    std::vector<double> per_stream_time_avg;
    double delivery_rate = 0.0;  // deliveries / arrivals
    double mean_harvest_w = 0.0; // per EU per slot
    long long infeasible_slots = 0;
    SolverStats stats;
    std::vector<RepResult> reps;
    ScenarioConfig config;  // resolved copy
};

/// Runs slots x repetitions of the configured policy. Repetitions own disjoint
/// random streams and may execute in parallel; the reduction is ordered, so
/// results are deterministic for a given seed.
RunMetrics run(const ScenarioConfig& config);

struct CompareItem {
    std::string policy_label;
    std::string swept_param;
    double swept_value = 0.0;
    ScenarioConfig config;
};

struct CompareRow {
    std::string policy_label;
    std::string swept_param;
    double swept_value = 0.0;
    RunMetrics metrics;
};

/// Paired-seed comparison driver: one row per item, run in order.
std::vector<CompareRow> compare(const std::vector<CompareItem>& items);

const char* version();

}  // namespace aoiris
