#pragma once

#include "aoiris/channel.hpp"
#include "aoiris/conic.hpp"

#include <vector>

namespace aoiris {

struct ScaConfig {
    // Penalty loop for the unit-modulus constraint: C starts at
    // penalty_c0_scale * (weight sum + 1) and is multiplied by penalty_growth
    // each round until the worst modulus defect is below unit_modulus_tol.
    double penalty_c0_scale = 1e-3;
    double penalty_growth = 10.0;
    int penalty_rounds = 6;

    double eps_phase = 1e-4;  // relative objective change, phase/schedule loop
    double eps_beam = 1e-4;   // relative objective change, beamforming loop
    double eps_ao = 1e-4;     // relative change across alternating rounds
    int max_phase_iters = 30;
    int max_beam_iters = 30;
    int max_ao_rounds = 10;

    double unit_modulus_tol = 1e-3;
    double feasibility_slack = 1e-6;  // relative slack when re-checking SNR/harvest

    SolveOptions solver = default_solver_options();

    static SolveOptions default_solver_options();
    void validate() const;
};

// Everything the per-slot optimizer needs. A stream with weight zero has no
// buffered packet: it gets no beamformer variable and no SNR row.
struct SlotProblem {
    std::vector<double> weights;  // (age - system_time) * buffered, per IU
    std::vector<CompositeFactor> iu;
    std::vector<CompositeFactor> eu;
    int max_scheduled = 2;
    double power_budget = 3.0;  // watts
    double gamma_th = 1000.0;   // linear
    double noise_power = 1e-10; // watts
    double harvest_min = 0.0;   // watts

    int num_iu() const { return static_cast<int>(iu.size()); }
    int num_eu() const { return static_cast<int>(eu.size()); }
    int n_tx() const { return iu.empty() ? (eu.empty() ? 0 : static_cast<int>(eu[0].direct.size())) : static_cast<int>(iu[0].direct.size()); }
    int n_ris() const { return iu.empty() ? (eu.empty() ? 0 : static_cast<int>(eu[0].reflect.rows())) : static_cast<int>(iu[0].reflect.rows()); }
    bool buffered(int i) const { return weights[static_cast<size_t>(i)] > 0.0; }
    double weight_sum() const;
    void validate() const;
};

struct IterationRecord {
    enum class Phase { phase_schedule, beamforming, restoration, final_resolve };
    Phase phase = Phase::phase_schedule;
    int ao_round = 0;
    int penalty_round = 0;  // 0 outside the penalty loop
    int sca_iter = 0;
    double penalty_weight = 0.0;
    // True (non-surrogate) objective at the returned iterate: penalized
    // schedule objective for phase records, schedule objective for
    // beamforming records, the margin value for final_resolve records.
    double objective = 0.0;
    SolveStatus status = SolveStatus::optimal;
    int solver_iterations = 0;
};

struct SlotDecision {
    std::vector<double> alpha_relaxed;
    std::vector<int> alpha;
    ComplexVec ris_phase;
    std::vector<ComplexVec> iu_beams;
    std::vector<ComplexVec> eu_beams;
    bool feasible = false;
    double objective = 0.0;  // weight mass of the final schedule
    double unit_modulus_violation = 0.0;  // before the final projection
    int restorations = 0;
    int ao_rounds = 0;
    std::vector<IterationRecord> trace;
};

// ---- subproblem builders ----------------------------------------------------

// Variable layout of the phase/schedule subproblem:
// [alpha (num_iu)] [Re rho (n_ris)] [Im rho (n_ris)] [margin t, restoration only]
struct PhaseProblem {
    ConicProblem problem;
    int num_iu = 0;
    int n_ris = 0;
    int margin_index = -1;

    int alpha_index(int i) const { return i; }
    int re_index(int n) const { return num_iu + n; }
    int im_index(int n) const { return num_iu + n_ris + n; }
    ComplexVec extract_rho(const RealVec& x) const;
    std::vector<double> extract_alpha(const RealVec& x) const;
};

/// Linearized phase/schedule subproblem around rho0 with the penalty
/// linearization weighted by penalty_c. If restoration is set the objective
/// becomes a harvest margin variable instead.
PhaseProblem build_phase_schedule_problem(const SlotProblem& slot,
                                          const std::vector<ComplexVec>& iu_beams,
                                          const std::vector<ComplexVec>& eu_beams,
                                          const ComplexVec& rho0, double penalty_c,
                                          bool restoration = false);

enum class BeamMode {
    schedule,     // alpha free in [0,1], maximize weighted schedule
    restoration,  // alpha free, maximize worst harvest margin
    margin,       // alpha fixed binary, maximize worst relative constraint margin
};

// Variable layout of the beamforming subproblem: [alpha (if schedule mode)]
// then [Re w_i; Im w_i] for each buffered IU, then [Re v_j; Im v_j] per EU,
// then the margin variable when present.
struct BeamProblem {
    ConicProblem problem;
    int num_iu = 0;
    int num_eu = 0;
    int n_tx = 0;
    bool has_alpha = false;
    std::vector<int> w_offsets;  // -1 for streams without a beam variable
    std::vector<int> v_offsets;
    int margin_index = -1;

    std::vector<double> extract_alpha(const RealVec& x) const;  // empty if fixed
    std::vector<ComplexVec> extract_iu_beams(const RealVec& x) const;
    std::vector<ComplexVec> extract_eu_beams(const RealVec& x) const;
};

/// Linearized beamforming/schedule subproblem around (iu_beams0, eu_beams0)
/// with the reflection vector held fixed.
BeamProblem build_beam_schedule_problem(const SlotProblem& slot, const ComplexVec& rho,
                                        const std::vector<ComplexVec>& iu_beams0,
                                        const std::vector<ComplexVec>& eu_beams0,
                                        BeamMode mode = BeamMode::schedule,
                                        const std::vector<int>* fixed_alpha = nullptr);

// ---- algorithms --------------------------------------------------------------

struct PhaseScheduleResult {
    ComplexVec rho;
    std::vector<double> alpha;
    bool ok = false;
};

/// Penalty-escalated SCA over the reflection phases and the relaxed schedule,
/// with the beamformers held fixed.
PhaseScheduleResult optimize_phase_schedule(const SlotProblem& slot,
                                            const std::vector<ComplexVec>& iu_beams,
                                            const std::vector<ComplexVec>& eu_beams,
                                            const ComplexVec& rho_init, const ScaConfig& cfg,
                                            int ao_round, int* restorations,
                                            std::vector<IterationRecord>& trace);

struct BeamScheduleResult {
    std::vector<ComplexVec> iu_beams;
    std::vector<ComplexVec> eu_beams;
    std::vector<double> alpha;
    double margin = 0.0;  // final margin in margin/restoration modes
    bool ok = false;
};

/// SCA over the beamformers and the relaxed schedule at fixed phases. With
/// fixed_alpha set it maximizes the worst relative constraint margin instead.
BeamScheduleResult optimize_beam_schedule(const SlotProblem& slot, const ComplexVec& rho,
                                          const std::vector<ComplexVec>& iu_beams_init,
                                          const std::vector<ComplexVec>& eu_beams_init,
                                          const ScaConfig& cfg, int ao_round,
                                          const std::vector<int>* fixed_alpha,
                                          int* restorations,
                                          std::vector<IterationRecord>& trace);

/// Full per-slot optimization: alternate the two blocks, round the schedule,
/// re-solve the beams at the fixed binary schedule, and verify the true
/// constraints. rng drives the random unit-modulus initialization.
SlotDecision alternating_optimize(const SlotProblem& slot, const ScaConfig& cfg,
                                  RngStream& rng);

/// Beam-block-only variant used by the random-phase policy: the reflection
/// vector is pinned, everything else follows alternating_optimize.
SlotDecision optimize_with_fixed_phase(const SlotProblem& slot, const ComplexVec& rho,
                                       const ScaConfig& cfg);

/// Picks up to max_scheduled streams with positive weight and positive relaxed
/// value, ordered by relaxed value, then weight, then index.
std::vector<int> round_schedule(const std::vector<double>& alpha_relaxed,
                                const std::vector<double>& weights, int max_scheduled);

/// Best schedule objective attainable at fixed (rho, beams) against the true
/// (non-surrogate) constraints; -inf when a harvest constraint fails.
double true_schedule_objective(const SlotProblem& slot, const ComplexVec& rho,
                               const std::vector<ComplexVec>& iu_beams,
                               const std::vector<ComplexVec>& eu_beams,
                               double feasibility_slack = 1e-6,
                               bool* harvest_ok = nullptr);

ComplexVec project_unit_modulus(const ComplexVec& rho);

// ---- surrogate validity -------------------------------------------------------

enum class SurrogateKind { snr, eh, penalty };

// Convexity-bound certificate for one surrogate pair (F, F~): value match and
// finite-difference gradient match at the expansion point, F <= F~ at sampled
// feasible points.
struct SurrogateReport {
    double value_error = 0.0;
    double gradient_error = 0.0;   // relative, infinity norm
    double bound_violation = 0.0;  // max of F - F~ over samples
    bool value_match = false;
    bool gradient_match = false;
    bool bound_holds = false;
    bool pass() const { return value_match && gradient_match && bound_holds; }
};

/// Checks the phase-side surrogate of the given kind at expansion point rho0.
/// user_index selects the IU (snr) or EU (eh); ignored for penalty.
SurrogateReport verify_surrogate(SurrogateKind kind, const SlotProblem& slot,
                                 const std::vector<ComplexVec>& iu_beams,
                                 const std::vector<ComplexVec>& eu_beams,
                                 const ComplexVec& rho0, int user_index, double penalty_c,
                                 int samples, RngStream& rng);

/// Beam-side counterpart at expansion (iu_beams0, eu_beams0) and fixed rho.
SurrogateReport verify_beam_surrogate(SurrogateKind kind, const SlotProblem& slot,
                                      const ComplexVec& rho,
                                      const std::vector<ComplexVec>& iu_beams0,
                                      const std::vector<ComplexVec>& eu_beams0,
                                      int user_index, int samples, RngStream& rng);

}  // namespace aoiris
