#include "aoiris/sca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aoiris {

SolveOptions ScaConfig::default_solver_options() {
    SolveOptions o;
    // tighter than the monotonicity slack asserted on the objective traces
    o.tol_feas = 1e-7;
    o.tol_gap = 1e-7;
    o.max_iters = 40000;
    return o;
}

void ScaConfig::validate() const {
    if (penalty_growth <= 1.0) throw std::invalid_argument("penalty_growth must exceed 1");
    if (penalty_c0_scale <= 0.0) throw std::invalid_argument("penalty_c0_scale must be positive");
    if (eps_phase <= 0.0 || eps_beam <= 0.0 || eps_ao <= 0.0) {
        throw std::invalid_argument("sca tolerances must be positive");
    }
    if (penalty_rounds < 1 || max_phase_iters < 1 || max_beam_iters < 1 || max_ao_rounds < 1) {
        throw std::invalid_argument("sca iteration caps must be at least 1");
    }
    if (unit_modulus_tol <= 0.0) throw std::invalid_argument("unit_modulus_tol must be positive");
}

double SlotProblem::weight_sum() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void SlotProblem::validate() const {
    if (weights.size() != iu.size()) {
        throw std::invalid_argument("SlotProblem: weights/iu size mismatch");
    }
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw std::invalid_argument("SlotProblem: negative weight signals an upstream state bug");
        }
    }
    if (max_scheduled < 0) throw std::invalid_argument("SlotProblem: negative channel count");
    if (power_budget <= 0.0) throw std::invalid_argument("SlotProblem: nonpositive power budget");
    if (noise_power <= 0.0) throw std::invalid_argument("SlotProblem: nonpositive noise power");
    if (gamma_th < 0.0 || harvest_min < 0.0) {
        throw std::invalid_argument("SlotProblem: negative threshold");
    }
    const int nt = n_tx(), ns = n_ris();
    for (const auto& f : iu) {
        if (f.direct.size() != nt || f.reflect.rows() != ns || f.reflect.cols() != nt) {
            throw std::invalid_argument("SlotProblem: inconsistent IU channel dims");
        }
    }
    for (const auto& f : eu) {
        if (f.direct.size() != nt || f.reflect.rows() != ns || f.reflect.cols() != nt) {
            throw std::invalid_argument("SlotProblem: inconsistent EU channel dims");
        }
    }
}

ComplexVec PhaseProblem::extract_rho(const RealVec& x) const {
    ComplexVec rho(n_ris);
    for (int n = 0; n < n_ris; ++n) {
        rho[n] = cxd(x[re_index(n)], x[im_index(n)]);
    }
    return rho;
}

std::vector<double> PhaseProblem::extract_alpha(const RealVec& x) const {
    std::vector<double> a(static_cast<size_t>(num_iu));
    for (int i = 0; i < num_iu; ++i) a[static_cast<size_t>(i)] = x[alpha_index(i)];
    return a;
}

std::vector<double> BeamProblem::extract_alpha(const RealVec& x) const {
    if (!has_alpha) return {};
    std::vector<double> a(static_cast<size_t>(num_iu));
    for (int i = 0; i < num_iu; ++i) a[static_cast<size_t>(i)] = x[i];
    return a;
}

std::vector<ComplexVec> BeamProblem::extract_iu_beams(const RealVec& x) const {
    std::vector<ComplexVec> w(static_cast<size_t>(num_iu), ComplexVec::Zero(n_tx));
    for (int i = 0; i < num_iu; ++i) {
        const int off = w_offsets[static_cast<size_t>(i)];
        if (off >= 0) w[static_cast<size_t>(i)] = unstack_complex(x.segment(off, 2 * n_tx));
    }
    return w;
}

std::vector<ComplexVec> BeamProblem::extract_eu_beams(const RealVec& x) const {
    std::vector<ComplexVec> v(static_cast<size_t>(num_eu), ComplexVec::Zero(n_tx));
    for (int j = 0; j < num_eu; ++j) {
        const int off = v_offsets[static_cast<size_t>(j)];
        if (off >= 0) v[static_cast<size_t>(j)] = unstack_complex(x.segment(off, 2 * n_tx));
    }
    return v;
}

namespace {

double modulus_defect(const ComplexVec& rho) {
    double worst = 0.0;
    for (Eigen::Index n = 0; n < rho.size(); ++n) {
        worst = std::max(worst, std::abs(1.0 - std::abs(rho[n])));
    }
    return worst;
}

// Penalized schedule objective of the phase subproblem at a concrete iterate.
double phase_true_objective(const SlotProblem& slot, const std::vector<double>& alpha,
                            const ComplexVec& rho, double penalty_c) {
    double obj = 0.0;
    for (int i = 0; i < slot.num_iu(); ++i) {
        obj += slot.weights[static_cast<size_t>(i)] * alpha[static_cast<size_t>(i)];
    }
    obj += penalty_c * (rho.squaredNorm() - static_cast<double>(rho.size()));
    return obj;
}

double schedule_objective(const SlotProblem& slot, const std::vector<double>& alpha) {
    double obj = 0.0;
    for (int i = 0; i < slot.num_iu(); ++i) {
        obj += slot.weights[static_cast<size_t>(i)] * alpha[static_cast<size_t>(i)];
    }
    return obj;
}

bool harvest_satisfied(const SlotProblem& slot, const ComplexVec& rho,
                       const std::vector<ComplexVec>& eu_beams, double slack) {
    for (int j = 0; j < slot.num_eu(); ++j) {
        const ComplexVec g = slot.eu[static_cast<size_t>(j)].composite(rho);
        const double e = std::norm(hermitian_product(g, eu_beams[static_cast<size_t>(j)]));
        if (e < slot.harvest_min * (1.0 - slack)) return false;
    }
    return true;
}

// Solver-tolerance overshoot guards: iterates feed the next expansion point,
// which must sit inside the true feasible set.
ComplexVec clamp_polydisc(ComplexVec rho) {
    for (Eigen::Index n = 0; n < rho.size(); ++n) {
        const double mag = std::abs(rho[n]);
        if (mag > 1.0) rho[n] /= mag;
    }
    return rho;
}

void clamp_power(std::vector<ComplexVec>& iu_beams, std::vector<ComplexVec>& eu_beams,
                 double budget) {
    double used = 0.0;
    for (const auto& w : iu_beams) used += w.squaredNorm();
    for (const auto& v : eu_beams) used += v.squaredNorm();
    if (used > budget && used > 0.0) {
        const double s = std::sqrt(budget / used);
        for (auto& w : iu_beams) w *= s;
        for (auto& v : eu_beams) v *= s;
    }
}

// Equal-split maximum-ratio start: buffered IUs and all EUs share
// init_fraction of the budget.
void mrt_split_init(const SlotProblem& slot, const ComplexVec& rho,
                    std::vector<ComplexVec>& iu_beams, std::vector<ComplexVec>& eu_beams,
                    double init_fraction = 0.99) {
    const int nt = slot.n_tx();
    iu_beams.assign(static_cast<size_t>(slot.num_iu()), ComplexVec::Zero(nt));
    eu_beams.assign(static_cast<size_t>(slot.num_eu()), ComplexVec::Zero(nt));
    int shares = slot.num_eu();
    for (int i = 0; i < slot.num_iu(); ++i) {
        if (slot.buffered(i)) ++shares;
    }
    if (shares == 0) return;
    const double p = init_fraction * slot.power_budget / shares;
    for (int i = 0; i < slot.num_iu(); ++i) {
        if (!slot.buffered(i)) continue;
        const ComplexVec h = slot.iu[static_cast<size_t>(i)].composite(rho);
        const double nrm = h.norm();
        if (nrm > 0.0) iu_beams[static_cast<size_t>(i)] = std::sqrt(p) / nrm * h;
    }
    for (int j = 0; j < slot.num_eu(); ++j) {
        const ComplexVec g = slot.eu[static_cast<size_t>(j)].composite(rho);
        const double nrm = g.norm();
        if (nrm > 0.0) eu_beams[static_cast<size_t>(j)] = std::sqrt(p) / nrm * g;
    }
}

constexpr double kMarginCap = 10.0;
constexpr double kRestorationCap = 1e3;

}  // namespace

PhaseProblem build_phase_schedule_problem(const SlotProblem& slot,
                                          const std::vector<ComplexVec>& iu_beams,
                                          const std::vector<ComplexVec>& eu_beams,
                                          const ComplexVec& rho0, double penalty_c,
                                          bool restoration) {
    slot.validate();
    const int ui = slot.num_iu(), ue = slot.num_eu(), ns = slot.n_ris();
    if (static_cast<int>(iu_beams.size()) != ui || static_cast<int>(eu_beams.size()) != ue) {
        throw std::invalid_argument("build_phase_schedule_problem: beam count mismatch");
    }
    if (rho0.size() != ns) {
        throw std::invalid_argument("build_phase_schedule_problem: rho0 length mismatch");
    }
    for (Eigen::Index n = 0; n < rho0.size(); ++n) {
        if (std::abs(rho0[n]) > 1.0 + 1e-9) {
            throw std::invalid_argument("build_phase_schedule_problem: expansion point outside unit polydisc");
        }
    }

    PhaseProblem pp;
    pp.num_iu = ui;
    pp.n_ris = ns;
    const int nvars = ui + 2 * ns + (restoration ? 1 : 0);
    pp.problem.resize(nvars);
    if (restoration) pp.margin_index = nvars - 1;

    auto& p = pp.problem;
    for (int i = 0; i < ui; ++i) {
        p.var_lower[i] = 0.0;
        p.var_upper[i] = 1.0;
    }
    if (restoration) {
        p.var_lower[pp.margin_index] = -kRestorationCap;
        p.var_upper[pp.margin_index] = kRestorationCap;
        p.objective[pp.margin_index] = 1.0;
    } else {
        for (int i = 0; i < ui; ++i) p.objective[i] = slot.weights[static_cast<size_t>(i)];
        for (int n = 0; n < ns; ++n) {
            p.objective[pp.re_index(n)] = 2.0 * penalty_c * rho0[n].real();
            p.objective[pp.im_index(n)] = 2.0 * penalty_c * rho0[n].imag();
        }
        p.objective_constant = -penalty_c * (rho0.squaredNorm() + static_cast<double>(ns));
    }

    {
        RealVec sched = RealVec::Zero(nvars);
        for (int i = 0; i < ui; ++i) sched[i] = 1.0;
        p.add_row(std::move(sched), -kInf, static_cast<double>(slot.max_scheduled), "schedule_cap");
    }

    // rows with a zero requirement are vacuous in the true problem and skipped
    const double snr_rhs_coeff = slot.gamma_th * slot.noise_power;
    for (int i = 0; i < ui && snr_rhs_coeff > 0.0; ++i) {
        if (!slot.buffered(i)) continue;
        const auto& f = slot.iu[static_cast<size_t>(i)];
        const ComplexVec& w = iu_beams[static_cast<size_t>(i)];
        const ComplexVec t = f.reflect * w;                      // reflected amplitude per element
        const cxd c0 = hermitian_product(f.composite(rho0), w);  // received amplitude at rho0
        RealVec row = RealVec::Zero(nvars);
        for (int n = 0; n < ns; ++n) {
            const cxd z = std::conj(c0) * t[n];
            row[pp.re_index(n)] = 2.0 * z.real();
            row[pp.im_index(n)] = 2.0 * z.imag();
        }
        row[i] = -snr_rhs_coeff;
        const double rhs = 2.0 * (std::conj(c0) * hermitian_product(rho0, t)).real() - std::norm(c0);
        p.add_row(std::move(row), rhs, kInf, "snr_" + std::to_string(i));
    }

    const double q_scale = std::max(slot.harvest_min, 1e-12);
    for (int j = 0; j < ue && slot.harvest_min > 0.0; ++j) {
        const auto& f = slot.eu[static_cast<size_t>(j)];
        const ComplexVec& v = eu_beams[static_cast<size_t>(j)];
        const ComplexVec s = f.reflect * v;
        const cxd e0 = hermitian_product(f.composite(rho0), v);
        RealVec row = RealVec::Zero(nvars);
        for (int n = 0; n < ns; ++n) {
            const cxd z = std::conj(e0) * s[n];
            row[pp.re_index(n)] = 2.0 * z.real();
            row[pp.im_index(n)] = 2.0 * z.imag();
        }
        if (restoration) row[pp.margin_index] = -q_scale;
        const double rhs = slot.harvest_min +
                           2.0 * (std::conj(e0) * hermitian_product(rho0, s)).real() -
                           std::norm(e0);
        p.add_row(std::move(row), rhs, kInf, "eh_" + std::to_string(j));
    }

    for (int n = 0; n < ns; ++n) {
        RealMat a = RealMat::Zero(2, nvars);
        a(0, pp.re_index(n)) = 1.0;
        a(1, pp.im_index(n)) = 1.0;
        p.add_soc(std::move(a), RealVec::Zero(2), RealVec::Zero(nvars), 1.0,
                  "disc_" + std::to_string(n));
    }
    return pp;
}

BeamProblem build_beam_schedule_problem(const SlotProblem& slot, const ComplexVec& rho,
                                        const std::vector<ComplexVec>& iu_beams0,
                                        const std::vector<ComplexVec>& eu_beams0,
                                        BeamMode mode, const std::vector<int>* fixed_alpha) {
    slot.validate();
    const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx();
    if (static_cast<int>(iu_beams0.size()) != ui || static_cast<int>(eu_beams0.size()) != ue) {
        throw std::invalid_argument("build_beam_schedule_problem: beam count mismatch");
    }
    if (rho.size() != slot.n_ris()) {
        throw std::invalid_argument("build_beam_schedule_problem: rho length mismatch");
    }
    if (mode == BeamMode::margin && fixed_alpha == nullptr) {
        throw std::invalid_argument("build_beam_schedule_problem: margin mode needs a fixed schedule");
    }
    {
        double used = 0.0;
        for (const auto& w : iu_beams0) used += w.squaredNorm();
        for (const auto& v : eu_beams0) used += v.squaredNorm();
        if (used > slot.power_budget * (1.0 + 1e-6)) {
            throw std::invalid_argument("build_beam_schedule_problem: expansion point over budget");
        }
    }

    BeamProblem bp;
    bp.num_iu = ui;
    bp.num_eu = ue;
    bp.n_tx = nt;
    bp.has_alpha = (mode != BeamMode::margin);
    bp.w_offsets.assign(static_cast<size_t>(ui), -1);
    bp.v_offsets.assign(static_cast<size_t>(ue), -1);

    // in margin mode only scheduled streams keep a beam variable
    int off = bp.has_alpha ? ui : 0;
    for (int i = 0; i < ui; ++i) {
        const bool wants_beam =
            (mode == BeamMode::margin)
                ? (slot.buffered(i) && (*fixed_alpha)[static_cast<size_t>(i)] == 1)
                : slot.buffered(i);
        if (wants_beam) {
            bp.w_offsets[static_cast<size_t>(i)] = off;
            off += 2 * nt;
        }
    }
    for (int j = 0; j < ue; ++j) {
        bp.v_offsets[static_cast<size_t>(j)] = off;
        off += 2 * nt;
    }
    const bool has_margin = (mode != BeamMode::schedule);
    if (has_margin) bp.margin_index = off++;
    const int nvars = off;
    bp.problem.resize(nvars);
    auto& p = bp.problem;

    if (bp.has_alpha) {
        for (int i = 0; i < ui; ++i) {
            p.var_lower[i] = 0.0;
            p.var_upper[i] = 1.0;
        }
        RealVec sched = RealVec::Zero(nvars);
        for (int i = 0; i < ui; ++i) sched[i] = 1.0;
        p.add_row(std::move(sched), -kInf, static_cast<double>(slot.max_scheduled), "schedule_cap");
    }
    if (has_margin) {
        p.var_lower[bp.margin_index] = (mode == BeamMode::margin) ? -kMarginCap : -kRestorationCap;
        p.var_upper[bp.margin_index] = (mode == BeamMode::margin) ? kMarginCap : kRestorationCap;
        p.objective[bp.margin_index] = 1.0;
    } else {
        for (int i = 0; i < ui; ++i) p.objective[i] = slot.weights[static_cast<size_t>(i)];
    }

    // rows with a zero requirement are vacuous in the true problem and skipped
    const double snr_rhs_coeff = slot.gamma_th * slot.noise_power;
    for (int i = 0; i < ui && snr_rhs_coeff > 0.0; ++i) {
        const int wo = bp.w_offsets[static_cast<size_t>(i)];
        if (wo < 0) continue;
        const auto& f = slot.iu[static_cast<size_t>(i)];
        const ComplexVec h = f.composite(rho);
        const cxd phi0 = hermitian_product(h, iu_beams0[static_cast<size_t>(i)]);
        RealVec row = RealVec::Zero(nvars);
        for (int k = 0; k < nt; ++k) {
            const cxd z = std::conj(phi0) * std::conj(h[k]);
            row[wo + k] = 2.0 * z.real();
            row[wo + nt + k] = -2.0 * z.imag();
        }
        double rhs = std::norm(phi0);
        if (mode == BeamMode::margin) {
            rhs += snr_rhs_coeff;  // schedule is binary here and this stream carries 1
            row[bp.margin_index] = -snr_rhs_coeff;
        } else {
            row[i] = -snr_rhs_coeff;
        }
        p.add_row(std::move(row), rhs, kInf, "snr_" + std::to_string(i));
    }

    const double q_scale = std::max(slot.harvest_min, 1e-12);
    for (int j = 0; j < ue && slot.harvest_min > 0.0; ++j) {
        const auto& f = slot.eu[static_cast<size_t>(j)];
        const ComplexVec g = f.composite(rho);
        const cxd psi0 = hermitian_product(g, eu_beams0[static_cast<size_t>(j)]);
        RealVec row = RealVec::Zero(nvars);
        const int vo = bp.v_offsets[static_cast<size_t>(j)];
        for (int k = 0; k < nt; ++k) {
            const cxd z = std::conj(psi0) * std::conj(g[k]);
            row[vo + k] = 2.0 * z.real();
            row[vo + nt + k] = -2.0 * z.imag();
        }
        if (mode == BeamMode::restoration) {
            row[bp.margin_index] = -q_scale;
        } else if (mode == BeamMode::margin) {
            row[bp.margin_index] = -slot.harvest_min;
        }
        const double rhs = slot.harvest_min + std::norm(psi0);
        p.add_row(std::move(row), rhs, kInf, "eh_" + std::to_string(j));
    }

    {
        // total transmit power cone over every beam coordinate
        int beam_coords = 0;
        for (int i = 0; i < ui; ++i) {
            if (bp.w_offsets[static_cast<size_t>(i)] >= 0) beam_coords += 2 * nt;
        }
        beam_coords += 2 * nt * ue;
        if (beam_coords > 0) {
            RealMat a = RealMat::Zero(beam_coords, nvars);
            int r = 0;
            for (int i = 0; i < ui; ++i) {
                const int wo = bp.w_offsets[static_cast<size_t>(i)];
                if (wo < 0) continue;
                for (int k = 0; k < 2 * nt; ++k) a(r++, wo + k) = 1.0;
            }
            for (int j = 0; j < ue; ++j) {
                const int vo = bp.v_offsets[static_cast<size_t>(j)];
                for (int k = 0; k < 2 * nt; ++k) a(r++, vo + k) = 1.0;
            }
            p.add_soc(std::move(a), RealVec::Zero(beam_coords), RealVec::Zero(nvars),
                      std::sqrt(slot.power_budget), "power");
        }
    }
    return bp;
}

namespace {

// Shared bookkeeping for one SCA loop: solve, accept usable iterates, fall
// back to a restoration solve on infeasibility.
struct SolveOutcome {
    bool usable = false;
    bool infeasible = false;
    ConicSolution sol;
};

SolveOutcome run_solve(const ConicProblem& problem, const SolveOptions& opts,
                       const WarmStart* warm) {
    SolveOutcome out;
    out.sol = solve(problem, opts, warm);
    if (out.sol.status == SolveStatus::optimal) {
        out.usable = true;
    } else if (out.sol.status == SolveStatus::iteration_limit) {
        // a near-feasible limit point still works as the next expansion point
        out.usable = out.sol.primal_residual <= 50.0 * opts.tol_feas &&
                     out.sol.dual_residual <= 50.0 * opts.tol_feas &&
                     out.sol.duality_gap <= 1e-3;
    } else if (out.sol.status == SolveStatus::infeasible) {
        out.infeasible = true;
    }
    return out;
}

}  // namespace

PhaseScheduleResult optimize_phase_schedule(const SlotProblem& slot,
                                            const std::vector<ComplexVec>& iu_beams,
                                            const std::vector<ComplexVec>& eu_beams,
                                            const ComplexVec& rho_init, const ScaConfig& cfg,
                                            int ao_round, int* restorations,
                                            std::vector<IterationRecord>& trace) {
    PhaseScheduleResult res;
    res.rho = rho_init;
    res.alpha.assign(static_cast<size_t>(slot.num_iu()), 0.0);
    if (slot.n_ris() == 0) return res;

    int restores = 0;
    auto restore = [&](int penalty_round) -> bool {
        PhaseProblem rp = build_phase_schedule_problem(slot, iu_beams, eu_beams, res.rho,
                                                       0.0, /*restoration=*/true);
        const auto out = run_solve(rp.problem, cfg.solver, nullptr);
        trace.push_back({IterationRecord::Phase::restoration, ao_round, penalty_round, 0, 0.0,
                         out.usable ? out.sol.x[rp.margin_index] : 0.0, out.sol.status,
                         out.sol.iterations});
        ++restores;
        if (restorations != nullptr) ++(*restorations);
        if (!out.usable) return false;
        res.rho = clamp_polydisc(rp.extract_rho(out.sol.x));
        res.alpha = rp.extract_alpha(out.sol.x);
        return true;
    };

    // move to a point with satisfied harvest rows before expanding around it
    if (!harvest_satisfied(slot, res.rho, eu_beams, cfg.feasibility_slack)) {
        restore(0);
    }

    double penalty_c = cfg.penalty_c0_scale * (slot.weight_sum() + 1.0);
    WarmStart warm;
    bool have_warm = false;
    bool progressed = false;

    for (int round = 1; round <= cfg.penalty_rounds; ++round) {
        double prev_obj = std::numeric_limits<double>::quiet_NaN();
        for (int it = 1; it <= cfg.max_phase_iters; ++it) {
            PhaseProblem pp =
                build_phase_schedule_problem(slot, iu_beams, eu_beams, res.rho, penalty_c);
            const auto out = run_solve(pp.problem, cfg.solver, have_warm ? &warm : nullptr);
            if (out.infeasible) {
                have_warm = false;
                if (restores >= 2 || !restore(round)) return res;  // keep last iterate
                continue;
            }
            if (!out.usable) {
                res.ok = progressed;
                return res;
            }
            res.rho = clamp_polydisc(pp.extract_rho(out.sol.x));
            res.alpha = pp.extract_alpha(out.sol.x);
            const double obj = phase_true_objective(slot, res.alpha, res.rho, penalty_c);
            trace.push_back({IterationRecord::Phase::phase_schedule, ao_round, round, it,
                             penalty_c, obj, out.sol.status, out.sol.iterations});
            warm = {out.sol.x, out.sol.dual_y, out.sol.slack_s};
            have_warm = true;
            progressed = true;
            if (!std::isnan(prev_obj) &&
                std::abs(obj - prev_obj) <= cfg.eps_phase * std::max(1.0, std::abs(prev_obj))) {
                break;
            }
            prev_obj = obj;
        }
        if (modulus_defect(res.rho) <= cfg.unit_modulus_tol) break;
        penalty_c *= cfg.penalty_growth;
    }
    res.ok = progressed;
    return res;
}

BeamScheduleResult optimize_beam_schedule(const SlotProblem& slot, const ComplexVec& rho,
                                          const std::vector<ComplexVec>& iu_beams_init,
                                          const std::vector<ComplexVec>& eu_beams_init,
                                          const ScaConfig& cfg, int ao_round,
                                          const std::vector<int>* fixed_alpha,
                                          int* restorations,
                                          std::vector<IterationRecord>& trace) {
    BeamScheduleResult res;
    res.iu_beams = iu_beams_init;
    res.eu_beams = eu_beams_init;
    res.alpha.assign(static_cast<size_t>(slot.num_iu()), 0.0);
    const BeamMode mode = (fixed_alpha != nullptr) ? BeamMode::margin : BeamMode::schedule;
    const auto phase_tag = (fixed_alpha != nullptr) ? IterationRecord::Phase::final_resolve
                                                    : IterationRecord::Phase::beamforming;

    int restores = 0;
    auto restore = [&]() -> bool {
        BeamProblem rp = build_beam_schedule_problem(slot, rho, res.iu_beams, res.eu_beams,
                                                     BeamMode::restoration, nullptr);
        const auto out = run_solve(rp.problem, cfg.solver, nullptr);
        trace.push_back({IterationRecord::Phase::restoration, ao_round, 0, 0, 0.0,
                         out.usable ? out.sol.x[rp.margin_index] : 0.0, out.sol.status,
                         out.sol.iterations});
        ++restores;
        if (restorations != nullptr) ++(*restorations);
        if (!out.usable) return false;
        res.iu_beams = rp.extract_iu_beams(out.sol.x);
        res.eu_beams = rp.extract_eu_beams(out.sol.x);
        res.alpha = rp.extract_alpha(out.sol.x);
        clamp_power(res.iu_beams, res.eu_beams, slot.power_budget);
        return true;
    };

    if (!harvest_satisfied(slot, rho, res.eu_beams, cfg.feasibility_slack)) {
        restore();
    }

    WarmStart warm;
    bool have_warm = false;
    bool progressed = false;
    double prev_obj = std::numeric_limits<double>::quiet_NaN();

    for (int it = 1; it <= cfg.max_beam_iters; ++it) {
        BeamProblem bp = build_beam_schedule_problem(slot, rho, res.iu_beams, res.eu_beams,
                                                     mode, fixed_alpha);
        const auto out = run_solve(bp.problem, cfg.solver, have_warm ? &warm : nullptr);
        if (out.infeasible) {
            have_warm = false;
            if (restores >= 2 || !restore()) {
                res.ok = progressed;
                return res;
            }
            continue;
        }
        if (!out.usable) {
            res.ok = progressed;
            return res;
        }
        res.iu_beams = bp.extract_iu_beams(out.sol.x);
        res.eu_beams = bp.extract_eu_beams(out.sol.x);
        clamp_power(res.iu_beams, res.eu_beams, slot.power_budget);
        double obj;
        if (mode == BeamMode::margin) {
            res.margin = out.sol.x[bp.margin_index];
            obj = res.margin;
        } else {
            res.alpha = bp.extract_alpha(out.sol.x);
            obj = schedule_objective(slot, res.alpha);
        }
        trace.push_back({phase_tag, ao_round, 0, it, 0.0, obj, out.sol.status,
                         out.sol.iterations});
        warm = {out.sol.x, out.sol.dual_y, out.sol.slack_s};
        have_warm = true;
        progressed = true;
        if (!std::isnan(prev_obj) &&
            std::abs(obj - prev_obj) <= cfg.eps_beam * std::max(1.0, std::abs(prev_obj))) {
            break;
        }
        prev_obj = obj;
    }
    res.ok = progressed;
    return res;
}

std::vector<int> round_schedule(const std::vector<double>& alpha_relaxed,
                                const std::vector<double>& weights, int max_scheduled) {
    if (alpha_relaxed.size() != weights.size()) {
        throw std::invalid_argument("round_schedule: size mismatch");
    }
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
        if (weights[static_cast<size_t>(i)] > 0.0 && alpha_relaxed[static_cast<size_t>(i)] > 1e-9) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto ia = static_cast<size_t>(a), ib = static_cast<size_t>(b);
        if (alpha_relaxed[ia] != alpha_relaxed[ib]) return alpha_relaxed[ia] > alpha_relaxed[ib];
        if (weights[ia] != weights[ib]) return weights[ia] > weights[ib];
        return a < b;
    });
    std::vector<int> binary(weights.size(), 0);
    const int take = std::min<int>(max_scheduled, static_cast<int>(order.size()));
    for (int k = 0; k < take; ++k) binary[static_cast<size_t>(order[static_cast<size_t>(k)])] = 1;
    return binary;
}

double true_schedule_objective(const SlotProblem& slot, const ComplexVec& rho,
                               const std::vector<ComplexVec>& iu_beams,
                               const std::vector<ComplexVec>& eu_beams,
                               double feasibility_slack, bool* harvest_ok) {
    const bool eh = harvest_satisfied(slot, rho, eu_beams, feasibility_slack);
    if (harvest_ok != nullptr) *harvest_ok = eh;
    if (!eh) return -kInf;

    // caps alpha_i <= |h^H w|^2 / (gamma_th sigma^2); a single budget row makes
    // the weight-greedy fill exact
    std::vector<int> order(static_cast<size_t>(slot.num_iu()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (slot.weights[static_cast<size_t>(a)] != slot.weights[static_cast<size_t>(b)]) {
            return slot.weights[static_cast<size_t>(a)] > slot.weights[static_cast<size_t>(b)];
        }
        return a < b;
    });
    double budget = static_cast<double>(slot.max_scheduled);
    double obj = 0.0;
    for (int i : order) {
        if (!slot.buffered(i) || budget <= 0.0) continue;
        const ComplexVec h = slot.iu[static_cast<size_t>(i)].composite(rho);
        const double snr_num = std::norm(hermitian_product(h, iu_beams[static_cast<size_t>(i)]));
        double cap = 1.0;
        const double need = slot.gamma_th * slot.noise_power;
        if (need > 0.0) cap = std::min(1.0, snr_num / need);
        const double a = std::min(cap, budget);
        obj += slot.weights[static_cast<size_t>(i)] * a;
        budget -= a;
    }
    return obj;
}

ComplexVec project_unit_modulus(const ComplexVec& rho) {
    ComplexVec out(rho.size());
    for (Eigen::Index n = 0; n < rho.size(); ++n) {
        const double mag = std::abs(rho[n]);
        out[n] = (mag > 1e-12) ? rho[n] / mag : cxd(1.0, 0.0);
    }
    return out;
}

namespace {

ComplexVec random_unit_phases(int n, RngStream& rng) {
    ComplexVec rho(n);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * M_PI * rng.uniform();
        rho[i] = cxd(std::cos(theta), std::sin(theta));
    }
    return rho;
}

// Rounding, fixed-schedule margin re-solve, and the true-constraint audit
// shared by the full pipeline and the fixed-phase variant.
void finalize_decision(const SlotProblem& slot, const ScaConfig& cfg, SlotDecision& dec,
                       std::vector<ComplexVec> iu_beams, std::vector<ComplexVec> eu_beams) {
    const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx();
    dec.unit_modulus_violation = modulus_defect(dec.ris_phase);
    dec.ris_phase = project_unit_modulus(dec.ris_phase);
    dec.alpha = round_schedule(dec.alpha_relaxed, slot.weights, slot.max_scheduled);

    const double slack = cfg.feasibility_slack;
    while (true) {
        const bool any_scheduled =
            std::any_of(dec.alpha.begin(), dec.alpha.end(), [](int a) { return a == 1; });
        if (!any_scheduled && ue == 0) {
            dec.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
            dec.eu_beams.clear();
            dec.feasible = true;
            return;
        }
        auto rr = optimize_beam_schedule(slot, dec.ris_phase, iu_beams, eu_beams, cfg,
                                         dec.ao_rounds, &dec.alpha, &dec.restorations,
                                         dec.trace);
        if (rr.ok) {
            iu_beams = rr.iu_beams;
            eu_beams = rr.eu_beams;
        }
        if (harvest_satisfied(slot, dec.ris_phase, eu_beams, slack)) {
            // drop any scheduled stream whose realized SNR misses the margin
            for (int i = 0; i < ui; ++i) {
                if (dec.alpha[static_cast<size_t>(i)] == 0) {
                    iu_beams[static_cast<size_t>(i)] = ComplexVec::Zero(nt);
                    continue;
                }
                const ComplexVec h = slot.iu[static_cast<size_t>(i)].composite(dec.ris_phase);
                const double snr =
                    std::norm(hermitian_product(h, iu_beams[static_cast<size_t>(i)])) /
                    slot.noise_power;
                if (snr < slot.gamma_th * (1.0 - slack)) {
                    dec.alpha[static_cast<size_t>(i)] = 0;
                    iu_beams[static_cast<size_t>(i)] = ComplexVec::Zero(nt);
                }
            }
            dec.iu_beams = std::move(iu_beams);
            dec.eu_beams = std::move(eu_beams);
            dec.feasible = true;
            return;
        }
        // harvest failed: free power by unscheduling the lowest-priority stream
        int drop = -1;
        for (int i = ui - 1; i >= 0; --i) {
            if (dec.alpha[static_cast<size_t>(i)] == 1 &&
                (drop < 0 || slot.weights[static_cast<size_t>(i)] <
                                 slot.weights[static_cast<size_t>(drop)])) {
                drop = i;
            }
        }
        if (drop < 0) {
            // nothing left to drop: the slot is infeasible, transmit nothing
            dec.alpha.assign(static_cast<size_t>(ui), 0);
            dec.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
            dec.eu_beams.assign(static_cast<size_t>(ue), ComplexVec::Zero(nt));
            dec.feasible = false;
            return;
        }
        dec.alpha[static_cast<size_t>(drop)] = 0;
        iu_beams[static_cast<size_t>(drop)] = ComplexVec::Zero(nt);
    }
}

void fill_final_objective(const SlotProblem& slot, SlotDecision& dec) {
    dec.objective = 0.0;
    for (int i = 0; i < slot.num_iu(); ++i) {
        dec.objective += slot.weights[static_cast<size_t>(i)] * dec.alpha[static_cast<size_t>(i)];
    }
}

}  // namespace

SlotDecision alternating_optimize(const SlotProblem& slot, const ScaConfig& cfg,
                                  RngStream& rng) {
    slot.validate();
    cfg.validate();
    const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx(), ns = slot.n_ris();

    SlotDecision dec;
    dec.alpha_relaxed.assign(static_cast<size_t>(ui), 0.0);
    dec.alpha.assign(static_cast<size_t>(ui), 0);
    dec.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
    dec.eu_beams.assign(static_cast<size_t>(ue), ComplexVec::Zero(nt));
    dec.ris_phase = random_unit_phases(ns, rng);

    const bool any_buffered = slot.weight_sum() > 0.0;
    if (!any_buffered && ue == 0) {
        dec.feasible = true;
        return dec;
    }

    std::vector<ComplexVec> w, v;
    mrt_split_init(slot, dec.ris_phase, w, v);

    if (any_buffered) {
        double g_prev =
            true_schedule_objective(slot, dec.ris_phase, w, v, cfg.feasibility_slack);
        double g_round_prev = g_prev;
        const auto accept_floor = [](double g) {
            return g - 1e-9 * std::max(1.0, std::abs(g));
        };
        int ao = 1;
        for (; ao <= cfg.max_ao_rounds; ++ao) {
            if (ns > 0) {
                auto pr = optimize_phase_schedule(slot, w, v, dec.ris_phase, cfg, ao,
                                                  &dec.restorations, dec.trace);
                if (pr.ok) {
                    const double g_new = true_schedule_objective(slot, pr.rho, w, v,
                                                                 cfg.feasibility_slack);
                    if (g_new >= accept_floor(g_prev)) {
                        dec.ris_phase = pr.rho;
                        dec.alpha_relaxed = pr.alpha;
                        g_prev = g_new;
                    }
                }
            }
            auto br = optimize_beam_schedule(slot, dec.ris_phase, w, v, cfg, ao, nullptr,
                                             &dec.restorations, dec.trace);
            if (br.ok) {
                const double g_new = true_schedule_objective(slot, dec.ris_phase, br.iu_beams,
                                                             br.eu_beams, cfg.feasibility_slack);
                if (g_new >= accept_floor(g_prev)) {
                    w = br.iu_beams;
                    v = br.eu_beams;
                    dec.alpha_relaxed = br.alpha;
                    g_prev = g_new;
                }
            }
            if (std::isfinite(g_prev) && std::isfinite(g_round_prev) &&
                std::abs(g_prev - g_round_prev) <=
                    cfg.eps_ao * std::max(1.0, std::abs(g_round_prev))) {
                break;
            }
            g_round_prev = g_prev;
        }
        dec.ao_rounds = std::min(ao, cfg.max_ao_rounds);
    }

    finalize_decision(slot, cfg, dec, w, v);
    fill_final_objective(slot, dec);
    return dec;
}

SlotDecision optimize_with_fixed_phase(const SlotProblem& slot, const ComplexVec& rho,
                                       const ScaConfig& cfg) {
    slot.validate();
    cfg.validate();
    const int ui = slot.num_iu(), ue = slot.num_eu(), nt = slot.n_tx();

    SlotDecision dec;
    dec.alpha_relaxed.assign(static_cast<size_t>(ui), 0.0);
    dec.alpha.assign(static_cast<size_t>(ui), 0);
    dec.iu_beams.assign(static_cast<size_t>(ui), ComplexVec::Zero(nt));
    dec.eu_beams.assign(static_cast<size_t>(ue), ComplexVec::Zero(nt));
    dec.ris_phase = rho;

    const bool any_buffered = slot.weight_sum() > 0.0;
    if (!any_buffered && ue == 0) {
        dec.feasible = true;
        return dec;
    }

    std::vector<ComplexVec> w, v;
    mrt_split_init(slot, rho, w, v);
    if (any_buffered) {
        auto br = optimize_beam_schedule(slot, rho, w, v, cfg, 1, nullptr, &dec.restorations,
                                         dec.trace);
        if (br.ok) {
            w = br.iu_beams;
            v = br.eu_beams;
            dec.alpha_relaxed = br.alpha;
        }
        dec.ao_rounds = 1;
    }
    finalize_decision(slot, cfg, dec, w, v);
    fill_final_objective(slot, dec);
    return dec;
}

// ---- surrogate validity -------------------------------------------------------

namespace {

struct SurrogatePair {
    std::function<double(const RealVec&)> truth;
    std::function<double(const RealVec&)> surrogate;
    RealVec expansion;
    std::function<RealVec(RngStream&)> sample;  // random feasible point
};

RealVec fd_gradient(const std::function<double(const RealVec&)>& f, const RealVec& x,
                    double step) {
    RealVec g(x.size());
    RealVec p = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        p[i] = x[i] + step;
        const double hi = f(p);
        p[i] = x[i] - step;
        const double lo = f(p);
        p[i] = x[i];
        g[i] = (hi - lo) / (2.0 * step);
    }
    return g;
}

SurrogateReport check_pair(const SurrogatePair& pair, int samples, RngStream& rng) {
    SurrogateReport rep;
    const double f0 = pair.truth(pair.expansion);
    const double s0 = pair.surrogate(pair.expansion);
    rep.value_error = std::abs(f0 - s0);
    rep.value_match = rep.value_error <= 1e-10 * std::max(1.0, std::abs(f0));

    const double step = 1e-5;
    const RealVec gf = fd_gradient(pair.truth, pair.expansion, step);
    const RealVec gs = fd_gradient(pair.surrogate, pair.expansion, step);
    const double scale = std::max(gf.lpNorm<Eigen::Infinity>(), 1e-12);
    rep.gradient_error = (gf - gs).lpNorm<Eigen::Infinity>() / scale;
    rep.gradient_match = rep.gradient_error <= 1e-5;

    rep.bound_violation = 0.0;
    for (int k = 0; k < samples; ++k) {
        const RealVec x = pair.sample(rng);
        const double f = pair.truth(x);
        const double s = pair.surrogate(x);
        rep.bound_violation =
            std::max(rep.bound_violation, (f - s) / std::max(1.0, std::abs(f)));
    }
    rep.bound_holds = rep.bound_violation <= 1e-9;
    return rep;
}

RealVec sample_polydisc(int n_ris, RngStream& rng) {
    ComplexVec rho(n_ris);
    for (int n = 0; n < n_ris; ++n) {
        const double r = std::sqrt(rng.uniform());
        const double th = 2.0 * M_PI * rng.uniform();
        rho[n] = cxd(r * std::cos(th), r * std::sin(th));
    }
    return stack_complex(rho);
}

}  // namespace

SurrogateReport verify_surrogate(SurrogateKind kind, const SlotProblem& slot,
                                 const std::vector<ComplexVec>& iu_beams,
                                 const std::vector<ComplexVec>& eu_beams,
                                 const ComplexVec& rho0, int user_index, double penalty_c,
                                 int samples, RngStream& rng) {
    slot.validate();
    const int ns = slot.n_ris();
    SurrogatePair pair;
    pair.expansion = stack_complex(rho0);
    pair.sample = [ns](RngStream& r) { return sample_polydisc(ns, r); };

    if (kind == SurrogateKind::penalty) {
        const double c = penalty_c;
        pair.truth = [c, ns](const RealVec& x) {
            const ComplexVec rho = unstack_complex(x);
            return -c * (rho.squaredNorm() - static_cast<double>(ns));
        };
        const ComplexVec r0 = rho0;
        pair.surrogate = [c, ns, r0](const RealVec& x) {
            const ComplexVec rho = unstack_complex(x);
            double lin = 0.0;
            for (Eigen::Index n = 0; n < rho.size(); ++n) {
                lin += 2.0 * (std::conj(r0[n]) * (rho[n] - r0[n])).real();
            }
            return -(c * lin + c * (r0.squaredNorm() - static_cast<double>(ns)));
        };
    } else {
        const bool is_snr = (kind == SurrogateKind::snr);
        const auto& factor = is_snr ? slot.iu.at(static_cast<size_t>(user_index))
                                    : slot.eu.at(static_cast<size_t>(user_index));
        const ComplexVec beam = is_snr ? iu_beams.at(static_cast<size_t>(user_index))
                                       : eu_beams.at(static_cast<size_t>(user_index));
        const double constant =
            is_snr ? slot.gamma_th * slot.noise_power : slot.harvest_min;
        pair.truth = [factor, beam, constant](const RealVec& x) {
            const ComplexVec rho = unstack_complex(x);
            return constant - std::norm(hermitian_product(factor.composite(rho), beam));
        };
        const ComplexVec t = factor.reflect * beam;
        const cxd c0 = hermitian_product(factor.composite(rho0), beam);
        const ComplexVec r0 = rho0;
        pair.surrogate = [t, c0, r0, constant](const RealVec& x) {
            const ComplexVec rho = unstack_complex(x);
            const cxd cross = std::conj(c0) * hermitian_product(rho - r0, t);
            return constant - (2.0 * cross.real() + std::norm(c0));
        };
    }
    return check_pair(pair, samples, rng);
}

SurrogateReport verify_beam_surrogate(SurrogateKind kind, const SlotProblem& slot,
                                      const ComplexVec& rho,
                                      const std::vector<ComplexVec>& iu_beams0,
                                      const std::vector<ComplexVec>& eu_beams0,
                                      int user_index, int samples, RngStream& rng) {
    slot.validate();
    if (kind == SurrogateKind::penalty) {
        throw std::invalid_argument("verify_beam_surrogate: no penalty surrogate on the beam side");
    }
    const bool is_snr = (kind == SurrogateKind::snr);
    const auto& factor = is_snr ? slot.iu.at(static_cast<size_t>(user_index))
                                : slot.eu.at(static_cast<size_t>(user_index));
    const ComplexVec beam0 = is_snr ? iu_beams0.at(static_cast<size_t>(user_index))
                                    : eu_beams0.at(static_cast<size_t>(user_index));
    const double constant = is_snr ? slot.gamma_th * slot.noise_power : slot.harvest_min;
    const ComplexVec h = factor.composite(rho);
    const int nt = slot.n_tx();

    SurrogatePair pair;
    pair.expansion = stack_complex(beam0);
    const double radius = std::sqrt(slot.power_budget);
    pair.sample = [nt, radius](RngStream& r) {
        ComplexVec b(nt);
        for (int k = 0; k < nt; ++k) b[k] = cxd(r.normal(), r.normal());
        const double nrm = b.norm();
        if (nrm > 0.0) b *= radius * std::pow(r.uniform(), 1.0 / (2 * nt)) / nrm;
        return stack_complex(b);
    };
    pair.truth = [h, constant](const RealVec& x) {
        return constant - std::norm(hermitian_product(h, unstack_complex(x)));
    };
    const cxd phi0 = hermitian_product(h, beam0);
    pair.surrogate = [h, phi0, constant](const RealVec& x) {
        const ComplexVec b = unstack_complex(x);
        const cxd lin = std::conj(phi0) * hermitian_product(h, b);
        return constant - (2.0 * lin.real() - std::norm(phi0));
    };
    return check_pair(pair, samples, rng);
}

}  // namespace aoiris
