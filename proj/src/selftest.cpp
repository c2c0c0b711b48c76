#include "aoiris/selftest.hpp"

#include "aoiris/baselines.hpp"
#include "aoiris/conic.hpp"
#include "aoiris/sca.hpp"
#include "aoiris/sim.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace aoiris {

namespace {

// Brute-force LP maximizer: every basis of n active constraints (rows at a
// bound plus variable bounds) is solved and the best feasible vertex wins.
// Only meant for tiny n.
double lp_vertex_oracle(const ConicProblem& p) {
    const int n = p.num_vars;
    struct Plane {
        RealVec a;
        double rhs;
    };
    std::vector<Plane> planes;
    for (const auto& r : p.rows) {
        if (std::isfinite(r.lower)) planes.push_back({r.coeffs, r.lower});
        if (std::isfinite(r.upper)) planes.push_back({r.coeffs, r.upper});
    }
    for (int j = 0; j < n; ++j) {
        RealVec e = RealVec::Zero(n);
        e[j] = 1.0;
        if (std::isfinite(p.var_lower[j])) planes.push_back({e, p.var_lower[j]});
        if (std::isfinite(p.var_upper[j])) planes.push_back({e, p.var_upper[j]});
    }
    const int np = static_cast<int>(planes.size());
    std::vector<int> idx(static_cast<size_t>(n));
    double best = -kInf;
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            RealMat a(n, n);
            RealVec b(n);
            for (int k = 0; k < n; ++k) {
                a.row(k) = planes[static_cast<size_t>(idx[static_cast<size_t>(k)])].a.transpose();
                b[k] = planes[static_cast<size_t>(idx[static_cast<size_t>(k)])].rhs;
            }
            const Eigen::FullPivLU<RealMat> lu(a);
            if (!lu.isInvertible()) return;
            const RealVec x = lu.solve(b);
            if (check_solution(p, x).max_violation > 1e-7) return;
            best = std::max(best, p.objective_value(x));
            return;
        }
        for (int i = start; i < np; ++i) {
            idx[static_cast<size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

ConicProblem random_bounded_lp(RngStream& rng, int n, int extra_rows) {
    ConicProblem p(n);
    RealVec x0(n);
    for (int j = 0; j < n; ++j) {
        p.var_lower[j] = -1.0 - rng.uniform();
        p.var_upper[j] = 1.0 + rng.uniform();
        x0[j] = p.var_lower[j] + rng.uniform() * (p.var_upper[j] - p.var_lower[j]);
        p.objective[j] = 2.0 * rng.uniform() - 1.0;
    }
    for (int r = 0; r < extra_rows; ++r) {
        RealVec a(n);
        for (int j = 0; j < n; ++j) a[j] = 2.0 * rng.uniform() - 1.0;
        p.add_row(std::move(a), -kInf, a.dot(x0) + 0.2 + rng.uniform());
    }
    return p;
}

SlotProblem random_slot_problem(RngStream& rng, int n_tx, int n_ris, int n_iu, int n_eu) {
    NetworkSizes sizes{n_tx, n_ris, n_iu, n_eu};
    PathLossParams pl;
    const ChannelRealization real = draw_channels(pl, sizes, rng);
    SlotProblem slot;
    for (int i = 0; i < n_iu; ++i) {
        slot.iu.push_back(composite_factor_iu(real, i));
        slot.weights.push_back(1.0 + std::floor(rng.uniform() * 8.0));
    }
    for (int j = 0; j < n_eu; ++j) slot.eu.push_back(composite_factor_eu(real, j));
    slot.max_scheduled = std::max(1, n_iu - 1);
    slot.power_budget = 3.0;
    slot.gamma_th = 1e3;
    slot.noise_power = 1e-10;
    slot.harvest_min = 3.16e-5;
    return slot;
}

}  // namespace

int run_selftest(std::ostream& os) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        os << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    RngStream rng(20240915, 0);

    {  // complex embedding is a ring homomorphism; adjoint is an involution
        bool ok = true;
        for (int k = 0; k < 5; ++k) {
            const ComplexMat a = sample_cn(3, 3, rng);
            const ComplexMat b = sample_cn(3, 3, rng);
            ok = ok && (complex_to_real_embedding(a * b) -
                        complex_to_real_embedding(a) * complex_to_real_embedding(b))
                               .cwiseAbs()
                               .maxCoeff() < 1e-12;
            ok = ok && (ComplexMat(a.adjoint().adjoint()) - a).cwiseAbs().maxCoeff() == 0.0;
        }
        check("embedding homomorphism / adjoint involution", ok);
    }

    {  // seeded streams replay
        RngStream a(7, 3), b(7, 3);
        bool ok = true;
        for (int i = 0; i < 100; ++i) ok = ok && a.normal() == b.normal();
        check("rng determinism", ok);
    }

    {  // conic solver against closed forms
        bool ok = true;
        ConicProblem ball(1);
        ball.objective[0] = 1.0;
        ball.add_soc(RealMat::Identity(1, 1), RealVec::Zero(1), RealVec::Zero(1), 1.0);
        const auto s = solve(ball);
        ok = ok && s.status == SolveStatus::optimal && std::abs(s.objective_value - 1.0) < 1e-5;
        for (int k = 0; k < 10 && ok; ++k) {
            ConicProblem p(3);
            RealVec c(3);
            for (int j = 0; j < 3; ++j) c[j] = 2.0 * rng.uniform() - 1.0;
            const double radius = 0.5 + rng.uniform();
            p.objective = c;
            p.add_soc(RealMat::Identity(3, 3), RealVec::Zero(3), RealVec::Zero(3), radius);
            const auto sol = solve(p);
            ok = ok && sol.status == SolveStatus::optimal &&
                 std::abs(sol.objective_value - radius * c.norm()) <=
                     1e-5 * std::max(1.0, radius * c.norm());
        }
        check("conic solver vs ball closed form", ok);
    }

    {  // conic solver against vertex enumeration
        bool ok = true;
        for (int k = 0; k < 10 && ok; ++k) {
            const ConicProblem p = random_bounded_lp(rng, 3, 3);
            const auto sol = solve(p);
            const double oracle = lp_vertex_oracle(p);
            ok = sol.status == SolveStatus::optimal &&
                 std::abs(sol.objective_value - oracle) <= 1e-5 * std::max(1.0, std::abs(oracle));
        }
        check("conic solver vs vertex enumeration", ok);
    }

    {  // definitional age replay on a scripted run
        AoiState st = AoiState::initial({1.0, 0.0});
        bool ok = true;
        long long gen = -100, delivered_gen = -100;
        for (int t = 0; t < 6; ++t) {
            st.buffered[0] = 1;
            st.system_time[0] = 0;  // arrival every slot for stream 0
            gen = t;
            SlotOutcome o;
            o.scheduled = {t % 2, 0};
            o.delivered = {t % 2, 0};
            o.snr = {1.0, 0.0};
            st = step_aoi(st, o);
            if (t % 2 == 1) delivered_gen = gen;
            const long long expect = (delivered_gen >= 0) ? (t + 1 - delivered_gen) : (t + 2);
            ok = ok && st.age[0] == expect;
        }
        check("aoi recursion vs definitional replay", ok);
    }

    {  // surrogate certificates on random instances
        bool ok = true;
        for (int k = 0; k < 2 && ok; ++k) {
            SlotProblem slot = random_slot_problem(rng, 4, 6, 2, 1);
            std::vector<ComplexVec> w, v;
            ComplexVec rho0(6);
            for (int n = 0; n < 6; ++n) {
                const double th = 2.0 * M_PI * rng.uniform();
                rho0[n] = 0.9 * cxd(std::cos(th), std::sin(th));
            }
            for (int i = 0; i < 2; ++i) w.push_back(0.7 * sample_cn(4, 1, rng).col(0));
            v.push_back(0.7 * sample_cn(4, 1, rng).col(0));
            ok = ok && verify_surrogate(SurrogateKind::snr, slot, w, v, rho0, 0, 1.0, 50, rng).pass();
            ok = ok && verify_surrogate(SurrogateKind::eh, slot, w, v, rho0, 0, 1.0, 50, rng).pass();
            ok = ok && verify_surrogate(SurrogateKind::penalty, slot, w, v, rho0, 0, 2.5, 50, rng).pass();
            ok = ok && verify_beam_surrogate(SurrogateKind::snr, slot, project_unit_modulus(rho0), w, v, 0, 50, rng).pass();
            ok = ok && verify_beam_surrogate(SurrogateKind::eh, slot, project_unit_modulus(rho0), w, v, 0, 50, rng).pass();
        }
        check("surrogate validity certificates", ok);
    }

    {  // path loss closed form and random phases
        PathLossParams pl;
        bool ok = std::abs(amplitude_gain(pl, 1.0, 2.2) - std::sqrt(1e-3)) < 1e-15;
        const ComplexVec rho = random_phases(32, rng);
        for (int n = 0; n < 32; ++n) ok = ok && std::abs(std::abs(rho[n]) - 1.0) <= 1e-15;
        check("path loss and unit-modulus draws", ok);
    }

    os << (failures == 0 ? "selftest: all checks passed\n"
                         : "selftest: " + std::to_string(failures) + " check(s) failed\n");
    return failures;
}

}  // namespace aoiris
