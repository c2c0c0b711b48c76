#pragma once

// Test-side oracles, independent of the library's solve paths.

#include "aoiris/channel.hpp"
#include "aoiris/conic.hpp"
#include "aoiris/sca.hpp"

#include <climits>
#include <functional>
#include <vector>

namespace oracles {

using namespace aoiris;

// Exhaustive vertex enumeration for small bounded LPs: every choice of
// num_vars active planes is solved and the best feasible point wins.
inline double lp_vertex_objective(const ConicProblem& p) {
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

// Feasible bounded random LP: boxes plus rows slack at a random interior point.
inline ConicProblem random_bounded_lp(RngStream& rng, int n, int extra_rows) {
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
        const double slack = 0.2 + rng.uniform();
        p.add_row(a, -kInf, a.dot(x0) + slack);
    }
    return p;
}

// Ages A(t+1) for t = 0..T-1 straight from the definition: slots since the
// generation of the last delivered update, with A(0) = 1 and keep-latest
// buffering.
inline std::vector<long long> definitional_ages(const std::vector<int>& arrivals,
                                                const std::vector<int>& delivered) {
    std::vector<long long> ages;
    long long last_gen = LLONG_MIN;
    long long cur_gen = -1;
    bool have_packet = false;
    bool any_delivery = false;
    for (size_t t = 0; t < arrivals.size(); ++t) {
        if (arrivals[t]) {
            cur_gen = static_cast<long long>(t);
            have_packet = true;
        }
        if (delivered[t]) {
            if (!have_packet) throw std::logic_error("definitional_ages: delivery without packet");
            any_delivery = true;
            last_gen = cur_gen;
            have_packet = false;
        }
        const auto tt = static_cast<long long>(t);
        ages.push_back(any_delivery ? (tt + 1 - last_gen) : (tt + 2));
    }
    return ages;
}

// Random slot instance on the default geometry.
inline SlotProblem random_slot(RngStream& rng, int n_tx, int n_ris, int n_iu, int n_eu,
                               double gamma_th = 1e3, double harvest_min = 3.1622776601683794e-5) {
    NetworkSizes sizes{n_tx, n_ris, n_iu, n_eu};
    PathLossParams pl;
    const ChannelRealization real = draw_channels(pl, sizes, rng);
    SlotProblem slot;
    for (int i = 0; i < n_iu; ++i) {
        slot.iu.push_back(composite_factor_iu(real, i));
        slot.weights.push_back(1.0 + std::floor(rng.uniform() * 9.0));
    }
    for (int j = 0; j < n_eu; ++j) slot.eu.push_back(composite_factor_eu(real, j));
    slot.max_scheduled = std::max(1, n_iu > 1 ? n_iu - 1 : n_iu);
    slot.power_budget = 3.0;
    slot.gamma_th = gamma_th;
    slot.noise_power = 1e-10;
    slot.harvest_min = harvest_min;
    return slot;
}

inline ComplexVec random_polydisc(int n, double radius, RngStream& rng) {
    ComplexVec rho(n);
    for (int k = 0; k < n; ++k) {
        const double r = radius * std::sqrt(rng.uniform());
        const double th = 2.0 * M_PI * rng.uniform();
        rho[k] = cxd(r * std::cos(th), r * std::sin(th));
    }
    return rho;
}

inline ComplexVec random_unit_rho(int n, RngStream& rng) {
    ComplexVec rho(n);
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * rng.uniform();
        rho[k] = cxd(std::cos(th), std::sin(th));
    }
    return rho;
}

}  // namespace oracles
