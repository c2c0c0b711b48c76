#include "aoiris/conic.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aoiris {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

ConicProblem::ConicProblem(int n) { resize(n); }

void ConicProblem::resize(int n) {
    if (n < 0) throw std::invalid_argument("ConicProblem: negative size");
    num_vars = n;
    objective = RealVec::Zero(n);
    var_lower = RealVec::Constant(n, -kInf);
    var_upper = RealVec::Constant(n, kInf);
}

int ConicProblem::add_row(RealVec coeffs, double lower, double upper, std::string name) {
    if (coeffs.size() != num_vars) {
        throw std::invalid_argument("add_row: coefficient size mismatch");
    }
    if (!(lower <= upper)) {
        throw std::invalid_argument("add_row: empty bound interval");
    }
    rows.push_back({std::move(coeffs), lower, upper, std::move(name)});
    return static_cast<int>(rows.size()) - 1;
}

int ConicProblem::add_soc(RealMat a, RealVec b, RealVec c, double d, std::string name) {
    if (a.cols() != num_vars || c.size() != num_vars || b.size() != a.rows()) {
        throw std::invalid_argument("add_soc: dimension mismatch");
    }
    socs.push_back({std::move(a), std::move(b), std::move(c), d, std::move(name)});
    return static_cast<int>(socs.size()) - 1;
}

double ConicProblem::objective_value(const RealVec& x) const {
    return objective.dot(x) + objective_constant;
}

namespace {

struct Cones {
    int zero = 0;
    int pos = 0;
    std::vector<int> soc;
};

// min f.x  s.t.  a x + s = b,  s in Zero^zero x Pos^pos x SOC(q1) x ...
struct Canon {
    RealMat a;
    RealVec b;
    RealVec f;
    Cones cones;
    int m = 0;
    int n = 0;
};

Canon canonicalize(const ConicProblem& p) {
    const int n = p.num_vars;
    if (n < 1) throw std::invalid_argument("solve: problem has no variables");
    if (p.objective.size() != n || p.var_lower.size() != n || p.var_upper.size() != n) {
        throw std::invalid_argument("solve: objective/bound size mismatch");
    }

    std::vector<std::pair<RealVec, double>> zero_rows, pos_rows;
    for (const auto& r : p.rows) {
        if (r.coeffs.size() != n) throw std::invalid_argument("solve: row size mismatch");
        if (!(r.lower <= r.upper)) {
            throw std::invalid_argument("solve: empty row interval: " + r.name);
        }
        const bool lo = std::isfinite(r.lower), hi = std::isfinite(r.upper);
        if (lo && hi && r.lower == r.upper) {
            zero_rows.emplace_back(r.coeffs, r.lower);
        } else {
            if (hi) pos_rows.emplace_back(r.coeffs, r.upper);
            if (lo) pos_rows.emplace_back(-r.coeffs, -r.lower);
        }
    }
    for (int i = 0; i < n; ++i) {
        const double lo = p.var_lower[i], hi = p.var_upper[i];
        if (!(lo <= hi)) throw std::invalid_argument("solve: empty variable box");
        RealVec e = RealVec::Zero(n);
        if (std::isfinite(lo) && std::isfinite(hi) && lo == hi) {
            e[i] = 1.0;
            zero_rows.emplace_back(e, lo);
            continue;
        }
        if (std::isfinite(hi)) {
            e[i] = 1.0;
            pos_rows.emplace_back(e, hi);
            e[i] = 0.0;
        }
        if (std::isfinite(lo)) {
            e[i] = -1.0;
            pos_rows.emplace_back(e, -lo);
        }
    }

    int soc_total = 0;
    for (const auto& s : p.socs) {
        if (s.a.cols() != n || s.c.size() != n || s.b.size() != s.a.rows()) {
            throw std::invalid_argument("solve: soc dimension mismatch: " + s.name);
        }
        soc_total += static_cast<int>(s.a.rows()) + 1;
    }

    Canon c;
    c.n = n;
    c.cones.zero = static_cast<int>(zero_rows.size());
    c.cones.pos = static_cast<int>(pos_rows.size());
    c.m = c.cones.zero + c.cones.pos + soc_total;
    c.a.setZero(c.m, n);
    c.b.setZero(c.m);
    int r = 0;
    for (const auto& [coeffs, rhs] : zero_rows) {
        c.a.row(r) = coeffs.transpose();
        c.b[r] = rhs;
        ++r;
    }
    for (const auto& [coeffs, rhs] : pos_rows) {
        c.a.row(r) = coeffs.transpose();
        c.b[r] = rhs;
        ++r;
    }
    for (const auto& s : p.socs) {
        const int k = static_cast<int>(s.a.rows());
        c.a.row(r) = -s.c.transpose();
        c.b[r] = s.d;
        c.a.middleRows(r + 1, k) = -s.a;
        c.b.segment(r + 1, k) = s.b;
        c.cones.soc.push_back(k + 1);
        r += k + 1;
    }
    c.f = -p.objective;  // maximize -> minimize

    if (!c.a.allFinite() || !c.b.allFinite() || !c.f.allFinite()) {
        throw std::invalid_argument("solve: non-finite problem data");
    }
    return c;
}

void soc_project(Eigen::Ref<RealVec> seg) {
    const Eigen::Index k = seg.size();
    const double t = seg[0];
    const double zn = seg.tail(k - 1).norm();
    if (zn <= t) return;
    if (zn <= -t) {
        seg.setZero();
        return;
    }
    const double beta = 0.5 * (t + zn);
    seg[0] = beta;
    seg.tail(k - 1) *= beta / zn;
}

// K* = Free x Pos x SOC (zero cone's dual is free, the rest self-dual)
void project_dual_cone(const Cones& cones, RealVec& y) {
    int off = cones.zero;
    y.segment(off, cones.pos) = y.segment(off, cones.pos).cwiseMax(0.0);
    off += cones.pos;
    for (int dim : cones.soc) {
        soc_project(y.segment(off, dim));
        off += dim;
    }
}

void project_primal_cone(const Cones& cones, RealVec& s) {
    s.head(cones.zero).setZero();
    int off = cones.zero;
    s.segment(off, cones.pos) = s.segment(off, cones.pos).cwiseMax(0.0);
    off += cones.pos;
    for (int dim : cones.soc) {
        soc_project(s.segment(off, dim));
        off += dim;
    }
}

// Ruiz equilibration; rows of one SOC block share a scale so cone membership
// is preserved.
void equilibrate(const Canon& c, RealMat& as, RealVec& d_row, RealVec& e_col) {
    const int m = c.m, n = c.n;
    as = c.a;
    d_row = RealVec::Ones(m);
    e_col = RealVec::Ones(n);
    if (m == 0) return;
    for (int pass = 0; pass < 10; ++pass) {
        RealVec rn(m);
        for (int i = 0; i < m; ++i) rn[i] = as.row(i).cwiseAbs().maxCoeff();
        int off = c.cones.zero + c.cones.pos;
        for (int dim : c.cones.soc) {
            const double blk = rn.segment(off, dim).maxCoeff();
            rn.segment(off, dim).setConstant(blk);
            off += dim;
        }
        for (int i = 0; i < m; ++i) {
            const double s = (rn[i] > 1e-12) ? 1.0 / std::sqrt(rn[i]) : 1.0;
            as.row(i) *= s;
            d_row[i] *= s;
        }
        RealVec cn(n);
        for (int j = 0; j < n; ++j) cn[j] = as.col(j).cwiseAbs().maxCoeff();
        for (int j = 0; j < n; ++j) {
            const double s = (cn[j] > 1e-12) ? 1.0 / std::sqrt(cn[j]) : 1.0;
            as.col(j) *= s;
            e_col[j] *= s;
        }
    }
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolveOptions& options,
                    const WarmStart* warm) {
    const Canon c = canonicalize(problem);
    const int m = c.m, n = c.n;

    RealMat as;
    RealVec d_row, e_col;
    equilibrate(c, as, d_row, e_col);

    RealVec bs = d_row.cwiseProduct(c.b);
    RealVec fs = e_col.cwiseProduct(c.f);
    const double rho_b = (bs.size() > 0 && bs.norm() > 1e-12) ? 1.0 / bs.norm() : 1.0;
    const double sigma = (fs.norm() > 1e-12) ? 1.0 / fs.norm() : 1.0;
    bs *= rho_b;
    fs *= sigma;

    RealMat gram = as.transpose() * as;
    gram.diagonal().array() += 1.0;
    const Eigen::LLT<RealMat> llt(gram);

    RealVec tmp_n(n), tmp_m(m);
    auto msolve = [&](const RealVec& rx, const RealVec& ry, RealVec& ox, RealVec& oy) {
        tmp_n.noalias() = as.transpose() * ry;
        ox = llt.solve(rx - tmp_n);
        oy.noalias() = as * ox;
        oy += ry;
    };

    RealVec qx(n), qy(m);
    msolve(fs, bs, qx, qy);
    const double denom = 1.0 + fs.dot(qx) + bs.dot(qy);

    // HSDE state; the x-block of v is identically zero and not stored.
    RealVec ux = RealVec::Zero(n), uy = RealVec::Zero(m);
    RealVec vs = RealVec::Zero(m);
    double ut = 1.0, vk = 1.0;
    if (warm != nullptr && warm->x.size() == n && warm->dual_y.size() == m &&
        warm->slack_s.size() == m && warm->x.allFinite() && warm->dual_y.allFinite() &&
        warm->slack_s.allFinite()) {
        ux = rho_b * warm->x.cwiseQuotient(e_col);
        uy = sigma * warm->dual_y.cwiseQuotient(d_row);
        vs = rho_b * warm->slack_s.cwiseProduct(d_row);
        vk = 0.0;
    }

    const double alpha = options.relaxation;
    RealVec wx(n), wy(m), px(n), py(m), tx(n), ty(m), hx(n), hy(m);
    RealVec x(n), y(m), s(m), resv(m), dresv(n);

    ConicSolution sol;
    sol.x = RealVec::Zero(n);
    sol.dual_y = RealVec::Zero(m);
    sol.slack_s = RealVec::Zero(m);

    double best_comb = kInf;
    int best_improve_iter = 0;
    RealVec best_x, best_y, best_s;
    double best_pres = kInf, best_dres = kInf, best_gap = kInf;

    SolveStatus status = SolveStatus::iteration_limit;
    int iter = 0;
    const double bnorm = c.b.norm();
    const double fnorm = c.f.norm();

    for (iter = 1; iter <= options.max_iters; ++iter) {
        wx = ux;
        wy = uy + vs;
        const double wt = ut + vk;

        msolve(wx, wy, px, py);
        const double that = (wt + fs.dot(px) + bs.dot(py)) / denom;
        tx = px - that * qx;
        ty = py - that * qy;

        hx = alpha * tx + (1.0 - alpha) * ux;
        hy = alpha * ty + (1.0 - alpha) * uy;
        const double ht = alpha * that + (1.0 - alpha) * ut;

        ux = hx;  // free block and v.x == 0
        uy = hy - vs;
        project_dual_cone(c.cones, uy);
        ut = std::max(0.0, ht - vk);

        vs += uy - hy;
        vk += ut - ht;

        if (iter % options.check_interval != 0 && iter != options.max_iters) continue;

        const double mag = std::max({ux.lpNorm<Eigen::Infinity>(),
                                     m > 0 ? uy.lpNorm<Eigen::Infinity>() : 0.0, ut,
                                     m > 0 ? vs.lpNorm<Eigen::Infinity>() : 0.0, vk});
        if (!std::isfinite(mag)) break;
        if (mag > 1e12) {  // the embedding is positively homogeneous
            ux /= mag; uy /= mag; ut /= mag; vs /= mag; vk /= mag;
        }

        if (ut > 1e-9 * std::max(1.0, vk)) {
            x = e_col.cwiseProduct(ux) / (ut * rho_b);
            y = d_row.cwiseProduct(uy) / (ut * sigma);
            s = vs.cwiseQuotient(d_row) / (ut * rho_b);
            resv.noalias() = c.a * x;
            resv += s - c.b;
            const double pres = (m > 0 ? resv.norm() : 0.0) / (1.0 + bnorm);
            dresv.noalias() = c.a.transpose() * y;
            dresv += c.f;
            const double dres = dresv.norm() / (1.0 + fnorm);
            const double pobj = c.f.dot(x);
            const double dobj = -c.b.dot(y);
            const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double comb = std::max({pres, dres, gap});
            if (comb < 0.99 * best_comb) {
                best_comb = comb;
                best_improve_iter = iter;
                best_x = x; best_y = y; best_s = s;
                best_pres = pres; best_dres = dres; best_gap = gap;
            }
            if (pres <= options.tol_feas && dres <= options.tol_feas && gap <= options.tol_gap) {
                status = SolveStatus::optimal;
                best_x = x; best_y = y; best_s = s;
                best_pres = pres; best_dres = dres; best_gap = gap;
                break;
            }
        }

        // Certificates decide only once residuals have stopped improving.
        const bool stagnant = (iter - best_improve_iter >= options.stagnation_window) ||
                              iter >= options.max_iters;
        if (stagnant && m > 0) {
            RealVec ydir = d_row.cwiseProduct(uy);
            const double bty = c.b.dot(ydir);
            if (bty < -1e-12 * std::max(1.0, ydir.norm())) {
                ydir /= -bty;
                if ((c.a.transpose() * ydir).lpNorm<Eigen::Infinity>() <=
                    options.certificate_tol) {
                    status = SolveStatus::infeasible;
                    break;
                }
            }
            RealVec xdir = e_col.cwiseProduct(ux);
            const double ftx = c.f.dot(xdir);
            if (ftx < -1e-12 * std::max(1.0, xdir.norm())) {
                xdir /= -ftx;
                RealVec sdir = -(c.a * xdir);
                project_primal_cone(c.cones, sdir);
                resv.noalias() = c.a * xdir;
                resv += sdir;
                if (resv.lpNorm<Eigen::Infinity>() <= options.certificate_tol) {
                    status = SolveStatus::unbounded;
                    break;
                }
            }
        }
    }

    sol.status = status;
    sol.iterations = std::min(iter, options.max_iters);
    if (best_x.size() == n) {
        sol.x = best_x;
        sol.dual_y = best_y;
        sol.slack_s = best_s;
        sol.primal_residual = best_pres;
        sol.dual_residual = best_dres;
        sol.duality_gap = best_gap;
    }
    sol.objective_value =
        (status == SolveStatus::optimal || status == SolveStatus::iteration_limit)
            ? problem.objective_value(sol.x)
            : std::numeric_limits<double>::quiet_NaN();
    return sol;
}

ResidualReport check_solution(const ConicProblem& problem, const RealVec& x,
                              double report_tol) {
    if (x.size() != problem.num_vars) {
        throw std::invalid_argument("check_solution: dimension mismatch");
    }
    ResidualReport rep;
    auto note = [&](const std::string& name, double viol) {
        rep.max_violation = std::max(rep.max_violation, viol);
        if (viol > report_tol) rep.violated.push_back({name, viol});
    };
    for (size_t i = 0; i < problem.rows.size(); ++i) {
        const auto& r = problem.rows[i];
        const double v = r.coeffs.dot(x);
        double viol = 0.0;
        if (std::isfinite(r.lower)) viol = std::max(viol, r.lower - v);
        if (std::isfinite(r.upper)) viol = std::max(viol, v - r.upper);
        note(r.name.empty() ? "row" + std::to_string(i) : r.name, viol);
    }
    for (int j = 0; j < problem.num_vars; ++j) {
        double viol = std::max(0.0, problem.var_lower[j] - x[j]);
        viol = std::max(viol, x[j] - problem.var_upper[j]);
        note("var" + std::to_string(j), viol);
    }
    for (size_t k = 0; k < problem.socs.size(); ++k) {
        const auto& s = problem.socs[k];
        const double lhs = (s.a * x + s.b).norm();
        const double rhs = s.c.dot(x) + s.d;
        note(s.name.empty() ? "soc" + std::to_string(k) : s.name, std::max(0.0, lhs - rhs));
    }
    return rep;
}

std::string dump_problem(const ConicProblem& p) {
    std::ostringstream os;
    os << "maximize";
    for (int j = 0; j < p.num_vars; ++j) {
        if (p.objective[j] != 0.0) os << " + " << p.objective[j] << " x" << j;
    }
    if (p.objective_constant != 0.0) os << " + " << p.objective_constant;
    os << "\n";
    for (size_t i = 0; i < p.rows.size(); ++i) {
        const auto& r = p.rows[i];
        os << "  " << (r.name.empty() ? "row" + std::to_string(i) : r.name) << ": "
           << r.lower << " <=";
        for (int j = 0; j < p.num_vars; ++j) {
            if (r.coeffs[j] != 0.0) os << " + " << r.coeffs[j] << " x" << j;
        }
        os << " <= " << r.upper << "\n";
    }
    for (int j = 0; j < p.num_vars; ++j) {
        if (std::isfinite(p.var_lower[j]) || std::isfinite(p.var_upper[j])) {
            os << "  x" << j << " in [" << p.var_lower[j] << ", " << p.var_upper[j] << "]\n";
        }
    }
    for (size_t k = 0; k < p.socs.size(); ++k) {
        const auto& s = p.socs[k];
        os << "  " << (s.name.empty() ? "soc" + std::to_string(k) : s.name) << ": ||A x + b|| <= c.x + "
           << s.d << "  (" << s.a.rows() << " rows)\n";
    }
    return os.str();
}

}  // namespace aoiris
