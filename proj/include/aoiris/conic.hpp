#pragma once

#include "aoiris/numerics.hpp"

#include <limits>
#include <string>
#include <vector>

namespace aoiris {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SolveStatus s);

// ||a x + b|| <= c . x + d
struct SocConstraint {
    RealMat a;
    RealVec b;
    RealVec c;
    double d = 0.0;
    std::string name;
};

struct LinearRow {
    RealVec coeffs;
    double lower = -kInf;
    double upper = kInf;
    std::string name;
};

// Linear objective (maximized), two-sided linear rows, variable boxes, and
// second-order-cone constraints. objective_constant is bookkeeping so callers
// can evaluate affine surrogates exactly; the solver ignores it.
struct ConicProblem {
    int num_vars = 0;
    RealVec objective;
    double objective_constant = 0.0;
    RealVec var_lower, var_upper;
    std::vector<LinearRow> rows;
    std::vector<SocConstraint> socs;

    explicit ConicProblem(int n = 0);
    void resize(int n);
    int add_row(RealVec coeffs, double lower, double upper, std::string name = {});
    int add_soc(RealMat a, RealVec b, RealVec c, double d, std::string name = {});
    double objective_value(const RealVec& x) const;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::iteration_limit;
    RealVec x;
    double objective_value = 0.0;  // objective . x + objective_constant
    double primal_residual = 0.0;  // relative, canonical form
    double dual_residual = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    // canonical-order dual and slack, kept for warm-starting a related solve
    RealVec dual_y;
    RealVec slack_s;
};

struct SolveOptions {
    double tol_feas = 1e-6;
    double tol_gap = 1e-6;
    int max_iters = 50000;
    double relaxation = 1.7;      // over-relaxation factor in (0, 2)
    int check_interval = 5;
    int stagnation_window = 500;  // iterations without progress before certificates decide
    double certificate_tol = 1e-5;
};

struct WarmStart {
    RealVec x;
    RealVec dual_y;
    RealVec slack_s;
};

/// Homogeneous self-dual operator-splitting solve: a cached dense
/// factorization alternates with projections onto the box/SOC cones.
/// Deterministic given identical inputs. Never throws on a well-formed
/// problem; infeasible/unbounded/iteration-limit come back as statuses.
ConicSolution solve(const ConicProblem& problem, const SolveOptions& options = {},
                    const WarmStart* warm = nullptr);

struct ResidualReport {
    struct Item {
        std::string name;
        double violation = 0.0;
    };
    double max_violation = 0.0;
    std::vector<Item> violated;  // entries above the report threshold

    bool feasible(double tol) const { return max_violation <= tol; }
};

/// Recomputes every constraint violation straight from the problem data,
/// independent of the solve path.
ResidualReport check_solution(const ConicProblem& problem, const RealVec& x,
                              double report_tol = 1e-8);

/// Human-readable dump, one constraint per line.
std::string dump_problem(const ConicProblem& problem);

}  // namespace aoiris
