#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aoiris/conic.hpp"

#include "oracles.hpp"

#include <cstring>

using namespace aoiris;

TEST_CASE("one-dimensional ball extreme point") {
    ConicProblem p(1);
    p.objective[0] = 1.0;
    p.add_soc(RealMat::Identity(1, 1), RealVec::Zero(1), RealVec::Zero(1), 1.0, "ball");
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("box LP vertex") {
    ConicProblem p(2);
    p.objective << 1.0, 1.0;
    p.var_lower << 0.0, 0.0;
    p.var_upper << 1.0, 1.0;
    RealVec row(2);
    row << 1.0, 1.0;
    p.add_row(row, -kInf, 1.5, "cap");
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("ball maximization hits the closed-form projection") {
    RngStream rng(101, 0);
    for (int trial = 0; trial < 25; ++trial) {
        ConicProblem p(3);
        RealVec c(3);
        for (int j = 0; j < 3; ++j) c[j] = 2.0 * rng.uniform() - 1.0;
        if (c.norm() < 0.1) continue;
        const double radius = 0.5 + 2.0 * rng.uniform();
        p.objective = c;
        p.add_soc(RealMat::Identity(3, 3), RealVec::Zero(3), RealVec::Zero(3), radius);
        const auto sol = solve(p);
        REQUIRE(sol.status == SolveStatus::optimal);
        const RealVec want = radius * c / c.norm();
        CHECK((sol.x - want).norm() <= 1e-5 * std::max(1.0, want.norm()));
    }
}

TEST_CASE("random small LPs match vertex enumeration") {
    RngStream rng(102, 0);
    SolveOptions opts;
    opts.tol_feas = 1e-7;
    opts.tol_gap = 1e-7;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 4.999);  // 2..6
        const ConicProblem p = oracles::random_bounded_lp(rng, n, 1 + (trial % 4));
        const auto sol = solve(p, opts);
        REQUIRE(sol.status == SolveStatus::optimal);
        const double want = oracles::lp_vertex_objective(p);
        CHECK(sol.objective_value ==
              doctest::Approx(want).epsilon(1e-6).scale(std::max(1.0, std::abs(want))));
    }
}

TEST_CASE("check_solution recomputes violations independently") {
    ConicProblem p(1);
    p.objective[0] = 1.0;
    p.add_soc(RealMat::Identity(1, 1), RealVec::Zero(1), RealVec::Zero(1), 1.0, "ball");
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(check_solution(p, sol.x).max_violation <= 1e-6);

    RealVec bad = sol.x;
    bad[0] += 0.1;
    const auto rep = check_solution(p, bad);
    REQUIRE(rep.violated.size() == 1);
    CHECK(rep.violated[0].name == "ball");
    CHECK(rep.violated[0].violation == doctest::Approx(0.1).epsilon(1e-4));
}

TEST_CASE("positive objective rescaling leaves the argmax in place") {
    RngStream rng(103, 0);
    for (int trial = 0; trial < 10; ++trial) {
        ConicProblem p = oracles::random_bounded_lp(rng, 4, 3);
        const auto sol1 = solve(p);
        ConicProblem q = p;
        q.objective *= 37.5;
        const auto sol2 = solve(q);
        REQUIRE(sol1.status == SolveStatus::optimal);
        REQUIRE(sol2.status == SolveStatus::optimal);
        CHECK((sol1.x - sol2.x).lpNorm<Eigen::Infinity>() <= 1e-4);
    }
}

TEST_CASE("tightening a bound never improves the optimum") {
    RngStream rng(104, 0);
    for (int trial = 0; trial < 10; ++trial) {
        ConicProblem p = oracles::random_bounded_lp(rng, 4, 2);
        const auto loose = solve(p);
        REQUIRE(loose.status == SolveStatus::optimal);
        ConicProblem q = p;
        const int j = static_cast<int>(rng.uniform() * 3.999);
        q.var_upper[j] = 0.5 * (q.var_lower[j] + q.var_upper[j]);
        const auto tight = solve(q);
        REQUIRE(tight.status == SolveStatus::optimal);
        CHECK(tight.objective_value <= loose.objective_value + 1e-6);
    }
}

TEST_CASE("identical problems give bitwise identical solutions") {
    RngStream r1(105, 0), r2(105, 0);
    const ConicProblem a = oracles::random_bounded_lp(r1, 5, 3);
    const ConicProblem b = oracles::random_bounded_lp(r2, 5, 3);
    const auto sa = solve(a);
    const auto sb = solve(b);
    REQUIRE(sa.status == SolveStatus::optimal);
    CHECK(std::memcmp(sa.x.data(), sb.x.data(), sizeof(double) * 5) == 0);
    CHECK(sa.iterations == sb.iterations);
}

TEST_CASE("conflicting bounds are reported infeasible, open rays unbounded") {
    SUBCASE("infeasible") {
        ConicProblem p(1);
        p.objective[0] = 1.0;
        RealVec r1(1), r2(1);
        r1 << 1.0;
        r2 << 1.0;
        p.add_row(r1, 2.0, kInf, "lower");
        p.add_row(r2, -kInf, 1.0, "upper");
        const auto sol = solve(p);
        CHECK(sol.status == SolveStatus::infeasible);
    }
    SUBCASE("unbounded") {
        ConicProblem p(1);
        p.objective[0] = 1.0;
        p.var_lower[0] = 0.0;
        const auto sol = solve(p);
        CHECK(sol.status == SolveStatus::unbounded);
    }
}

TEST_CASE("warm starts preserve correctness") {
    RngStream rng(106, 0);
    ConicProblem p = oracles::random_bounded_lp(rng, 5, 4);
    const auto cold = solve(p);
    REQUIRE(cold.status == SolveStatus::optimal);
    ConicProblem q = p;
    q.objective *= 1.01;  // small perturbation of the same geometry
    WarmStart ws{cold.x, cold.dual_y, cold.slack_s};
    const auto warm = solve(q, {}, &ws);
    REQUIRE(warm.status == SolveStatus::optimal);
    CHECK(warm.objective_value ==
          doctest::Approx(1.01 * cold.objective_value).epsilon(1e-5));
}

TEST_CASE("soc constraints with offsets") {
    // || x - [1;0] || <= 0.5 while maximizing x0 + x1
    ConicProblem p(2);
    p.objective << 1.0, 1.0;
    RealVec b(2);
    b << -1.0, 0.0;
    p.add_soc(RealMat::Identity(2, 2), b, RealVec::Zero(2), 0.5);
    const auto sol = solve(p);
    REQUIRE(sol.status == SolveStatus::optimal);
    const double want = 1.0 + 0.5 * std::sqrt(2.0);
    CHECK(sol.objective_value == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("problem dump lists rows and cones") {
    ConicProblem p(2);
    p.objective << 1.0, 0.0;
    RealVec row(2);
    row << 1.0, 1.0;
    p.add_row(row, -kInf, 1.0, "cap");
    p.add_soc(RealMat::Identity(2, 2), RealVec::Zero(2), RealVec::Zero(2), 1.0, "ball");
    const std::string text = dump_problem(p);
    CHECK(text.find("cap") != std::string::npos);
    CHECK(text.find("ball") != std::string::npos);
    CHECK(text.find("maximize") != std::string::npos);
}
