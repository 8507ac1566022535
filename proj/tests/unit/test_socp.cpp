// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/socp.hpp"
#include "testkit.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace sparsewb;
using socp::ConicProgram;
using socp::SolveStatus;

namespace {

ConicProgram shifted_interval()
{
    ConicProgram p;
    p.n = 1;
    p.c = RealVector::Ones(1);
    p.cones.push_back(socp::dense_cone(RealMatrix::Identity(1, 1), RealVector::Constant(1, -3.0),
                                       RealVector::Zero(1), 1.0));
    return p;
}

ConicProgram unit_disk()
{
    ConicProgram p;
    p.n = 2;
    p.c = RealVector::Ones(2);
    p.cones.push_back(socp::dense_cone(RealMatrix::Identity(2, 2), RealVector::Zero(2), RealVector::Zero(2), 1.0));
    return p;
}

}  // namespace

TEST_CASE("analytic programs")
{
    const auto a = socp::solve(shifted_interval());
    REQUIRE(a.status == SolveStatus::Optimal);
    CHECK(a.x[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(a.objective == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(a.primal_infeas <= 1e-7);
    CHECK(a.gap_estimate <= 1e-7);

    const auto b = socp::solve(unit_disk());
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(std::abs(b.objective + std::sqrt(2.0)) <= 1e-7);
}

TEST_CASE("nonnegative variables")
{
    ConicProgram p;
    p.n = 2;
    p.c = RealVector::Constant(2, 1.0);
    p.c[1] = -1.0;
    p.cones.push_back(socp::dense_cone(RealMatrix::Identity(2, 2), RealVector::Zero(2), RealVector::Zero(2), 1.0));
    p.nonneg = {0};
    const auto s = socp::solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.objective + 1.0) <= 1e-7);
    CHECK(s.x[0] >= -1e-7);
}

TEST_CASE("sparse supports")
{
    ConicProgram p;
    p.n = 3;
    p.c = RealVector::Zero(3);
    p.c << 1.0, 1.0, 1.0;
    socp::SocConstraint a;
    a.support = {0, 2};
    a.A = RealMatrix::Identity(2, 2);
    a.b = RealVector::Zero(2);
    a.f = RealVector::Zero(2);
    a.g = 1.0;
    socp::SocConstraint b;
    b.support = {1};
    b.A = RealMatrix::Identity(1, 1);
    b.b = RealVector::Constant(1, -2.0);
    b.f = RealVector::Zero(1);
    b.g = 0.5;
    p.cones = {a, b};
    const auto s = socp::solve(p);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.objective - (1.5 - std::sqrt(2.0))) <= 1e-7);
}

TEST_CASE("infeasible and unbounded programs are reported by status")
{
    ConicProgram infeasible;
    infeasible.n = 1;
    infeasible.c = RealVector::Ones(1);
    infeasible.cones.push_back(
        socp::dense_cone(RealMatrix::Identity(1, 1), RealVector::Constant(1, -3.0), RealVector::Zero(1), 1.0));
    infeasible.cones.push_back(
        socp::dense_cone(RealMatrix::Identity(1, 1), RealVector::Constant(1, 3.0), RealVector::Zero(1), 1.0));
    CHECK(socp::solve(infeasible).status == SolveStatus::Infeasible);

    ConicProgram unbounded;
    unbounded.n = 2;
    unbounded.c = RealVector::Zero(2);
    unbounded.c[0] = -1.0;
    RealMatrix a(1, 2);
    a << 0.0, 1.0;
    RealVector f(2);
    f << 1.0, 0.0;
    unbounded.cones.push_back(socp::dense_cone(a, RealVector::Zero(1), f, 0.0));
    CHECK(socp::solve(unbounded).status == SolveStatus::Unbounded);
}

TEST_CASE("malformed programs and settings throw")
{
    auto p = unit_disk();
    p.c = RealVector::Ones(3);
    CHECK_THROWS_AS(socp::solve(p), std::invalid_argument);

    p = unit_disk();
    p.cones[0].b = RealVector::Zero(5);
    CHECK_THROWS_AS(socp::solve(p), std::invalid_argument);

    p = unit_disk();
    p.nonneg = {7};
    CHECK_THROWS_AS(socp::solve(p), std::invalid_argument);

    socp::SolverSettings bad;
    bad.tol_feas = 0.0;
    CHECK_THROWS_AS(socp::solve(unit_disk(), bad), std::invalid_argument);
}

TEST_CASE("check_feasibility")
{
    const auto p = shifted_interval();
    CHECK(socp::check_feasibility(p, RealVector::Constant(1, 2.0)).worst_violation == 0.0);
    CHECK(socp::check_feasibility(p, RealVector::Constant(1, 3.5)).worst_violation == 0.0);
    CHECK(socp::check_feasibility(p, RealVector::Constant(1, 5.0)).worst_violation == doctest::Approx(1.0));
    CHECK_THROWS_AS(socp::check_feasibility(p, RealVector::Zero(2)), std::invalid_argument);

    auto q = unit_disk();
    q.nonneg = {1};
    RealVector x(2);
    x << 0.0, -0.25;
    const auto r = socp::check_feasibility(q, x);
    CHECK(r.nonneg_violation == doctest::Approx(0.25));
    CHECK(r.worst_violation == doctest::Approx(0.25));
}

TEST_CASE("scaling a cone keeps the violation indicator")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto rp = testkit::random_low_dim_program(rng, 2, 3);
        auto scaled = rp.program;
        const double beta = 0.01 + 50.0 * std::abs(nd(rng));
        auto& cone = scaled.cones[static_cast<size_t>(trial % 3)];
        cone.A *= beta;
        cone.b *= beta;
        cone.f *= beta;
        cone.g *= beta;
        for (int k = 0; k < 50; ++k) {
            RealVector x(2);
            x << 3.0 * nd(rng), 3.0 * nd(rng);
            const bool a = socp::check_feasibility(rp.program, x).worst_violation > 0.0;
            const bool b = socp::check_feasibility(scaled, x).worst_violation > 0.0;
            CHECK(a == b);
        }
    }
}

TEST_CASE("low-dimensional programs agree with the boundary search")
{
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 12; ++trial) {
        const Index n = 1 + trial % 2;
        const auto rp = testkit::random_low_dim_program(rng, n, 1 + trial % 4);
        const double oracle = testkit::boundary_search_optimum(rp);
        const auto s = socp::solve(rp.program);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(std::abs(s.objective - oracle) <= 1e-4);
    }
}

TEST_CASE("planted programs recover the planted optimum")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const auto pp = testkit::planted_program(rng, 3 + trial % 6, 1 + trial % 4);
        const auto s = socp::solve(pp.program);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(std::abs(s.objective - pp.optimum) <= 1e-4 * std::max(1.0, std::abs(pp.optimum)));
        CHECK(socp::check_feasibility(pp.program, s.x).worst_violation <= 1e-7);
    }
}

TEST_CASE("relaxing a cone never increases the optimum")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        const auto pp = testkit::planted_program(rng, 4, 3);
        auto relaxed = pp.program;
        relaxed.cones[0].g += 0.3;
        const auto a = socp::solve(pp.program);
        const auto b = socp::solve(relaxed);
        REQUIRE(a.optimal());
        REQUIRE(b.optimal());
        CHECK(b.objective <= a.objective + 2e-7 * std::max(1.0, std::abs(a.objective)));
    }
}

TEST_CASE("solves are deterministic")
{
    std::mt19937_64 rng(3);
    const auto pp = testkit::planted_program(rng, 6, 4);
    const auto a = socp::solve(pp.program);
    const auto b = socp::solve(pp.program);
    CHECK(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    CHECK(a.x == b.x);
}

TEST_CASE("write_program emits one record per line")
{
    std::ostringstream os;
    socp::write_program(os, unit_disk());
    const auto text = os.str();
    CHECK(text.find("n 2") != std::string::npos);
    CHECK(!text.empty());
    CHECK(text.back() == '\n');
}
