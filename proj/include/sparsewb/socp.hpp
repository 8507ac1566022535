// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string_view>
#include <vector>

namespace sparsewb::socp {

using Index = Eigen::Index;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// ||A x_S + b||_2 <= f^T x_S + g, where x_S are the variables listed in
/// `support`. A has one column per support entry.
struct SocConstraint {
    std::vector<Index> support;
    RealMatrix A;
    RealVector b;
    RealVector f;
    double g = 0.0;

    [[nodiscard]] Index rows() const { return A.rows(); }
};

/// Builds a constraint that touches every one of the n variables.
SocConstraint dense_cone(RealMatrix A, RealVector b, RealVector f, double g);

/// minimize c^T x subject to the cones and x_j >= 0 for j in nonneg.
struct ConicProgram {
    Index n = 0;
    RealVector c;
    std::vector<SocConstraint> cones;
    std::vector<Index> nonneg;

    /// Throws std::invalid_argument on inconsistent dimensions.
    void validate() const;
};

struct SolverSettings {
    int max_iters = 200;
    double tol_feas = 1e-7;
    double tol_gap = 1e-7;
    /// A dual ray z with h^T z < 0 and ||G^T z|| <= tol_infeas * |h^T z| is
    /// accepted as an infeasibility certificate; it rules out feasible points
    /// with ||x|| below 1 / tol_infeas. The primal ray test for unboundedness
    /// uses the same threshold.
    double tol_infeas = 1e-6;
    /// Iterates whose dual residual is within this factor of tol_feas, while
    /// primal residual and gap meet their tolerances, are accepted when the
    /// method stalls before full accuracy.
    double reduced_dual_factor = 100.0;
    bool verbose = false;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIters, NumericalFailure };

std::string_view to_string(SolveStatus status);

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    RealVector x;
    double objective = 0.0;
    /// Lower bound from the dual iterate (meaningful when status is Optimal).
    double dual_objective = 0.0;
    /// Worst cone or sign violation of x.
    double primal_infeas = 0.0;
    /// Duality gap divided by max(1, |objective|).
    double gap_estimate = 0.0;
    int iterations = 0;

    [[nodiscard]] bool optimal() const { return status == SolveStatus::Optimal; }
};

struct FeasibilityReport {
    double worst_violation = 0.0;
    RealVector per_cone;
    double nonneg_violation = 0.0;
};

FeasibilityReport check_feasibility(const ConicProgram& program, const RealVector& x);

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and Mehrotra correction. Dense normal equations;
/// intended for programs with up to a few thousand variables.
ConicSolution solve(const ConicProgram& program, const SolverSettings& settings = {});

/// Plain-text dump of a program, one record per line, for offline cross-checks.
void write_program(std::ostream& out, const ConicProgram& program);

}  // namespace sparsewb::socp
