// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"
#include "sparsewb/reference_response.hpp"
#include "sparsewb/socp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sparsewb {

/// Angles entering the response-variation sum.
enum class RvAngles { All, Mainlobe };

/// Mean divides the squared deviation sum by the number of (frequency, angle)
/// difference samples; Sum leaves it unnormalized.
enum class RvNormalization { Mean, Sum };

struct DesignSpec {
    double alpha = 0.9;
    std::optional<double> sigma = 0.01;
    double epsilon = 9e-4;
    int max_reweight_iters = 10;
    /// Reweighting stops once the active set has stayed the same this many times in a row.
    int stable_iterations = 2;
    double activity_threshold_rel = 1e-3;
    /// Group norms at or below this value are inactive regardless of the relative threshold.
    double activity_floor_abs = 1e-6;
    RvAngles rv_angles = RvAngles::All;
    RvNormalization rv_normalization = RvNormalization::Mean;
    socp::SolverSettings solver;

    void validate() const;
};

/// L such that ||L^T w_hat||^2 is the response variation of an augmented
/// weight vector. Columns come in (real, imaginary) pairs, one pair per
/// (omega_k, theta_l) with omega_k != omega_ref, each holding
/// scale * (s_hat(omega_k, theta_l) - s_hat(omega_ref, theta_l)).
struct RvMatrix {
    RealMatrix columns;
    double omega_ref = 0.0;
    Index pairs = 0;
    double scale = 1.0;
};

struct ActiveSensor {
    Index index = 0;
    double position = 0.0;
};

struct SolveSummary {
    socp::SolveStatus status = socp::SolveStatus::NumericalFailure;
    double objective = 0.0;
    double primal_infeas = 0.0;
    double gap_estimate = 0.0;
    int iterations = 0;
    double seconds = 0.0;
};

struct DesignResult {
    bool success = false;
    socp::SolveStatus status = socp::SolveStatus::NumericalFailure;
    std::string message;
    WeightVector weights;
    RealVector t;
    RealVector group_norms;
    std::vector<ActiveSensor> active;
    /// ||p_r - w_hat^H S_hat||_2 recomputed from the raw matrices.
    double residual = 0.0;
    /// ||L^T w_hat||^2 when the response-variation constraint was used.
    std::optional<double> rv_value;
    /// Weighted objective sum_m a_m t_m of the final solve.
    double objective = 0.0;
    std::vector<double> objective_trace;
    std::vector<Index> active_count_trace;
    std::vector<SolveSummary> solver_stats;
    /// Wall time of the solver calls, seconds.
    double solve_seconds = 0.0;
};

/// sum_m ||w_m||_2
double group_l1(const WeightVector& w);

/// Group-sparse program over the augmented variables:
///   minimize   sum_m a_m t_m
///   subject to ||p_r - w_hat^H S_hat||_2 <= alpha,
///              ||w_m||_2 <= t_m, t_m >= 0,
///              ||L^T w_hat||_2 <= sigma   (when rv is given).
socp::ConicProgram assemble_problem(const SteeringMatrix& s_hat, const ReferenceResponse& p_r,
                                    const DesignSpec& spec, const RealVector& group_weights,
                                    const RvMatrix* rv = nullptr);

RvMatrix build_rv_matrix(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
                         RvAngles angles = RvAngles::All, RvNormalization norm = RvNormalization::Mean);
RvMatrix build_rv_matrix(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                         RvAngles angles = RvAngles::All, RvNormalization norm = RvNormalization::Mean);

/// Sensors with group norm above threshold_rel times the largest group norm
/// and above floor_abs.
std::vector<ActiveSensor> extract_active(const RealVector& group_norms, std::span<const double> positions,
                                         double threshold_rel, double floor_abs = 0.0);

DesignResult solve_design(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                          const DesignSpec& spec, bool use_rv);

/// a_m = 1 / (||w_m||_2 + epsilon) for every group norm.
RealVector reweight_factors(const RealVector& group_norms, double epsilon);

DesignResult reweighted_design(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                               const DesignSpec& spec, bool use_rv);

/// Plain l1 formulation over real weights (w = w+ - w-), solved with the same
/// conic solver. With J = 1 it is the narrowband special case of the group
/// formulation.
struct PlainL1Result {
    socp::SolveStatus status = socp::SolveStatus::NumericalFailure;
    WeightVector weights;
    double objective = 0.0;
};

socp::ConicProgram assemble_plain_l1(const SteeringMatrix& s, const ReferenceResponse& p_r, double alpha);
PlainL1Result solve_plain_l1(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                             double alpha, const socp::SolverSettings& settings = {});

}  // namespace sparsewb
