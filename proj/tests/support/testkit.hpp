// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"
#include "sparsewb/design_cs.hpp"
#include "sparsewb/ga_baseline.hpp"
#include "sparsewb/socp.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sparsewb::testkit {

/// Small wideband instance that solves in well under a second.
struct Instance {
    ArrayGrid grid{3.0, 12};
    TdlConfig tdl{3};
    SamplingSpec sampling;
    DesignSpec spec;
};

/// M = 12 over 3 wavelengths, J = 3, three frequencies, 10 degree angle step.
Instance small_instance(MainlobePhase phase = MainlobePhase::Unit);

/// J = 1, single frequency, 30 grid points.
Instance narrowband_instance();

/// Random program with a strictly feasible point and a bounding ball, n <= 2.
struct RandomProgram {
    socp::ConicProgram program;
    RealVector interior;
    double radius = 0.0;
};
RandomProgram random_low_dim_program(std::mt19937_64& rng, Index n, int cones);

/// Optimal value of an n <= 2 program by bisection on the objective level,
/// with a ternary search along each level line for the smallest violation.
double boundary_search_optimum(const RandomProgram& p);

/// Program with a planted primal-dual pair satisfying the optimality
/// conditions, so that its optimum is c^T x_star.
struct PlantedProgram {
    socp::ConicProgram program;
    RealVector x_star;
    double optimum = 0.0;
};
PlantedProgram planted_program(std::mt19937_64& rng, Index n, int cones);

/// Constrained least squares min ||A w - b||^2 s.t. ||L w||^2 <= sigma^2 for
/// explicit real matrices, solved through the secular equation in the
/// multiplier (bisection on lambda).
double constrained_lsq(const RealMatrix& a, const RealVector& b, const RealMatrix& l, std::optional<double> sigma);

/// J_CLS assembled directly from steering vectors and solved with constrained_lsq.
double jcls_oracle(const std::vector<double>& positions, const TdlConfig& tdl, const SamplingSpec& sampling,
                   std::optional<double> sigma, RvNormalization norm);

struct PropertyResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Every module invariant, checked on small instances.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed);

}  // namespace sparsewb::testkit
