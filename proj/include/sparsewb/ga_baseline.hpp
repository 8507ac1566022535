// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"
#include "sparsewb/design_cs.hpp"
#include "sparsewb/socp.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sparsewb {

/// Inner problem of the GA fitness: the best TDL weights for a fixed geometry.
struct JclsSpec {
    /// Response-variation bound; absent means unconstrained least squares.
    std::optional<double> sigma = 0.01;
    RvAngles rv_angles = RvAngles::All;
    RvNormalization rv_normalization = RvNormalization::Mean;
    socp::SolverSettings solver;
};

struct JclsResult {
    /// min ||p_r - w^H S||^2 subject to ||L^T w||^2 <= sigma^2
    double value = 0.0;
    WeightVector weights;
    socp::SolveStatus status = socp::SolveStatus::NumericalFailure;
};

/// Throws std::runtime_error when the inner solve does not reach optimality.
JclsResult j_cls_solve(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
                       const JclsSpec& spec);
double j_cls(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
             const JclsSpec& spec);

struct GaConfig {
    int population = 50;
    int generations = 200;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    /// Standard deviation of the Gaussian mutation in wavelengths; absent means 0.05 * aperture.
    std::optional<double> mutation_sigma;
    int tournament_size = 3;
    double blend_alpha = 0.5;
    double min_spacing = 0.0;
    /// Keeps the first sensor at position 0.
    bool pin_first = false;
    std::uint64_t seed = 1;
    /// Worker threads for fitness evaluation; 0 picks the hardware concurrency.
    int threads = 0;

    void validate() const;
};

struct Chromosome {
    std::vector<double> positions;
};

/// Sorts, clamps to [0, aperture] and enforces min_spacing between neighbours.
void repair(Chromosome& c, double aperture, double min_spacing, bool pin_first);

/// True when c is sorted, inside [0, aperture] and respects min_spacing.
bool is_valid(const Chromosome& c, double aperture, double min_spacing);

struct GaResult {
    Chromosome best;
    /// Best fitness 1/J_CLS after every generation, starting with the initial population.
    std::vector<double> fitness_history;
    double best_jcls = 0.0;
    WeightVector best_weights;
    long evaluations = 0;
    double seconds = 0.0;
};

/// Called with the generation number and the population after it is formed.
using GaAudit = std::function<void(int, const std::vector<Chromosome>&)>;

GaResult run_ga(const GaConfig& config, int n_sensors, double aperture, const TdlConfig& tdl,
                const SamplingSpec& sampling, const JclsSpec& jcls, const GaAudit& audit = {});

}  // namespace sparsewb
