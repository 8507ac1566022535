// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include "sparsewb/array_model.hpp"
#include "sparsewb/design_cs.hpp"

#include <span>
#include <vector>

namespace sparsewb {

inline constexpr double kDbFloor = -120.0;

/// Response magnitude and phase on a frequency x angle grid.
struct BeampatternGrid {
    std::vector<double> frequencies;
    std::vector<double> angles_deg;
    ComplexMatrix response;
    RealMatrix magnitude_db;
    RealMatrix phase_rad;
};

/// 20 log10 |p|, floored at kDbFloor.
double to_db(Complex p);

/// Evaluation grid finer than the design grid.
struct DenseGrid {
    double omega_step = 0.025 * 3.141592653589793;
    double angle_step_deg = 0.5;
};

std::vector<double> frequency_grid(double lo, double hi, double step);
std::vector<double> angle_grid(double lo_deg, double hi_deg, double step_deg);

/// Frequencies of the design band sampled at the dense step; angles over [0, 180].
std::vector<double> dense_frequencies(const SamplingSpec& sampling, const DenseGrid& dense = {});
std::vector<double> dense_angles(const DenseGrid& dense = {});

/// Pattern of a design with one weight group per listed position. Throws
/// std::invalid_argument when no position is given.
BeampatternGrid beampattern(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                            const std::vector<double>& frequencies, const std::vector<double>& angles_deg);

/// Pattern of a design result restricted to its active sensors.
BeampatternGrid beampattern(const DesignResult& design, const ArrayGrid& grid, const TdlConfig& tdl,
                            const std::vector<double>& frequencies, const std::vector<double>& angles_deg);

/// Weights and positions of the active sensors of a design.
struct ActiveDesign {
    std::vector<double> positions;
    WeightVector weights;
};
ActiveDesign active_design(const DesignResult& design, const ArrayGrid& grid);

/// (last - first) / (count - 1) of sorted positions.
double mean_adjacent_spacing(std::span<const double> positions);

/// Response variation summed over the sampled angles and every frequency
/// other than the reference one, with the same normalization as the design
/// constraint.
double response_variation(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                          const SamplingSpec& sampling, RvAngles angles = RvAngles::All,
                          RvNormalization norm = RvNormalization::Mean);

/// ||p_r - w^H S|| over the design sampling.
double design_residual(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                       const SamplingSpec& sampling);

/// Largest magnitude in dB over every frequency and every grid angle inside the regions.
double sidelobe_peak(const BeampatternGrid& pattern, const std::vector<AngleInterval>& regions);

/// Per frequency: sidelobe peak minus the level at the grid angle closest to mainlobe_deg, in dB.
std::vector<double> relative_sidelobe_levels(const BeampatternGrid& pattern,
                                             const std::vector<AngleInterval>& regions, double mainlobe_deg);

/// Per frequency: angle of the largest magnitude.
std::vector<double> peak_angles(const BeampatternGrid& pattern);

}  // namespace sparsewb
