// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace sparsewb {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Uniform grid of candidate sensor positions. Positions are in units of the
/// wavelength at normalized frequency pi; the first sensor sits at 0 and the
/// last one at the aperture.
class ArrayGrid {
public:
    /// Throws std::invalid_argument when count < 2 or aperture <= 0.
    ArrayGrid(double aperture, Index count);

    [[nodiscard]] Index size() const { return static_cast<Index>(positions_.size()); }
    [[nodiscard]] double aperture() const { return aperture_; }
    [[nodiscard]] double spacing() const { return aperture_ / static_cast<double>(size() - 1); }
    [[nodiscard]] std::span<const double> positions() const { return positions_; }
    [[nodiscard]] double operator[](Index m) const { return positions_[static_cast<size_t>(m)]; }

private:
    double aperture_;
    std::vector<double> positions_;
};

ArrayGrid build_grid(double aperture, Index count);

/// Tapped delay line attached to every sensor.
struct TdlConfig {
    Index taps = 1;
    void validate() const;
};

enum class MainlobePhase {
    Unit,       // target 1 at the mainlobe
    GroupDelay  // target exp(-i*omega*(J-1)/2), a linear-phase delay of half the TDL
};

/// Closed interval of arrival angles in degrees.
struct AngleInterval {
    double lo_deg = 0.0;
    double hi_deg = 0.0;
};

struct AngleSample {
    double deg = 0.0;
    bool mainlobe = false;
};

/// Frequency band and angle grid over which responses are matched.
struct SamplingSpec {
    double omega_lo = 0.5 * 3.141592653589793;
    double omega_hi = 3.141592653589793;
    double omega_step = 0.05 * 3.141592653589793;
    double omega_ref = 3.141592653589793;
    double mainlobe_deg = 90.0;
    /// Half-width of the sampled mainlobe interval; 0 samples only mainlobe_deg.
    double mainlobe_halfwidth_deg = 0.0;
    std::vector<AngleInterval> sidelobe_regions{{0.0, 80.0}, {100.0, 180.0}};
    double angle_step_deg = 1.0;
    MainlobePhase mainlobe_phase = MainlobePhase::GroupDelay;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    /// The K sampled frequencies omega_lo + k*omega_step.
    [[nodiscard]] std::vector<double> frequencies() const;

    /// Mainlobe and sidelobe samples, sorted by angle.
    [[nodiscard]] std::vector<AngleSample> angles() const;

    [[nodiscard]] bool in_sidelobe(double deg) const;
};

/// The paper-style broadside sampling: band [0.5pi, pi] every 0.05pi,
/// sidelobes [0,80] and [100,180] every degree, mainlobe at 90.
SamplingSpec broadside_sampling(MainlobePhase phase = MainlobePhase::GroupDelay);

/// Real TDL coefficients, sensor-major and tap-minor.
class WeightVector {
public:
    WeightVector() = default;
    WeightVector(Index sensors, Index taps);
    WeightVector(Index sensors, Index taps, RealVector flat);

    [[nodiscard]] Index sensors() const { return sensors_; }
    [[nodiscard]] Index taps() const { return taps_; }
    [[nodiscard]] const RealVector& flat() const { return flat_; }
    RealVector& flat() { return flat_; }

    [[nodiscard]] auto group(Index m) const { return flat_.segment(m * taps_, taps_); }
    auto group(Index m) { return flat_.segment(m * taps_, taps_); }
    [[nodiscard]] double operator()(Index m, Index j) const { return flat_[m * taps_ + j]; }
    double& operator()(Index m, Index j) { return flat_[m * taps_ + j]; }

    /// l2 norm of every sensor's taps.
    [[nodiscard]] RealVector group_norms() const;

private:
    Index sensors_ = 0;
    Index taps_ = 0;
    RealVector flat_;
};

/// Interleaved layout [t_0, w_{0,0..J-1}, t_1, ...] of length M(J+1).
class AugmentedWeight {
public:
    AugmentedWeight(Index sensors, Index taps);
    AugmentedWeight(Index sensors, Index taps, RealVector flat);

    static AugmentedWeight from_parts(const WeightVector& w, const RealVector& t);

    [[nodiscard]] Index sensors() const { return sensors_; }
    [[nodiscard]] Index taps() const { return taps_; }
    [[nodiscard]] const RealVector& flat() const { return flat_; }
    RealVector& flat() { return flat_; }

    [[nodiscard]] static Index t_slot(Index m, Index taps) { return m * (taps + 1); }
    [[nodiscard]] static Index w_slot(Index m, Index j, Index taps) { return m * (taps + 1) + 1 + j; }

    [[nodiscard]] double t(Index m) const { return flat_[t_slot(m, taps_)]; }
    [[nodiscard]] RealVector t_values() const;
    [[nodiscard]] WeightVector weights() const;

private:
    Index sensors_;
    Index taps_;
    RealVector flat_;
};

/// Delay of a sensor in sample periods per unit cos(theta): d/(c*Ts) = 2d
/// for d in wavelengths at omega = pi.
double mu(double position);

/// cos(theta) for theta in degrees, exact at 0, 90 and 180.
double cos_deg(double theta_deg);

/// Entry (m, j) = exp(-i*omega*(mu(d_m) cos(theta) + j)).
ComplexVector steering_vector(std::span<const double> positions, const TdlConfig& tdl, double omega,
                              double theta_deg);
ComplexVector steering_vector(const ArrayGrid& grid, const TdlConfig& tdl, double omega, double theta_deg);

/// Steering vector with a zero in front of each sensor block, aligned with AugmentedWeight.
ComplexVector augmented_steering_vector(std::span<const double> positions, const TdlConfig& tdl, double omega,
                                        double theta_deg);
ComplexVector augmented_steering_vector(const ArrayGrid& grid, const TdlConfig& tdl, double omega,
                                        double theta_deg);

/// Steering vectors for every sampled (omega, theta) pair. Column k*L + l holds
/// frequency k and angle l.
struct SteeringMatrix {
    ComplexMatrix entries;
    bool augmented = false;
    Index sensors = 0;
    Index taps = 0;
    std::vector<double> frequencies;
    std::vector<AngleSample> angles;

    [[nodiscard]] Index column(Index k, Index l) const { return k * static_cast<Index>(angles.size()) + l; }
};

SteeringMatrix build_steering_matrix(std::span<const double> positions, const TdlConfig& tdl,
                                     const SamplingSpec& spec, bool augmented);
SteeringMatrix build_steering_matrix(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& spec,
                                     bool augmented);

/// w^H s. Throws std::invalid_argument on a length mismatch.
Complex response(const RealVector& w, const ComplexVector& s);
Complex response(const ComplexVector& w, const ComplexVector& s);
Complex response(const WeightVector& w, const ComplexVector& s);
Complex response(const AugmentedWeight& w, const ComplexVector& s);

}  // namespace sparsewb
