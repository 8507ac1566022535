// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sparsewb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmegaSlack = 1e-12;
constexpr double kAngleSlack = 1e-9;

void check_omega_theta(double omega, double theta_deg)
{
    if (!(omega > 0.0) || omega > kPi + kOmegaSlack) {
        throw std::invalid_argument("normalized frequency must lie in (0, pi], got " + std::to_string(omega));
    }
    if (!(theta_deg >= 0.0) || theta_deg > 180.0) {
        throw std::invalid_argument("arrival angle must lie in [0, 180] degrees, got " + std::to_string(theta_deg));
    }
}

bool overlaps(const AngleInterval& a, const AngleInterval& b)
{
    return a.lo_deg <= b.hi_deg && b.lo_deg <= a.hi_deg;
}

// Samples lo, lo + step, ... up to hi (inclusive). Values are computed from the
// integer index so that repeated calls give bit-identical grids.
void sample_interval(double lo, double hi, double step, bool mainlobe, std::vector<AngleSample>& out)
{
    const auto n = static_cast<long>(std::floor((hi - lo) / step + kAngleSlack));
    for (long i = 0; i <= n; ++i) {
        out.push_back({lo + static_cast<double>(i) * step, mainlobe});
    }
}

}  // namespace

ArrayGrid::ArrayGrid(double aperture, Index count) : aperture_(aperture)
{
    if (count < 2) {
        throw std::invalid_argument("grid needs at least two positions");
    }
    if (!(aperture > 0.0)) {
        throw std::invalid_argument("grid aperture must be positive");
    }
    positions_.resize(static_cast<size_t>(count));
    const double denom = static_cast<double>(count - 1);
    for (Index m = 0; m < count; ++m) {
        positions_[static_cast<size_t>(m)] = static_cast<double>(m) * aperture / denom;
    }
    positions_.back() = aperture;
}

ArrayGrid build_grid(double aperture, Index count) { return ArrayGrid(aperture, count); }

void TdlConfig::validate() const
{
    if (taps < 1) {
        throw std::invalid_argument("TDL length must be at least 1");
    }
}

void SamplingSpec::validate() const
{
    auto in_band = [](double w) { return w > 0.0 && w <= kPi + kOmegaSlack; };
    if (!in_band(omega_lo) || !in_band(omega_hi)) {
        throw std::invalid_argument("frequency band must lie in (0, pi]");
    }
    if (omega_lo > omega_hi) {
        throw std::invalid_argument("omega_lo exceeds omega_hi");
    }
    if (!(omega_step > 0.0)) {
        throw std::invalid_argument("omega_step must be positive");
    }
    if (omega_ref < omega_lo - kOmegaSlack || omega_ref > omega_hi + kOmegaSlack) {
        throw std::invalid_argument("reference frequency must lie inside the band");
    }
    if (!(mainlobe_deg >= 0.0 && mainlobe_deg <= 180.0)) {
        throw std::invalid_argument("mainlobe direction must lie in [0, 180] degrees");
    }
    if (!(mainlobe_halfwidth_deg >= 0.0)) {
        throw std::invalid_argument("mainlobe half-width must be non-negative");
    }
    if (!(angle_step_deg > 0.0)) {
        throw std::invalid_argument("angle_step_deg must be positive");
    }
    const AngleInterval main{mainlobe_deg - mainlobe_halfwidth_deg, mainlobe_deg + mainlobe_halfwidth_deg};
    for (size_t i = 0; i < sidelobe_regions.size(); ++i) {
        const auto& r = sidelobe_regions[i];
        if (!(r.lo_deg >= 0.0 && r.hi_deg <= 180.0 && r.lo_deg <= r.hi_deg)) {
            throw std::invalid_argument("sidelobe region must be an ordered interval inside [0, 180]");
        }
        if (overlaps(r, main)) {
            throw std::invalid_argument("sidelobe region overlaps the mainlobe");
        }
        for (size_t k = i + 1; k < sidelobe_regions.size(); ++k) {
            if (overlaps(r, sidelobe_regions[k])) {
                throw std::invalid_argument("sidelobe regions must be pairwise disjoint");
            }
        }
    }
}

std::vector<double> SamplingSpec::frequencies() const
{
    const auto k_count = static_cast<long>(std::floor((omega_hi - omega_lo) / omega_step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<size_t>(k_count));
    for (long k = 0; k < k_count; ++k) {
        double w = omega_lo + static_cast<double>(k) * omega_step;
        if (w > omega_hi) {
            w = omega_hi;  // rounding at the band edge
        }
        out.push_back(w);
    }
    return out;
}

std::vector<AngleSample> SamplingSpec::angles() const
{
    std::vector<AngleSample> out;
    if (mainlobe_halfwidth_deg > 0.0) {
        const double lo = std::max(0.0, mainlobe_deg - mainlobe_halfwidth_deg);
        const double hi = std::min(180.0, mainlobe_deg + mainlobe_halfwidth_deg);
        sample_interval(lo, hi, angle_step_deg, true, out);
    } else {
        out.push_back({mainlobe_deg, true});
    }
    for (const auto& r : sidelobe_regions) {
        sample_interval(r.lo_deg, r.hi_deg, angle_step_deg, false, out);
    }
    std::stable_sort(out.begin(), out.end(), [](const AngleSample& a, const AngleSample& b) { return a.deg < b.deg; });
    return out;
}

bool SamplingSpec::in_sidelobe(double deg) const
{
    return std::any_of(sidelobe_regions.begin(), sidelobe_regions.end(),
                       [deg](const AngleInterval& r) { return deg >= r.lo_deg && deg <= r.hi_deg; });
}

SamplingSpec broadside_sampling(MainlobePhase phase)
{
    SamplingSpec spec;
    spec.mainlobe_phase = phase;
    return spec;
}

WeightVector::WeightVector(Index sensors, Index taps)
    : sensors_(sensors), taps_(taps), flat_(RealVector::Zero(sensors * taps))
{
}

WeightVector::WeightVector(Index sensors, Index taps, RealVector flat)
    : sensors_(sensors), taps_(taps), flat_(std::move(flat))
{
    if (flat_.size() != sensors * taps) {
        throw std::invalid_argument("weight vector length must equal sensors * taps");
    }
}

RealVector WeightVector::group_norms() const
{
    RealVector norms(sensors_);
    for (Index m = 0; m < sensors_; ++m) {
        norms[m] = group(m).norm();
    }
    return norms;
}

AugmentedWeight::AugmentedWeight(Index sensors, Index taps)
    : sensors_(sensors), taps_(taps), flat_(RealVector::Zero(sensors * (taps + 1)))
{
}

AugmentedWeight::AugmentedWeight(Index sensors, Index taps, RealVector flat)
    : sensors_(sensors), taps_(taps), flat_(std::move(flat))
{
    if (flat_.size() != sensors * (taps + 1)) {
        throw std::invalid_argument("augmented weight length must equal sensors * (taps + 1)");
    }
}

AugmentedWeight AugmentedWeight::from_parts(const WeightVector& w, const RealVector& t)
{
    if (t.size() != w.sensors()) {
        throw std::invalid_argument("one group bound per sensor is required");
    }
    AugmentedWeight out(w.sensors(), w.taps());
    for (Index m = 0; m < w.sensors(); ++m) {
        out.flat_[t_slot(m, w.taps())] = t[m];
        out.flat_.segment(w_slot(m, 0, w.taps()), w.taps()) = w.group(m);
    }
    return out;
}

RealVector AugmentedWeight::t_values() const
{
    RealVector t(sensors_);
    for (Index m = 0; m < sensors_; ++m) {
        t[m] = flat_[t_slot(m, taps_)];
    }
    return t;
}

WeightVector AugmentedWeight::weights() const
{
    WeightVector w(sensors_, taps_);
    for (Index m = 0; m < sensors_; ++m) {
        w.group(m) = flat_.segment(w_slot(m, 0, taps_), taps_);
    }
    return w;
}

double mu(double position) { return 2.0 * position; }

double cos_deg(double theta_deg)
{
    // sin((90 - theta) deg) is exactly 0 at broadside and exactly +-1 at endfire.
    return std::sin((90.0 - theta_deg) * kPi / 180.0);
}

ComplexVector steering_vector(std::span<const double> positions, const TdlConfig& tdl, double omega,
                              double theta_deg)
{
    tdl.validate();
    check_omega_theta(omega, theta_deg);
    const Index taps = tdl.taps;
    const auto sensors = static_cast<Index>(positions.size());
    const double c = cos_deg(theta_deg);
    ComplexVector s(sensors * taps);
    for (Index m = 0; m < sensors; ++m) {
        const double delay = mu(positions[static_cast<size_t>(m)]) * c;
        for (Index j = 0; j < taps; ++j) {
            s[m * taps + j] = std::polar(1.0, -omega * (delay + static_cast<double>(j)));
        }
    }
    return s;
}

ComplexVector steering_vector(const ArrayGrid& grid, const TdlConfig& tdl, double omega, double theta_deg)
{
    return steering_vector(grid.positions(), tdl, omega, theta_deg);
}

ComplexVector augmented_steering_vector(std::span<const double> positions, const TdlConfig& tdl, double omega,
                                        double theta_deg)
{
    const ComplexVector plain = steering_vector(positions, tdl, omega, theta_deg);
    const Index taps = tdl.taps;
    const auto sensors = static_cast<Index>(positions.size());
    ComplexVector s = ComplexVector::Zero(sensors * (taps + 1));
    for (Index m = 0; m < sensors; ++m) {
        s.segment(m * (taps + 1) + 1, taps) = plain.segment(m * taps, taps);
    }
    return s;
}

ComplexVector augmented_steering_vector(const ArrayGrid& grid, const TdlConfig& tdl, double omega,
                                        double theta_deg)
{
    return augmented_steering_vector(grid.positions(), tdl, omega, theta_deg);
}

SteeringMatrix build_steering_matrix(std::span<const double> positions, const TdlConfig& tdl,
                                     const SamplingSpec& spec, bool augmented)
{
    spec.validate();
    tdl.validate();
    SteeringMatrix out;
    out.augmented = augmented;
    out.sensors = static_cast<Index>(positions.size());
    out.taps = tdl.taps;
    out.frequencies = spec.frequencies();
    out.angles = spec.angles();
    if (out.frequencies.empty() || out.angles.empty()) {
        throw std::invalid_argument("sampling grid is empty");
    }
    const Index rows = out.sensors * (augmented ? tdl.taps + 1 : tdl.taps);
    const auto k_count = static_cast<Index>(out.frequencies.size());
    const auto l_count = static_cast<Index>(out.angles.size());
    out.entries.resize(rows, k_count * l_count);
    for (Index k = 0; k < k_count; ++k) {
        for (Index l = 0; l < l_count; ++l) {
            const double w = out.frequencies[static_cast<size_t>(k)];
            const double th = out.angles[static_cast<size_t>(l)].deg;
            out.entries.col(out.column(k, l)) = augmented ? augmented_steering_vector(positions, tdl, w, th)
                                                          : steering_vector(positions, tdl, w, th);
        }
    }
    return out;
}

SteeringMatrix build_steering_matrix(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& spec,
                                     bool augmented)
{
    return build_steering_matrix(grid.positions(), tdl, spec, augmented);
}

Complex response(const RealVector& w, const ComplexVector& s)
{
    if (w.size() != s.size()) {
        throw std::invalid_argument("weight and steering vector lengths differ");
    }
    Complex acc{0.0, 0.0};
    for (Index i = 0; i < w.size(); ++i) {
        acc += w[i] * s[i];
    }
    return acc;
}

Complex response(const ComplexVector& w, const ComplexVector& s)
{
    if (w.size() != s.size()) {
        throw std::invalid_argument("weight and steering vector lengths differ");
    }
    return w.dot(s);  // Eigen's dot conjugates the left operand
}

Complex response(const WeightVector& w, const ComplexVector& s) { return response(w.flat(), s); }

Complex response(const AugmentedWeight& w, const ComplexVector& s) { return response(w.flat(), s); }

}  // namespace sparsewb
