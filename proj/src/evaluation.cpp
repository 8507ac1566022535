// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/evaluation.hpp"

#include "sparsewb/reference_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsewb {

namespace {

constexpr double kGridSlack = 1e-9;

Complex pattern_value(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                      double omega, double theta_deg)
{
    return response(weights, steering_vector(positions, tdl, omega, theta_deg));
}

void check_design(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl)
{
    tdl.validate();
    if (positions.empty()) {
        throw std::invalid_argument("design has no active sensors");
    }
    if (weights.sensors() != static_cast<Index>(positions.size()) || weights.taps() != tdl.taps) {
        throw std::invalid_argument("weights do not match the positions and TDL length");
    }
}

}  // namespace

double to_db(Complex p)
{
    const double mag = std::abs(p);
    if (!(mag > 0.0)) {
        return kDbFloor;
    }
    return std::max(kDbFloor, 20.0 * std::log10(mag));
}

std::vector<double> frequency_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || lo > hi) {
        throw std::invalid_argument("invalid frequency grid");
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + kGridSlack));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) {
        out.push_back(std::min(hi, lo + static_cast<double>(i) * step));
    }
    return out;
}

std::vector<double> angle_grid(double lo_deg, double hi_deg, double step_deg)
{
    if (!(step_deg > 0.0) || lo_deg > hi_deg) {
        throw std::invalid_argument("invalid angle grid");
    }
    const auto n = static_cast<long>(std::floor((hi_deg - lo_deg) / step_deg + kGridSlack));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) {
        out.push_back(std::min(hi_deg, lo_deg + static_cast<double>(i) * step_deg));
    }
    return out;
}

std::vector<double> dense_frequencies(const SamplingSpec& sampling, const DenseGrid& dense)
{
    sampling.validate();
    return frequency_grid(sampling.omega_lo, sampling.omega_hi, dense.omega_step);
}

std::vector<double> dense_angles(const DenseGrid& dense) { return angle_grid(0.0, 180.0, dense.angle_step_deg); }

BeampatternGrid beampattern(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                            const std::vector<double>& frequencies, const std::vector<double>& angles_deg)
{
    check_design(weights, positions, tdl);
    if (frequencies.empty() || angles_deg.empty()) {
        throw std::invalid_argument("empty evaluation grid");
    }
    BeampatternGrid out;
    out.frequencies = frequencies;
    out.angles_deg = angles_deg;
    const auto k_count = static_cast<Index>(frequencies.size());
    const auto l_count = static_cast<Index>(angles_deg.size());
    out.response.resize(k_count, l_count);
    out.magnitude_db.resize(k_count, l_count);
    out.phase_rad.resize(k_count, l_count);
    for (Index k = 0; k < k_count; ++k) {
        for (Index l = 0; l < l_count; ++l) {
            const Complex p = pattern_value(weights, positions, tdl, frequencies[static_cast<size_t>(k)],
                                            angles_deg[static_cast<size_t>(l)]);
            out.response(k, l) = p;
            out.magnitude_db(k, l) = to_db(p);
            out.phase_rad(k, l) = std::arg(p);
        }
    }
    return out;
}

ActiveDesign active_design(const DesignResult& design, const ArrayGrid& grid)
{
    ActiveDesign out;
    const Index taps = design.weights.taps();
    out.weights = WeightVector(static_cast<Index>(design.active.size()), taps);
    for (size_t i = 0; i < design.active.size(); ++i) {
        const Index m = design.active[i].index;
        out.positions.push_back(grid[m]);
        out.weights.group(static_cast<Index>(i)) = design.weights.group(m);
    }
    return out;
}

BeampatternGrid beampattern(const DesignResult& design, const ArrayGrid& grid, const TdlConfig& tdl,
                            const std::vector<double>& frequencies, const std::vector<double>& angles_deg)
{
    const auto active = active_design(design, grid);
    return beampattern(active.weights, active.positions, tdl, frequencies, angles_deg);
}

double mean_adjacent_spacing(std::span<const double> positions)
{
    if (positions.size() < 2) {
        throw std::invalid_argument("mean spacing needs at least two positions");
    }
    if (!std::is_sorted(positions.begin(), positions.end())) {
        throw std::invalid_argument("positions must be sorted");
    }
    return (positions.back() - positions.front()) / static_cast<double>(positions.size() - 1);
}

double response_variation(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                          const SamplingSpec& sampling, RvAngles angles, RvNormalization norm)
{
    check_design(weights, positions, tdl);
    sampling.validate();
    const auto freqs = sampling.frequencies();
    if (freqs.size() < 2) {
        throw std::invalid_argument("response variation needs at least two sampled frequencies");
    }
    double total = 0.0;
    long pairs = 0;
    for (const auto& a : sampling.angles()) {
        if (angles == RvAngles::Mainlobe && !a.mainlobe) {
            continue;
        }
        const Complex ref = pattern_value(weights, positions, tdl, sampling.omega_ref, a.deg);
        for (double w : freqs) {
            if (std::abs(w - sampling.omega_ref) <= 1e-12) {
                continue;
            }
            total += std::norm(pattern_value(weights, positions, tdl, w, a.deg) - ref);
            ++pairs;
        }
    }
    if (norm == RvNormalization::Mean && pairs > 0) {
        total /= static_cast<double>(pairs);
    }
    return total;
}

double design_residual(const WeightVector& weights, std::span<const double> positions, const TdlConfig& tdl,
                       const SamplingSpec& sampling)
{
    check_design(weights, positions, tdl);
    const auto ref = build_reference(sampling, tdl);
    const auto l_count = static_cast<Index>(ref.angles.size());
    double total = 0.0;
    for (size_t k = 0; k < ref.frequencies.size(); ++k) {
        for (Index l = 0; l < l_count; ++l) {
            const Complex p =
                pattern_value(weights, positions, tdl, ref.frequencies[k], ref.angles[static_cast<size_t>(l)].deg);
            total += std::norm(ref.values[static_cast<Index>(k) * l_count + l] - p);
        }
    }
    return std::sqrt(total);
}

double sidelobe_peak(const BeampatternGrid& pattern, const std::vector<AngleInterval>& regions)
{
    if (regions.empty()) {
        throw std::invalid_argument("no sidelobe regions given");
    }
    if (pattern.angles_deg.empty()) {
        throw std::invalid_argument("empty pattern");
    }
    const auto [lo_it, hi_it] = std::minmax_element(pattern.angles_deg.begin(), pattern.angles_deg.end());
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& r : regions) {
        if (r.lo_deg < *lo_it - kGridSlack || r.hi_deg > *hi_it + kGridSlack) {
            throw std::invalid_argument("sidelobe region lies outside the pattern's angle grid");
        }
        bool any = false;
        for (size_t l = 0; l < pattern.angles_deg.size(); ++l) {
            const double a = pattern.angles_deg[l];
            if (a >= r.lo_deg - kGridSlack && a <= r.hi_deg + kGridSlack) {
                any = true;
                peak = std::max(peak, pattern.magnitude_db.col(static_cast<Index>(l)).maxCoeff());
            }
        }
        if (!any) {
            throw std::invalid_argument("sidelobe region contains no grid angle");
        }
    }
    return peak;
}

std::vector<double> relative_sidelobe_levels(const BeampatternGrid& pattern,
                                             const std::vector<AngleInterval>& regions, double mainlobe_deg)
{
    sidelobe_peak(pattern, regions);
    size_t main_col = 0;
    for (size_t l = 1; l < pattern.angles_deg.size(); ++l) {
        if (std::abs(pattern.angles_deg[l] - mainlobe_deg) < std::abs(pattern.angles_deg[main_col] - mainlobe_deg)) {
            main_col = l;
        }
    }
    std::vector<double> out;
    for (Index k = 0; k < pattern.magnitude_db.rows(); ++k) {
        double peak = -std::numeric_limits<double>::infinity();
        for (size_t l = 0; l < pattern.angles_deg.size(); ++l) {
            const double a = pattern.angles_deg[l];
            for (const auto& r : regions) {
                if (a >= r.lo_deg - kGridSlack && a <= r.hi_deg + kGridSlack) {
                    peak = std::max(peak, pattern.magnitude_db(k, static_cast<Index>(l)));
                }
            }
        }
        out.push_back(peak - pattern.magnitude_db(k, static_cast<Index>(main_col)));
    }
    return out;
}

std::vector<double> peak_angles(const BeampatternGrid& pattern)
{
    std::vector<double> out;
    for (Index k = 0; k < pattern.magnitude_db.rows(); ++k) {
        Index best = 0;
        pattern.magnitude_db.row(k).maxCoeff(&best);
        out.push_back(pattern.angles_deg[static_cast<size_t>(best)]);
    }
    return out;
}

}  // namespace sparsewb
