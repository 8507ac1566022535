// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/design_cs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace sparsewb {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<Index> weight_rows(Index sensors, Index taps)
{
    std::vector<Index> rows;
    rows.reserve(static_cast<size_t>(sensors * taps));
    for (Index m = 0; m < sensors; ++m) {
        for (Index j = 0; j < taps; ++j) {
            rows.push_back(AugmentedWeight::w_slot(m, j, taps));
        }
    }
    return rows;
}

bool same_sampling(const std::vector<double>& fa, const std::vector<AngleSample>& aa, const std::vector<double>& fb,
                   const std::vector<AngleSample>& ab)
{
    if (fa != fb || aa.size() != ab.size()) {
        return false;
    }
    for (size_t i = 0; i < aa.size(); ++i) {
        if (aa[i].deg != ab[i].deg || aa[i].mainlobe != ab[i].mainlobe) {
            return false;
        }
    }
    return true;
}

// Data shared by every solve of one design instance.
struct DesignContext {
    SteeringMatrix s_hat;
    ReferenceResponse p_r;
    std::optional<RvMatrix> rv;

    DesignContext(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling, const DesignSpec& spec,
                  bool use_rv)
        : s_hat(build_steering_matrix(grid, tdl, sampling, true)), p_r(build_reference(sampling, tdl))
    {
        if (use_rv) {
            rv = build_rv_matrix(grid, tdl, sampling, spec.rv_angles, spec.rv_normalization);
        }
    }
};

SolveSummary summarize(const socp::ConicSolution& sol, double seconds)
{
    return {sol.status, sol.objective, sol.primal_infeas, sol.gap_estimate, sol.iterations, seconds};
}

// Fills weights, norms, active set and independently recomputed constraint values.
void extract(const DesignContext& ctx, const ArrayGrid& grid, const DesignSpec& spec, const RealVector& x,
             DesignResult& out)
{
    const AugmentedWeight w_hat(ctx.s_hat.sensors, ctx.s_hat.taps, x);
    out.weights = w_hat.weights();
    out.t = w_hat.t_values();
    out.group_norms = out.weights.group_norms();
    out.active = extract_active(out.group_norms, grid.positions(), spec.activity_threshold_rel,
                                spec.activity_floor_abs);
    const ComplexVector designed = ctx.s_hat.entries.transpose() * x.cast<Complex>();
    out.residual = (ctx.p_r.values - designed).norm();
    if (ctx.rv) {
        out.rv_value = (ctx.rv->columns.transpose() * x).squaredNorm();
    }
}

bool constraints_hold(const DesignResult& r, const DesignSpec& spec)
{
    constexpr double slack = 1e-6;
    if (r.residual > spec.alpha + slack) {
        return false;
    }
    if (r.rv_value && spec.sigma && std::sqrt(*r.rv_value) > *spec.sigma + slack) {
        return false;
    }
    return true;
}

void finalize_status(DesignResult& r, const DesignSpec& spec)
{
    if (r.status != socp::SolveStatus::Optimal) {
        r.success = false;
        r.message = std::string("solver returned ") + std::string(socp::to_string(r.status));
        return;
    }
    r.success = constraints_hold(r, spec);
    if (!r.success) {
        r.message = "solution violates the residual or response-variation bound";
    }
}

}  // namespace

void DesignSpec::validate() const
{
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    if (sigma && !(*sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    if (max_reweight_iters < 1 || stable_iterations < 1) {
        throw std::invalid_argument("reweighting iteration limits must be at least 1");
    }
    if (!(activity_threshold_rel > 0.0 && activity_threshold_rel < 1.0)) {
        throw std::invalid_argument("activity threshold must lie in (0, 1)");
    }
    if (!(activity_floor_abs >= 0.0)) {
        throw std::invalid_argument("activity floor must be non-negative");
    }
}

double group_l1(const WeightVector& w)
{
    double total = 0.0;
    for (Index m = 0; m < w.sensors(); ++m) {
        total += w.group(m).norm();
    }
    return total;
}

socp::ConicProgram assemble_problem(const SteeringMatrix& s_hat, const ReferenceResponse& p_r,
                                    const DesignSpec& spec, const RealVector& group_weights, const RvMatrix* rv)
{
    spec.validate();
    if (!s_hat.augmented) {
        throw std::invalid_argument("assemble_problem needs the augmented steering matrix");
    }
    const Index sensors = s_hat.sensors;
    const Index taps = s_hat.taps;
    const Index n = sensors * (taps + 1);
    if (s_hat.entries.rows() != n || p_r.values.size() != s_hat.entries.cols()) {
        throw std::invalid_argument("steering matrix and reference response sizes differ");
    }
    if (!same_sampling(s_hat.frequencies, s_hat.angles, p_r.frequencies, p_r.angles)) {
        throw std::invalid_argument("steering matrix and reference response use different sampling grids");
    }
    if (group_weights.size() != sensors || (group_weights.array() <= 0.0).any()) {
        throw std::invalid_argument("one positive weight per sensor is required");
    }
    if (rv != nullptr && rv->columns.rows() != n) {
        throw std::invalid_argument("response-variation matrix has the wrong row count");
    }
    if (rv != nullptr && !spec.sigma) {
        throw std::invalid_argument("response-variation constraint needs sigma");
    }

    socp::ConicProgram prog;
    prog.n = n;
    prog.c = RealVector::Zero(n);
    for (Index m = 0; m < sensors; ++m) {
        prog.c[AugmentedWeight::t_slot(m, taps)] = group_weights[m];
        prog.nonneg.push_back(AugmentedWeight::t_slot(m, taps));
    }

    const std::vector<Index> w_rows = weight_rows(sensors, taps);
    const auto n_w = static_cast<Index>(w_rows.size());
    const Index cols = s_hat.entries.cols();

    // ||p_r - S_hat^T w_hat|| <= alpha with real and imaginary parts stacked.
    socp::SocConstraint residual;
    residual.support = w_rows;
    residual.A.resize(2 * cols, n_w);
    for (Index i = 0; i < n_w; ++i) {
        const auto row = s_hat.entries.row(w_rows[static_cast<size_t>(i)]);
        residual.A.col(i).head(cols) = -row.real().transpose();
        residual.A.col(i).tail(cols) = -row.imag().transpose();
    }
    residual.b.resize(2 * cols);
    residual.b.head(cols) = p_r.values.real();
    residual.b.tail(cols) = p_r.values.imag();
    residual.f = RealVector::Zero(n_w);
    residual.g = spec.alpha;
    prog.cones.push_back(std::move(residual));

    for (Index m = 0; m < sensors; ++m) {
        socp::SocConstraint group;
        group.support.push_back(AugmentedWeight::t_slot(m, taps));
        for (Index j = 0; j < taps; ++j) {
            group.support.push_back(AugmentedWeight::w_slot(m, j, taps));
        }
        group.A = RealMatrix::Zero(taps, taps + 1);
        group.A.rightCols(taps).setIdentity();
        group.b = RealVector::Zero(taps);
        group.f = RealVector::Zero(taps + 1);
        group.f[0] = 1.0;
        group.g = 0.0;
        prog.cones.push_back(std::move(group));
    }

    if (rv != nullptr) {
        socp::SocConstraint variation;
        variation.support = w_rows;
        variation.A.resize(rv->columns.cols(), n_w);
        for (Index i = 0; i < n_w; ++i) {
            variation.A.col(i) = rv->columns.row(w_rows[static_cast<size_t>(i)]).transpose();
        }
        variation.b = RealVector::Zero(rv->columns.cols());
        variation.f = RealVector::Zero(n_w);
        variation.g = *spec.sigma;
        prog.cones.push_back(std::move(variation));
    }
    return prog;
}

RvMatrix build_rv_matrix(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
                         RvAngles angles, RvNormalization norm)
{
    sampling.validate();
    const auto freqs = sampling.frequencies();
    if (freqs.size() < 2) {
        throw std::invalid_argument("response variation needs at least two sampled frequencies");
    }
    std::vector<double> angle_list;
    for (const auto& a : sampling.angles()) {
        if (angles == RvAngles::All || a.mainlobe) {
            angle_list.push_back(a.deg);
        }
    }
    std::vector<double> diff_freqs;
    for (double w : freqs) {
        if (std::abs(w - sampling.omega_ref) > 1e-12) {
            diff_freqs.push_back(w);
        }
    }
    RvMatrix rv;
    rv.omega_ref = sampling.omega_ref;
    rv.pairs = static_cast<Index>(diff_freqs.size() * angle_list.size());
    if (rv.pairs == 0) {
        throw std::invalid_argument("response variation has no difference samples");
    }
    rv.scale = norm == RvNormalization::Mean ? 1.0 / std::sqrt(static_cast<double>(rv.pairs)) : 1.0;
    const auto rows = static_cast<Index>(positions.size()) * (tdl.taps + 1);
    rv.columns.resize(rows, 2 * rv.pairs);
    Index p = 0;
    for (double w : diff_freqs) {
        for (double th : angle_list) {
            const ComplexVector d = (augmented_steering_vector(positions, tdl, w, th) -
                                     augmented_steering_vector(positions, tdl, sampling.omega_ref, th)) *
                                    rv.scale;
            rv.columns.col(2 * p) = d.real();
            rv.columns.col(2 * p + 1) = d.imag();
            ++p;
        }
    }
    return rv;
}

RvMatrix build_rv_matrix(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                         RvAngles angles, RvNormalization norm)
{
    return build_rv_matrix(grid.positions(), tdl, sampling, angles, norm);
}

std::vector<ActiveSensor> extract_active(const RealVector& group_norms, std::span<const double> positions,
                                         double threshold_rel, double floor_abs)
{
    if (!(threshold_rel > 0.0 && threshold_rel < 1.0)) {
        throw std::invalid_argument("activity threshold must lie in (0, 1)");
    }
    if (!(floor_abs >= 0.0)) {
        throw std::invalid_argument("activity floor must be non-negative");
    }
    if (static_cast<size_t>(group_norms.size()) != positions.size()) {
        throw std::invalid_argument("one group norm per position is required");
    }
    std::vector<ActiveSensor> active;
    if (group_norms.size() == 0) {
        return active;
    }
    const double peak = group_norms.maxCoeff();
    if (!(peak > 0.0)) {
        return active;
    }
    for (Index m = 0; m < group_norms.size(); ++m) {
        if (group_norms[m] > threshold_rel * peak && group_norms[m] > floor_abs) {
            active.push_back({m, positions[static_cast<size_t>(m)]});
        }
    }
    return active;
}

DesignResult solve_design(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                          const DesignSpec& spec, bool use_rv)
{
    spec.validate();
    const DesignContext ctx(grid, tdl, sampling, spec, use_rv);
    const RealVector ones = RealVector::Ones(grid.size());
    const auto prog = assemble_problem(ctx.s_hat, ctx.p_r, spec, ones, ctx.rv ? &*ctx.rv : nullptr);

    const auto start = Clock::now();
    const auto sol = socp::solve(prog, spec.solver);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    DesignResult out;
    out.status = sol.status;
    out.solve_seconds = seconds;
    out.solver_stats.push_back(summarize(sol, seconds));
    extract(ctx, grid, spec, sol.x, out);
    out.objective = sol.objective;
    out.objective_trace.push_back(sol.objective);
    out.active_count_trace.push_back(static_cast<Index>(out.active.size()));
    finalize_status(out, spec);
    return out;
}

RealVector reweight_factors(const RealVector& group_norms, double epsilon)
{
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    return (group_norms.array() + epsilon).inverse().matrix();
}

DesignResult reweighted_design(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling,
                               const DesignSpec& spec, bool use_rv)
{
    spec.validate();
    const DesignContext ctx(grid, tdl, sampling, spec, use_rv);
    RealVector weights = RealVector::Ones(grid.size());
    auto prog = assemble_problem(ctx.s_hat, ctx.p_r, spec, weights, ctx.rv ? &*ctx.rv : nullptr);

    DesignResult out;
    std::vector<Index> previous;
    int unchanged = 0;
    for (int iter = 0; iter < spec.max_reweight_iters; ++iter) {
        for (Index m = 0; m < grid.size(); ++m) {
            prog.c[AugmentedWeight::t_slot(m, tdl.taps)] = weights[m];
        }
        const auto start = Clock::now();
        const auto sol = socp::solve(prog, spec.solver);
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        out.solve_seconds += seconds;
        out.solver_stats.push_back(summarize(sol, seconds));
        out.status = sol.status;
        out.objective = sol.objective;
        out.objective_trace.push_back(sol.objective);
        extract(ctx, grid, spec, sol.x, out);
        out.active_count_trace.push_back(static_cast<Index>(out.active.size()));
        if (sol.status != socp::SolveStatus::Optimal) {
            break;
        }

        std::vector<Index> current;
        for (const auto& a : out.active) {
            current.push_back(a.index);
        }
        if (iter > 0 && current == previous) {
            ++unchanged;
        } else {
            unchanged = 0;
        }
        previous = std::move(current);
        if (unchanged >= spec.stable_iterations) {
            break;
        }
        weights = reweight_factors(out.group_norms, spec.epsilon);
    }
    finalize_status(out, spec);
    return out;
}

socp::ConicProgram assemble_plain_l1(const SteeringMatrix& s, const ReferenceResponse& p_r, double alpha)
{
    if (s.augmented) {
        throw std::invalid_argument("plain l1 uses the non-augmented steering matrix");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive");
    }
    if (p_r.values.size() != s.entries.cols() ||
        !same_sampling(s.frequencies, s.angles, p_r.frequencies, p_r.angles)) {
        throw std::invalid_argument("steering matrix and reference response use different sampling grids");
    }
    // Variables [w+ ; w-], both non-negative; w = w+ - w-.
    const Index n_w = s.entries.rows();
    const Index cols = s.entries.cols();
    socp::ConicProgram prog;
    prog.n = 2 * n_w;
    prog.c = RealVector::Ones(2 * n_w);
    for (Index j = 0; j < 2 * n_w; ++j) {
        prog.nonneg.push_back(j);
    }
    RealMatrix a(2 * cols, n_w);
    a.topRows(cols) = -s.entries.real().transpose();
    a.bottomRows(cols) = -s.entries.imag().transpose();
    RealMatrix a_split(2 * cols, 2 * n_w);
    a_split << a, -a;
    RealVector b(2 * cols);
    b << p_r.values.real(), p_r.values.imag();
    prog.cones.push_back(socp::dense_cone(std::move(a_split), std::move(b), RealVector::Zero(2 * n_w), alpha));
    return prog;
}

PlainL1Result solve_plain_l1(const ArrayGrid& grid, const TdlConfig& tdl, const SamplingSpec& sampling, double alpha,
                             const socp::SolverSettings& settings)
{
    const auto s = build_steering_matrix(grid, tdl, sampling, false);
    const auto p_r = build_reference(sampling, tdl);
    const auto prog = assemble_plain_l1(s, p_r, alpha);
    const auto sol = socp::solve(prog, settings);
    const Index n_w = s.entries.rows();
    PlainL1Result out;
    out.status = sol.status;
    out.objective = sol.objective;
    out.weights = WeightVector(grid.size(), tdl.taps, sol.x.head(n_w) - sol.x.tail(n_w));
    return out;
}

}  // namespace sparsewb
