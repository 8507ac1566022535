// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/socp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sparsewb::socp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStepFraction = 0.99;
constexpr double kSigmaMin = 1e-4;
constexpr double kMinStep = 1e-10;
constexpr int kRefineSteps = 10;
constexpr double kStartMargin = 1e-8;

// Conic standard form used internally: s = h - G x lies in the product cone.
// A constraint ||A x + b|| <= f^T x + g becomes the block G = [-f^T; -A],
// h = [g; b]; a sign constraint x_j >= 0 becomes G = -e_j^T, h = 0.
struct Block {
    const SocConstraint* cone = nullptr;
    Index offset = 0;  // position of the block inside s and z
    Index dim = 0;     // 1 + rows
    RealMatrix gram;   // A^T A on the support
    bool has_f = false;
};

// Nesterov-Todd scaling of one second-order cone: W = eta * Wbar with
// Wbar = [[wb0, wb1^T], [wb1, I + wb1 wb1^T / (1 + wb0)]].
struct SocScaling {
    double eta = 1.0;
    RealVector wbar;
};

double soc_residual(double u0, const auto& u1)
{
    const double n1 = u1.norm();
    return (u0 - n1) * (u0 + n1);
}

class Workspace {
public:
    explicit Workspace(const ConicProgram& p) : prog_(p), n_(p.n)
    {
        Index offset = 0;
        blocks_.reserve(p.cones.size());
        touched_.assign(static_cast<size_t>(n_), false);
        for (const auto& cone : p.cones) {
            Block b;
            b.cone = &cone;
            b.offset = offset;
            b.dim = 1 + cone.rows();
            b.has_f = cone.f.size() > 0 && cone.f.cwiseAbs().maxCoeff() > 0.0;
            const Index k = static_cast<Index>(cone.support.size());
            b.gram = RealMatrix::Zero(k, k);
            b.gram.selfadjointView<Eigen::Lower>().rankUpdate(cone.A.transpose());
            b.gram.triangularView<Eigen::StrictlyUpper>() = b.gram.transpose();
            for (Index i = 0; i < k; ++i) {
                if (cone.A.col(i).cwiseAbs().maxCoeff() > 0.0 || (b.has_f && cone.f[i] != 0.0)) {
                    touched_[static_cast<size_t>(cone.support[static_cast<size_t>(i)])] = true;
                }
            }
            offset += b.dim;
            blocks_.push_back(std::move(b));
        }
        lp_offset_ = offset;
        lp_count_ = static_cast<Index>(p.nonneg.size());
        for (Index j : p.nonneg) {
            touched_[static_cast<size_t>(j)] = true;
        }
        m_ = offset + lp_count_;
        degree_ = static_cast<double>(blocks_.size()) + static_cast<double>(lp_count_);

        h_ = RealVector::Zero(m_);
        for (const auto& b : blocks_) {
            h_[b.offset] = b.cone->g;
            h_.segment(b.offset + 1, b.dim - 1) = b.cone->b;
        }
        scal_.resize(blocks_.size());
        for (auto& sc : scal_) {
            sc.eta = 1.0;
        }
        for (size_t k = 0; k < blocks_.size(); ++k) {
            scal_[k].wbar = RealVector::Zero(blocks_[k].dim);
            scal_[k].wbar[0] = 1.0;
        }
        lp_d_ = RealVector::Ones(lp_count_);
        H_.resize(n_, n_);
    }

    [[nodiscard]] Index n() const { return n_; }
    [[nodiscard]] Index m() const { return m_; }
    [[nodiscard]] double degree() const { return degree_; }
    [[nodiscard]] const RealVector& h() const { return h_; }
    [[nodiscard]] bool touched(Index j) const { return touched_[static_cast<size_t>(j)]; }

    // out = G x
    void g_mul(const RealVector& x, RealVector& out) const
    {
        out.resize(m_);
        RealVector xs;
        for (const auto& b : blocks_) {
            gather(x, b.cone->support, xs);
            out[b.offset] = b.has_f ? -b.cone->f.dot(xs) : 0.0;
            out.segment(b.offset + 1, b.dim - 1).noalias() = -(b.cone->A * xs);
        }
        for (Index i = 0; i < lp_count_; ++i) {
            out[lp_offset_ + i] = -x[prog_.nonneg[static_cast<size_t>(i)]];
        }
    }

    // out = G^T z
    void gt_mul(const RealVector& z, RealVector& out) const
    {
        out = RealVector::Zero(n_);
        RealVector tmp;
        for (const auto& b : blocks_) {
            tmp.noalias() = b.cone->A.transpose() * z.segment(b.offset + 1, b.dim - 1);
            if (b.has_f) {
                tmp += b.cone->f * z[b.offset];
            }
            const auto& supp = b.cone->support;
            for (size_t i = 0; i < supp.size(); ++i) {
                out[supp[i]] -= tmp[static_cast<Index>(i)];
            }
        }
        for (Index i = 0; i < lp_count_; ++i) {
            out[prog_.nonneg[static_cast<size_t>(i)]] -= z[lp_offset_ + i];
        }
    }

    // ---- cone algebra on the full product cone ------------------------------

    void set_unit_scaling()
    {
        for (auto& sc : scal_) {
            sc.eta = 1.0;
            sc.wbar.setZero();
            sc.wbar[0] = 1.0;
        }
        lp_d_.setOnes();
    }

    // Computes the NT scaling point for (s, z) and lambda = W z.
    bool update_scaling(const RealVector& s, const RealVector& z, RealVector& lambda)
    {
        lambda.resize(m_);
        for (size_t k = 0; k < blocks_.size(); ++k) {
            const auto& b = blocks_[k];
            const auto sb = s.segment(b.offset, b.dim);
            const auto zb = z.segment(b.offset, b.dim);
            const double ssq = soc_residual(sb[0], sb.tail(b.dim - 1));
            const double zsq = soc_residual(zb[0], zb.tail(b.dim - 1));
            if (!(ssq > 0.0) || !(zsq > 0.0)) {
                return false;
            }
            const double sn = std::sqrt(ssq);
            const double zn = std::sqrt(zsq);
            const RealVector sbar = sb / sn;
            const RealVector zbar = zb / zn;
            const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
            auto& sc = scal_[k];
            sc.eta = std::sqrt(sn / zn);
            sc.wbar.resize(b.dim);
            sc.wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
            sc.wbar.tail(b.dim - 1) = (sbar.tail(b.dim - 1) - zbar.tail(b.dim - 1)) / (2.0 * gamma);
        }
        for (Index i = 0; i < lp_count_; ++i) {
            const double sv = s[lp_offset_ + i];
            const double zv = z[lp_offset_ + i];
            if (!(sv > 0.0) || !(zv > 0.0)) {
                return false;
            }
            lp_d_[i] = std::sqrt(sv / zv);
        }
        apply_w(z, lambda);
        return true;
    }

    void apply_w(const RealVector& u, RealVector& out) const { apply_scaling(u, out, false); }
    void apply_winv(const RealVector& u, RealVector& out) const { apply_scaling(u, out, true); }

    void apply_w2(const RealVector& u, RealVector& out) const
    {
        RealVector tmp;
        apply_w(u, tmp);
        apply_w(tmp, out);
    }

    void apply_winv2(const RealVector& u, RealVector& out) const
    {
        RealVector tmp;
        apply_winv(u, tmp);
        apply_winv(tmp, out);
    }

    // out = u o v
    void jordan_product(const RealVector& u, const RealVector& v, RealVector& out) const
    {
        out.resize(m_);
        for (const auto& b : blocks_) {
            const auto ub = u.segment(b.offset, b.dim);
            const auto vb = v.segment(b.offset, b.dim);
            out[b.offset] = ub.dot(vb);
            out.segment(b.offset + 1, b.dim - 1) = ub[0] * vb.tail(b.dim - 1) + vb[0] * ub.tail(b.dim - 1);
        }
        out.tail(lp_count_) = u.tail(lp_count_).cwiseProduct(v.tail(lp_count_));
    }

    // out solves lambda o out = w
    void jordan_divide(const RealVector& lambda, const RealVector& w, RealVector& out) const
    {
        out.resize(m_);
        for (const auto& b : blocks_) {
            const auto lb = lambda.segment(b.offset, b.dim);
            const auto wb = w.segment(b.offset, b.dim);
            const auto l1 = lb.tail(b.dim - 1);
            const double det = soc_residual(lb[0], l1);
            const double x0 = (lb[0] * wb[0] - l1.dot(wb.tail(b.dim - 1))) / det;
            out[b.offset] = x0;
            out.segment(b.offset + 1, b.dim - 1) = (wb.tail(b.dim - 1) - x0 * l1) / lb[0];
        }
        out.tail(lp_count_) = w.tail(lp_count_).cwiseQuotient(lambda.tail(lp_count_));
    }

    void add_identity(RealVector& u, double scale) const
    {
        for (const auto& b : blocks_) {
            u[b.offset] += scale;
        }
        u.tail(lp_count_).array() += scale;
    }

    // Largest alpha with u + alpha du in the cone (inf if unbounded).
    [[nodiscard]] double max_step(const RealVector& u, const RealVector& du) const
    {
        double alpha = kInf;
        for (const auto& b : blocks_) {
            const double u0 = u[b.offset];
            const double d0 = du[b.offset];
            const auto u1 = u.segment(b.offset + 1, b.dim - 1);
            const auto d1 = du.segment(b.offset + 1, b.dim - 1);
            const double c = std::max(soc_residual(u0, u1), 0.0);
            const double bq = u0 * d0 - u1.dot(d1);
            const double a = d0 * d0 - d1.squaredNorm();
            const double disc = bq * bq - a * c;
            double step = kInf;
            if (a < 0.0) {
                const double sq = std::sqrt(std::max(disc, 0.0));
                step = bq > 0.0 ? (-bq - sq) / a : c / (-bq + sq);
            } else if (bq < 0.0 && disc >= 0.0) {
                step = c / (-bq + std::sqrt(disc));
            }
            if (d0 < 0.0) {
                step = std::min(step, -u0 / d0);
            }
            alpha = std::min(alpha, step);
        }
        for (Index i = 0; i < lp_count_; ++i) {
            const double d = du[lp_offset_ + i];
            if (d < 0.0) {
                alpha = std::min(alpha, -u[lp_offset_ + i] / d);
            }
        }
        return alpha;
    }

    // -max over blocks of the smallest "eigenvalue" u0 - ||u1|| (or u_j).
    [[nodiscard]] double infeasibility_shift(const RealVector& u) const
    {
        double worst = -kInf;
        for (const auto& b : blocks_) {
            const double e = u[b.offset] - u.segment(b.offset + 1, b.dim - 1).norm();
            worst = std::max(worst, -e);
        }
        for (Index i = 0; i < lp_count_; ++i) {
            worst = std::max(worst, -u[lp_offset_ + i]);
        }
        return worst;
    }

    // ---- reduced KKT system --------------------------------------------------

    // Forms H = G^T W^{-2} G and factors it.
    bool factor()
    {
        H_.setZero();
        RealVector xs;
        for (size_t k = 0; k < blocks_.size(); ++k) {
            const auto& b = blocks_[k];
            const auto& sc = scal_[k];
            const auto& cone = *b.cone;
            // W^{-2} = eta^{-2} (2 what what^T - J), what = (wb0, -wb1), so the
            // block contributes eta^{-2} (2 p p^T - f f^T + A^T A) with p = G^T what.
            RealVector p = cone.A.transpose() * sc.wbar.tail(b.dim - 1);
            if (b.has_f) {
                p -= cone.f * sc.wbar[0];
            }
            const double scale = 1.0 / (sc.eta * sc.eta);
            const auto& supp = cone.support;
            const auto k_supp = static_cast<Index>(supp.size());
            for (Index j = 0; j < k_supp; ++j) {
                const Index gj = supp[static_cast<size_t>(j)];
                const double pj = 2.0 * p[j];
                const double fj = b.has_f ? cone.f[j] : 0.0;
                for (Index i = 0; i < k_supp; ++i) {
                    double v = b.gram(i, j) + pj * p[i];
                    if (b.has_f) {
                        v -= fj * cone.f[i];
                    }
                    H_(supp[static_cast<size_t>(i)], gj) += scale * v;
                }
            }
        }
        for (Index i = 0; i < lp_count_; ++i) {
            const Index j = prog_.nonneg[static_cast<size_t>(i)];
            H_(j, j) += 1.0 / (lp_d_[i] * lp_d_[i]);
        }
        double max_diag = 0.0;
        for (Index j = 0; j < n_; ++j) {
            if (!touched(j)) {
                H_(j, j) = 1.0;
            }
            max_diag = std::max(max_diag, H_(j, j));
        }
        double reg = 1e-14 * std::max(1.0, max_diag);
        H_.diagonal().array() += reg;
        for (int attempt = 0; attempt < 4; ++attempt) {
            llt_.compute(H_);
            if (llt_.info() == Eigen::Success) {
                return true;
            }
            H_.diagonal().array() += reg * 99.0;
            reg *= 100.0;
        }
        return false;
    }

    // Solves [0 G^T; G -W^2] [x; z] = [bx; bz] with iterative refinement.
    void solve_kkt(const RealVector& bx, const RealVector& bz, RealVector& x, RealVector& z) const
    {
        reduced_solve(bx, bz, x, z);
        RealVector ex, ez, gz, gx, w2z, cx, cz;
        double last = kInf;
        for (int it = 0; it < kRefineSteps; ++it) {
            gt_mul(z, gz);
            g_mul(x, gx);
            apply_w2(z, w2z);
            ex = bx - gz;
            ez = bz - (gx - w2z);
            const double err = std::max(ex.lpNorm<Eigen::Infinity>(), ez.lpNorm<Eigen::Infinity>());
            const double scale = 1.0 + std::max(bx.lpNorm<Eigen::Infinity>(), bz.lpNorm<Eigen::Infinity>());
            if (err <= 1e-14 * scale || err >= last) {
                break;
            }
            last = err;
            reduced_solve(ex, ez, cx, cz);
            x += cx;
            z += cz;
        }
    }

private:
    static void gather(const RealVector& x, const std::vector<Index>& supp, RealVector& out)
    {
        out.resize(static_cast<Index>(supp.size()));
        for (size_t i = 0; i < supp.size(); ++i) {
            out[static_cast<Index>(i)] = x[supp[i]];
        }
    }

    void apply_scaling(const RealVector& u, RealVector& out, bool inverse) const
    {
        out.resize(m_);
        for (size_t k = 0; k < blocks_.size(); ++k) {
            const auto& b = blocks_[k];
            const auto& sc = scal_[k];
            const double w0 = sc.wbar[0];
            const auto w1 = sc.wbar.tail(b.dim - 1);
            const auto ub = u.segment(b.offset, b.dim);
            const double u0 = ub[0];
            const auto u1 = ub.tail(b.dim - 1);
            const double w1u1 = w1.dot(u1);
            // Wbar^{-1} = J Wbar J flips the sign of the off-diagonal blocks.
            const double sgn = inverse ? -1.0 : 1.0;
            const double scale = inverse ? 1.0 / sc.eta : sc.eta;
            out[b.offset] = scale * (w0 * u0 + sgn * w1u1);
            out.segment(b.offset + 1, b.dim - 1) = scale * (u1 + (sgn * u0 + w1u1 / (1.0 + w0)) * w1);
        }
        if (inverse) {
            out.tail(lp_count_) = u.tail(lp_count_).cwiseQuotient(lp_d_);
        } else {
            out.tail(lp_count_) = u.tail(lp_count_).cwiseProduct(lp_d_);
        }
    }

    // x = H^{-1} (bx + G^T W^{-2} bz), z = W^{-2} (G x - bz)
    void reduced_solve(const RealVector& bx, const RealVector& bz, RealVector& x, RealVector& z) const
    {
        RealVector t, gt, gx;
        apply_winv2(bz, t);
        gt_mul(t, gt);
        x = llt_.solve(bx + gt);
        g_mul(x, gx);
        apply_winv2(gx - bz, z);
    }

    const ConicProgram& prog_;
    Index n_;
    Index m_ = 0;
    Index lp_offset_ = 0;
    Index lp_count_ = 0;
    double degree_ = 0.0;
    std::vector<Block> blocks_;
    std::vector<bool> touched_;
    RealVector h_;
    std::vector<SocScaling> scal_;
    RealVector lp_d_;
    RealMatrix H_;
    Eigen::LLT<RealMatrix> llt_;
};

ConicSolution finish(const ConicProgram& p, SolveStatus status, RealVector x, double dual_obj, double gap,
                     int iters)
{
    ConicSolution sol;
    sol.status = status;
    sol.x = std::move(x);
    sol.objective = p.c.dot(sol.x);
    sol.dual_objective = dual_obj;
    sol.primal_infeas = check_feasibility(p, sol.x).worst_violation;
    sol.gap_estimate = gap;
    sol.iterations = iters;
    return sol;
}

}  // namespace

std::string_view to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::Unbounded:
        return "unbounded";
    case SolveStatus::MaxIters:
        return "max_iters";
    case SolveStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

SocConstraint dense_cone(RealMatrix A, RealVector b, RealVector f, double g)
{
    SocConstraint cone;
    cone.support.resize(static_cast<size_t>(A.cols()));
    for (Index j = 0; j < A.cols(); ++j) {
        cone.support[static_cast<size_t>(j)] = j;
    }
    cone.A = std::move(A);
    cone.b = std::move(b);
    cone.f = std::move(f);
    cone.g = g;
    return cone;
}

void ConicProgram::validate() const
{
    if (n < 0 || c.size() != n) {
        throw std::invalid_argument("objective length must equal the variable count");
    }
    for (size_t i = 0; i < cones.size(); ++i) {
        const auto& cone = cones[i];
        const auto k = static_cast<Index>(cone.support.size());
        const std::string where = "cone " + std::to_string(i) + ": ";
        if (cone.A.rows() < 1) {
            throw std::invalid_argument(where + "needs at least one row");
        }
        if (cone.A.cols() != k || cone.f.size() != k || cone.b.size() != cone.A.rows()) {
            throw std::invalid_argument(where + "dimension mismatch");
        }
        std::vector<Index> sorted = cone.support;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument(where + "repeated support index");
        }
        for (Index j : cone.support) {
            if (j < 0 || j >= n) {
                throw std::invalid_argument(where + "support index out of range");
            }
        }
    }
    for (Index j : nonneg) {
        if (j < 0 || j >= n) {
            throw std::invalid_argument("sign constraint index out of range");
        }
    }
}

FeasibilityReport check_feasibility(const ConicProgram& program, const RealVector& x)
{
    if (x.size() != program.n) {
        throw std::invalid_argument("point length must equal the variable count");
    }
    FeasibilityReport report;
    report.per_cone = RealVector::Zero(static_cast<Index>(program.cones.size()));
    RealVector xs;
    for (size_t i = 0; i < program.cones.size(); ++i) {
        const auto& cone = program.cones[i];
        xs.resize(static_cast<Index>(cone.support.size()));
        for (size_t j = 0; j < cone.support.size(); ++j) {
            xs[static_cast<Index>(j)] = x[cone.support[j]];
        }
        const double lhs = (cone.A * xs + cone.b).norm();
        const double rhs = cone.f.dot(xs) + cone.g;
        report.per_cone[static_cast<Index>(i)] = std::max(0.0, lhs - rhs);
    }
    for (Index j : program.nonneg) {
        report.nonneg_violation = std::max(report.nonneg_violation, -x[j]);
    }
    report.worst_violation = report.nonneg_violation;
    if (report.per_cone.size() > 0) {
        report.worst_violation = std::max(report.worst_violation, report.per_cone.maxCoeff());
    }
    return report;
}

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings)
{
    program.validate();
    if (!(settings.tol_feas > 0.0) || !(settings.tol_gap > 0.0) || !(settings.tol_infeas > 0.0) ||
        !(settings.reduced_dual_factor >= 1.0) || settings.max_iters < 0) {
        throw std::invalid_argument("solver tolerances must be positive");
    }
    const ConicProgram& p = program;
    Workspace ws(p);
    const Index n = ws.n();
    const Index m = ws.m();

    for (Index j = 0; j < n; ++j) {
        if (!ws.touched(j) && p.c[j] != 0.0) {
            return finish(p, SolveStatus::Unbounded, RealVector::Zero(n), -kInf, kInf, 0);
        }
    }
    if (m == 0) {
        return finish(p, SolveStatus::Optimal, RealVector::Zero(n), 0.0, 0.0, 0);
    }

    const RealVector& h = ws.h();
    const RealVector& c = p.c;
    const double h_scale = std::max(1.0, h.norm());
    const double c_scale = std::max(1.0, c.norm());

    // Starting point from two least-squares solves with W = I.
    ws.set_unit_scaling();
    if (!ws.factor()) {
        return finish(p, SolveStatus::NumericalFailure, RealVector::Zero(n), -kInf, kInf, 0);
    }
    RealVector x, z, s, tmp;
    ws.solve_kkt(RealVector::Zero(n), h, x, tmp);
    s = -tmp;
    if (const double shift = ws.infeasibility_shift(s); shift >= -kStartMargin * std::max(1.0, s.norm())) {
        ws.add_identity(s, 1.0 + shift);
    }
    RealVector x_dual;
    ws.solve_kkt(-c, RealVector::Zero(m), x_dual, z);
    if (const double shift = ws.infeasibility_shift(z); shift >= -kStartMargin * std::max(1.0, z.norm())) {
        ws.add_identity(z, 1.0 + shift);
    }
    double tau = 1.0;
    double kappa = 1.0;

    RealVector rx, rz, gx, gz, lambda, x1, z1, x2, z2, dx, dz, ds, q, wq, w2dz, wdz, wids, corr, target;
    RealVector dz_scaled, ds_scaled;
    double gap_est = kInf;
    double dual_obj = -kInf;

    if (settings.verbose) {
        std::fprintf(stderr, "%4s %13s %13s %9s %9s %9s %9s %9s\n", "it", "pcost", "dcost", "gap", "pres", "dres",
                     "k/t", "step");
    }

    struct Candidate {
        bool valid = false;
        RealVector x;
        double dual_obj = 0.0;
        double gap_est = 0.0;
        double dres = kInf;
    } best;
    auto fallback = [&](SolveStatus status, int at) {
        if (best.valid) {
            return finish(p, SolveStatus::Optimal, best.x, best.dual_obj, best.gap_est, at);
        }
        return finish(p, status, x / tau, dual_obj, gap_est, at);
    };

    int iter = 0;
    double last_step = 0.0;
    for (;; ++iter) {
        ws.g_mul(x, gx);
        ws.gt_mul(z, gz);
        rx = gz + c * tau;
        rz = gx + s - h * tau;
        const double rtau = kappa + c.dot(x) + h.dot(z);
        const double sz = s.dot(z);
        const double mu = (sz + tau * kappa) / (ws.degree() + 1.0);

        const double pcost = c.dot(x) / tau;
        const double dcost = -h.dot(z) / tau;
        const double pres = rz.norm() / tau / std::max(h_scale, s.norm() / tau);
        const double dres = rx.norm() / tau / c_scale;
        const double gap = std::max(sz / (tau * tau), std::abs(pcost - dcost));
        gap_est = gap / std::max(1.0, std::abs(pcost));
        dual_obj = dcost;

        if (settings.verbose) {
            std::fprintf(stderr, "%4d %+13.6e %+13.6e %9.2e %9.2e %9.2e %9.2e %9.2e\n", iter, pcost, dcost, gap, pres,
                         dres, kappa / tau, last_step);
        }

        if (pres <= settings.tol_feas && gap_est <= settings.tol_gap &&
            dres <= settings.reduced_dual_factor * settings.tol_feas && dres < best.dres) {
            const RealVector xhat = x / tau;
            if (check_feasibility(p, xhat).worst_violation <= settings.tol_feas) {
                if (dres <= settings.tol_feas) {
                    return finish(p, SolveStatus::Optimal, xhat, dual_obj, gap_est, iter);
                }
                best = {true, xhat, dual_obj, gap_est, dres};
            }
        }
        // Farkas certificates; they only become meaningful once tau has collapsed relative to kappa.
        if (kappa > tau) {
            const double hz = h.dot(z);
            if (hz < 0.0 && gz.norm() <= settings.tol_infeas * -hz) {
                return finish(p, SolveStatus::Infeasible, x / tau, dual_obj, kInf, iter);
            }
            const double cx = c.dot(x);
            if (cx < 0.0 && (gx + s).norm() <= settings.tol_infeas * -cx) {
                return finish(p, SolveStatus::Unbounded, x / tau, -kInf, kInf, iter);
            }
        }
        if (iter >= settings.max_iters) {
            return fallback(SolveStatus::MaxIters, iter);
        }

        if (!ws.update_scaling(s, z, lambda) || !ws.factor()) {
            return fallback(SolveStatus::NumericalFailure, iter);
        }

        // Direction of the homogenizing variable tau.
        ws.solve_kkt(-c, h, x1, z1);
        const double denom = c.dot(x1) + h.dot(z1) - kappa / tau;

        auto direction = [&](double keep, const RealVector& wq_term, double tau_target) {
            // keep = 1 - sigma scales the residuals; tau_target = sigma*mu - tau*kappa - corr_tau.
            ws.solve_kkt(-keep * rx, -keep * rz - wq_term, x2, z2);
            const double dtau = (-keep * rtau - c.dot(x2) - h.dot(z2) - tau_target / tau) / denom;
            dx = x2 + dtau * x1;
            dz = z2 + dtau * z1;
            return dtau;
        };

        // Affine (predictor) step: target lambda o lambda -> 0.
        wq = -s;
        const double dtau_aff = direction(1.0, wq, -tau * kappa);
        ws.apply_w2(dz, w2dz);
        ds = -s - w2dz;
        const double dkappa_aff = -kappa - kappa * dtau_aff / tau;

        ws.apply_winv(ds, ds_scaled);
        ws.apply_w(dz, dz_scaled);
        double alpha_aff = std::min({1.0, ws.max_step(lambda, ds_scaled), ws.max_step(lambda, dz_scaled)});
        if (dtau_aff < 0.0) {
            alpha_aff = std::min(alpha_aff, -tau / dtau_aff);
        }
        if (dkappa_aff < 0.0) {
            alpha_aff = std::min(alpha_aff, -kappa / dkappa_aff);
        }
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), kSigmaMin, 1.0);

        // Combined (corrector) step.
        ws.jordan_product(ds_scaled, dz_scaled, corr);
        target = -corr;
        ws.add_identity(target, sigma * mu);
        ws.jordan_divide(lambda, target, q);
        ws.apply_w(q, wq);
        wq -= s;  // W (lambda \ (sigma mu e - corr) - lambda)
        const double corr_tau = dtau_aff * dkappa_aff;
        const double tau_target = sigma * mu - tau * kappa - corr_tau;
        const double dtau = direction(1.0 - sigma, wq, tau_target);
        ws.apply_w2(dz, w2dz);
        ds = wq - w2dz;
        const double dkappa = (tau_target - kappa * dtau) / tau;

        ws.apply_winv(ds, ds_scaled);
        ws.apply_w(dz, dz_scaled);
        double alpha = std::min(ws.max_step(lambda, ds_scaled), ws.max_step(lambda, dz_scaled));
        if (dtau < 0.0) {
            alpha = std::min(alpha, -tau / dtau);
        }
        if (dkappa < 0.0) {
            alpha = std::min(alpha, -kappa / dkappa);
        }
        alpha = std::min(1.0, kStepFraction * alpha);
        if (!(alpha > kMinStep)) {
            return fallback(SolveStatus::NumericalFailure, iter);
        }
        last_step = alpha;

        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }
}

void write_program(std::ostream& out, const ConicProgram& program)
{
    out.precision(17);
    out << "n " << program.n << "\nc";
    for (Index j = 0; j < program.n; ++j) {
        out << ' ' << program.c[j];
    }
    out << "\nnonneg";
    for (Index j : program.nonneg) {
        out << ' ' << j;
    }
    out << "\ncones " << program.cones.size() << '\n';
    for (const auto& cone : program.cones) {
        out << "cone " << cone.A.rows() << ' ' << cone.support.size() << " g " << cone.g << "\nsupport";
        for (Index j : cone.support) {
            out << ' ' << j;
        }
        out << "\nf";
        for (Index j = 0; j < cone.f.size(); ++j) {
            out << ' ' << cone.f[j];
        }
        out << '\n';
        for (Index i = 0; i < cone.A.rows(); ++i) {
            out << "row " << cone.b[i];
            for (Index j = 0; j < cone.A.cols(); ++j) {
                out << ' ' << cone.A(i, j);
            }
            out << '\n';
        }
    }
}

}  // namespace sparsewb::socp
