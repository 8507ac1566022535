// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/ga_baseline.hpp"

#include "sparsewb/reference_response.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace sparsewb {

namespace {

// Rows of the QR factor R of M, plus the part of b outside the range of M, so
// that ||M x - b|| = ||R x - c||.
struct Compressed {
    RealMatrix r;
    RealVector c;
};

Compressed compress(const RealMatrix& m, const RealVector& b)
{
    const Index rows = m.rows();
    const Index cols = m.cols();
    const Eigen::HouseholderQR<RealMatrix> qr(m);
    const Index k = std::min(rows, cols);
    RealVector qtb = qr.householderQ().adjoint() * b;
    Compressed out;
    const Index extra = rows > cols ? 1 : 0;
    out.r = RealMatrix::Zero(k + extra, cols);
    out.r.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    out.c.resize(k + extra);
    out.c.head(k) = qtb.head(k);
    if (extra != 0) {
        out.c[k] = qtb.tail(rows - k).norm();
    }
    return out;
}

double fitness_of(double jcls)
{
    return jcls > 0.0 ? 1.0 / jcls : std::numeric_limits<double>::max();
}

}  // namespace

JclsResult j_cls_solve(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
                       const JclsSpec& spec)
{
    tdl.validate();
    sampling.validate();
    if (positions.empty()) {
        throw std::invalid_argument("J_CLS needs at least one sensor");
    }
    if (spec.sigma && !(*spec.sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    // Coincident sensors see identical steering entries; keep one of each.
    std::vector<double> unique;
    std::vector<Index> owner(positions.size());
    for (size_t i = 0; i < positions.size(); ++i) {
        const auto it = std::find(unique.begin(), unique.end(), positions[i]);
        owner[i] = static_cast<Index>(it - unique.begin());
        if (it == unique.end()) {
            unique.push_back(positions[i]);
        }
    }

    const Index taps = tdl.taps;
    const auto s = build_steering_matrix(unique, tdl, sampling, false);
    const auto p_r = build_reference(sampling, tdl);
    const Index n_w = s.entries.rows();
    const Index cols = s.entries.cols();
    RealMatrix a(2 * cols, n_w);
    a.topRows(cols) = s.entries.real().transpose();
    a.bottomRows(cols) = s.entries.imag().transpose();
    RealVector b(2 * cols);
    b << p_r.values.real(), p_r.values.imag();
    const auto fit = compress(a, b);

    // Variables [u, w]; minimize u subject to ||a w - b|| <= u and ||L^T w|| <= sigma.
    socp::ConicProgram prog;
    prog.n = n_w + 1;
    prog.c = RealVector::Zero(prog.n);
    prog.c[0] = 1.0;
    socp::SocConstraint residual;
    residual.A = RealMatrix::Zero(fit.r.rows(), prog.n);
    residual.A.rightCols(n_w) = fit.r;
    residual.b = -fit.c;
    residual.f = RealVector::Zero(prog.n);
    residual.f[0] = 1.0;
    for (Index j = 0; j < prog.n; ++j) {
        residual.support.push_back(j);
    }
    prog.cones.push_back(std::move(residual));

    if (spec.sigma && sampling.frequencies().size() >= 2) {
        const auto rv = build_rv_matrix(unique, tdl, sampling, spec.rv_angles, spec.rv_normalization);
        RealMatrix lt(rv.columns.cols(), n_w);
        const auto m_count = static_cast<Index>(unique.size());
        for (Index m = 0; m < m_count; ++m) {
            for (Index j = 0; j < taps; ++j) {
                lt.col(m * taps + j) = rv.columns.row(AugmentedWeight::w_slot(m, j, taps)).transpose();
            }
        }
        const auto rv_fit = compress(lt, RealVector::Zero(lt.rows()));
        socp::SocConstraint variation;
        variation.A = RealMatrix::Zero(rv_fit.r.rows(), prog.n);
        variation.A.rightCols(n_w) = rv_fit.r;
        variation.b = RealVector::Zero(rv_fit.r.rows());
        variation.f = RealVector::Zero(prog.n);
        variation.g = *spec.sigma;
        for (Index j = 0; j < prog.n; ++j) {
            variation.support.push_back(j);
        }
        prog.cones.push_back(std::move(variation));
    }

    const auto sol = socp::solve(prog, spec.solver);
    if (!sol.optimal()) {
        throw std::runtime_error("J_CLS subproblem did not converge: " + std::string(socp::to_string(sol.status)));
    }
    const RealVector w = sol.x.tail(n_w);
    JclsResult out;
    out.status = sol.status;
    out.value = (a * w - b).squaredNorm();
    out.weights = WeightVector(static_cast<Index>(positions.size()), taps);
    std::vector<bool> used(unique.size(), false);
    for (size_t i = 0; i < positions.size(); ++i) {
        const Index u = owner[i];
        if (!used[static_cast<size_t>(u)]) {
            out.weights.group(static_cast<Index>(i)) = w.segment(u * taps, taps);
            used[static_cast<size_t>(u)] = true;
        }
    }
    return out;
}

double j_cls(std::span<const double> positions, const TdlConfig& tdl, const SamplingSpec& sampling,
             const JclsSpec& spec)
{
    return j_cls_solve(positions, tdl, sampling, spec).value;
}

void GaConfig::validate() const
{
    if (population < 4) {
        throw std::invalid_argument("GA population must be at least 4");
    }
    if (generations < 0) {
        throw std::invalid_argument("GA generations must be non-negative");
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0) || !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw std::invalid_argument("GA rates must lie in [0, 1]");
    }
    if (mutation_sigma && !(*mutation_sigma > 0.0)) {
        throw std::invalid_argument("GA mutation sigma must be positive");
    }
    if (tournament_size < 1 || tournament_size > population) {
        throw std::invalid_argument("GA tournament size must lie in [1, population]");
    }
    if (!(blend_alpha >= 0.0)) {
        throw std::invalid_argument("GA blend alpha must be non-negative");
    }
    if (!(min_spacing >= 0.0)) {
        throw std::invalid_argument("GA minimum spacing must be non-negative");
    }
    if (threads < 0) {
        throw std::invalid_argument("GA thread count must be non-negative");
    }
}

void repair(Chromosome& c, double aperture, double min_spacing, bool pin_first)
{
    auto& p = c.positions;
    if (p.empty()) {
        return;
    }
    for (double& x : p) {
        x = std::clamp(x, 0.0, aperture);
    }
    std::sort(p.begin(), p.end());
    if (pin_first) {
        p.front() = 0.0;
    }
    for (size_t i = 1; i < p.size(); ++i) {
        p[i] = std::max(p[i], p[i - 1] + min_spacing);
    }
    if (p.back() > aperture) {
        p.back() = aperture;
        for (size_t i = p.size() - 1; i-- > 0;) {
            p[i] = std::min(p[i], p[i + 1] - min_spacing);
        }
    }
    if (p.front() < 0.0) {
        p.front() = 0.0;
    }
}

bool is_valid(const Chromosome& c, double aperture, double min_spacing)
{
    const auto& p = c.positions;
    const double slack = 1e-12 * std::max(1.0, aperture);
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -slack || p[i] > aperture + slack) {
            return false;
        }
        if (i > 0 && p[i] - p[i - 1] < min_spacing - slack) {
            return false;
        }
    }
    return true;
}

GaResult run_ga(const GaConfig& config, int n_sensors, double aperture, const TdlConfig& tdl,
                const SamplingSpec& sampling, const JclsSpec& jcls, const GaAudit& audit)
{
    config.validate();
    tdl.validate();
    sampling.validate();
    if (n_sensors < 1) {
        throw std::invalid_argument("GA needs at least one sensor");
    }
    if (!(aperture > 0.0)) {
        throw std::invalid_argument("GA aperture must be positive");
    }
    if (static_cast<double>(n_sensors) * config.min_spacing > aperture) {
        throw std::invalid_argument("minimum spacing does not fit the aperture");
    }

    const auto start = std::chrono::steady_clock::now();
    const double mut_sigma = config.mutation_sigma.value_or(0.05 * aperture);
    const auto pop_size = static_cast<size_t>(config.population);
    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    workers = std::clamp(workers, 1U, static_cast<unsigned>(pop_size));

    GaResult result;
    std::vector<Chromosome> pop(pop_size);
    std::vector<double> cost(pop_size, 0.0);
    std::vector<WeightVector> weights(pop_size);

    auto evaluate = [&](size_t first) {
        std::atomic<size_t> next{first};
        std::vector<std::exception_ptr> errors(pop_size);
        auto work = [&]() {
            for (size_t i = next++; i < pop_size; i = next++) {
                try {
                    auto r = j_cls_solve(pop[i].positions, tdl, sampling, jcls);
                    cost[i] = r.value;
                    weights[i] = std::move(r.weights);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (unsigned t = 0; t < workers; ++t) {
                pool.emplace_back(work);
            }
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
        result.evaluations += static_cast<long>(pop_size - first);
    };
    auto best_index = [&]() {
        size_t best = 0;
        for (size_t i = 1; i < pop_size; ++i) {
            if (cost[i] < cost[best]) {
                best = i;
            }
        }
        return best;
    };

    std::mt19937_64 master(config.seed);
    for (auto& c : pop) {
        std::mt19937_64 rng(master());
        std::uniform_real_distribution<double> u(0.0, aperture);
        c.positions.resize(static_cast<size_t>(n_sensors));
        for (double& x : c.positions) {
            x = u(rng);
        }
        repair(c, aperture, config.min_spacing, config.pin_first);
    }
    evaluate(0);
    if (audit) {
        audit(0, pop);
    }
    result.fitness_history.push_back(fitness_of(cost[best_index()]));

    for (int gen = 1; gen <= config.generations; ++gen) {
        const size_t elite = best_index();
        std::vector<Chromosome> next(pop_size);
        next[0] = pop[elite];
        std::vector<std::uint64_t> seeds(pop_size);
        for (size_t i = 1; i < pop_size; ++i) {
            seeds[i] = master();
        }
        for (size_t i = 1; i < pop_size; ++i) {
            std::mt19937_64 rng(seeds[i]);
            std::uniform_int_distribution<size_t> pick(0, pop_size - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            std::normal_distribution<double> gauss(0.0, mut_sigma);
            auto tournament = [&]() {
                size_t winner = pick(rng);
                for (int k = 1; k < config.tournament_size; ++k) {
                    const size_t challenger = pick(rng);
                    if (cost[challenger] < cost[winner] || (cost[challenger] == cost[winner] && challenger < winner)) {
                        winner = challenger;
                    }
                }
                return winner;
            };
            const auto& a = pop[tournament()].positions;
            const auto& b = pop[tournament()].positions;
            Chromosome child{a};
            if (unit(rng) < config.crossover_rate) {
                for (size_t g = 0; g < child.positions.size(); ++g) {
                    const double lo = std::min(a[g], b[g]);
                    const double hi = std::max(a[g], b[g]);
                    const double span = config.blend_alpha * (hi - lo);
                    child.positions[g] = lo - span + unit(rng) * (hi - lo + 2.0 * span);
                }
            }
            for (double& x : child.positions) {
                if (unit(rng) < config.mutation_rate) {
                    x += gauss(rng);
                }
            }
            repair(child, aperture, config.min_spacing, config.pin_first);
            next[i] = std::move(child);
        }
        const double elite_cost = cost[elite];
        WeightVector elite_weights = std::move(weights[elite]);
        pop = std::move(next);
        cost[0] = elite_cost;
        weights[0] = std::move(elite_weights);
        evaluate(1);
        if (audit) {
            audit(gen, pop);
        }
        result.fitness_history.push_back(fitness_of(cost[best_index()]));
    }

    const size_t best = best_index();
    result.best = pop[best];
    result.best_jcls = cost[best];
    result.best_weights = weights[best];
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace sparsewb
