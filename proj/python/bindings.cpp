// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/array_model.hpp"
#include "sparsewb/design_cs.hpp"
#include "sparsewb/evaluation.hpp"
#include "sparsewb/ga_baseline.hpp"
#include "sparsewb/reference_response.hpp"
#include "sparsewb/socp.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sparsewb;

namespace {

RealMatrix as_matrix(const WeightVector& w)
{
    RealMatrix out(w.sensors(), w.taps());
    for (Index m = 0; m < w.sensors(); ++m) {
        out.row(m) = w.group(m).transpose();
    }
    return out;
}

WeightVector from_matrix(const RealMatrix& m)
{
    WeightVector w(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i) {
        w.group(i) = m.row(i).transpose();
    }
    return w;
}

std::vector<double> to_vector(const ArrayGrid& g)
{
    return {g.positions().begin(), g.positions().end()};
}

}  // namespace

PYBIND11_MODULE(_sparsewb, m)
{
    m.doc() = "Sparse wideband TDL array design";

    py::enum_<MainlobePhase>(m, "MainlobePhase")
        .value("UNIT", MainlobePhase::Unit)
        .value("GROUP_DELAY", MainlobePhase::GroupDelay);
    py::enum_<RvAngles>(m, "RvAngles").value("ALL", RvAngles::All).value("MAINLOBE", RvAngles::Mainlobe);
    py::enum_<RvNormalization>(m, "RvNormalization")
        .value("MEAN", RvNormalization::Mean)
        .value("SUM", RvNormalization::Sum);
    py::enum_<socp::SolveStatus>(m, "SolveStatus")
        .value("OPTIMAL", socp::SolveStatus::Optimal)
        .value("INFEASIBLE", socp::SolveStatus::Infeasible)
        .value("UNBOUNDED", socp::SolveStatus::Unbounded)
        .value("MAX_ITERS", socp::SolveStatus::MaxIters)
        .value("NUMERICAL_FAILURE", socp::SolveStatus::NumericalFailure);

    py::class_<ArrayGrid>(m, "ArrayGrid")
        .def(py::init<double, Index>(), py::arg("aperture"), py::arg("count"))
        .def_property_readonly("positions", &to_vector)
        .def_property_readonly("aperture", &ArrayGrid::aperture)
        .def_property_readonly("spacing", &ArrayGrid::spacing)
        .def("__len__", &ArrayGrid::size);
    m.def("build_grid", &build_grid, py::arg("aperture"), py::arg("count"));

    py::class_<TdlConfig>(m, "TdlConfig")
        .def(py::init([](Index taps) { return TdlConfig{taps}; }), py::arg("taps") = 1)
        .def_readwrite("taps", &TdlConfig::taps);

    py::class_<AngleInterval>(m, "AngleInterval")
        .def(py::init([](double lo, double hi) { return AngleInterval{lo, hi}; }), py::arg("lo_deg"),
             py::arg("hi_deg"))
        .def_readwrite("lo_deg", &AngleInterval::lo_deg)
        .def_readwrite("hi_deg", &AngleInterval::hi_deg);

    py::class_<SamplingSpec>(m, "SamplingSpec")
        .def(py::init<>())
        .def_readwrite("omega_lo", &SamplingSpec::omega_lo)
        .def_readwrite("omega_hi", &SamplingSpec::omega_hi)
        .def_readwrite("omega_step", &SamplingSpec::omega_step)
        .def_readwrite("omega_ref", &SamplingSpec::omega_ref)
        .def_readwrite("mainlobe_deg", &SamplingSpec::mainlobe_deg)
        .def_readwrite("mainlobe_halfwidth_deg", &SamplingSpec::mainlobe_halfwidth_deg)
        .def_readwrite("sidelobe_regions", &SamplingSpec::sidelobe_regions)
        .def_readwrite("angle_step_deg", &SamplingSpec::angle_step_deg)
        .def_readwrite("mainlobe_phase", &SamplingSpec::mainlobe_phase)
        .def("validate", &SamplingSpec::validate)
        .def("frequencies", &SamplingSpec::frequencies)
        .def("angles", [](const SamplingSpec& s) {
            std::vector<double> out;
            for (const auto& a : s.angles()) {
                out.push_back(a.deg);
            }
            return out;
        });
    m.def("broadside_sampling", &broadside_sampling, py::arg("phase") = MainlobePhase::GroupDelay);

    m.def("mu", &mu, py::arg("position"));
    m.def(
        "steering_vector",
        [](const std::vector<double>& positions, Index taps, double omega, double theta) {
            return steering_vector(positions, TdlConfig{taps}, omega, theta);
        },
        py::arg("positions"), py::arg("taps"), py::arg("omega"), py::arg("theta_deg"));
    m.def(
        "augmented_steering_vector",
        [](const std::vector<double>& positions, Index taps, double omega, double theta) {
            return augmented_steering_vector(positions, TdlConfig{taps}, omega, theta);
        },
        py::arg("positions"), py::arg("taps"), py::arg("omega"), py::arg("theta_deg"));
    m.def(
        "steering_matrix",
        [](const std::vector<double>& positions, Index taps, const SamplingSpec& spec, bool augmented) {
            return build_steering_matrix(positions, TdlConfig{taps}, spec, augmented).entries;
        },
        py::arg("positions"), py::arg("taps"), py::arg("sampling"), py::arg("augmented") = false);
    m.def(
        "reference_response",
        [](const SamplingSpec& spec, Index taps) { return build_reference(spec, TdlConfig{taps}).values; },
        py::arg("sampling"), py::arg("taps"));

    py::class_<socp::SolverSettings>(m, "SolverSettings")
        .def(py::init<>())
        .def_readwrite("max_iters", &socp::SolverSettings::max_iters)
        .def_readwrite("tol_feas", &socp::SolverSettings::tol_feas)
        .def_readwrite("tol_gap", &socp::SolverSettings::tol_gap)
        .def_readwrite("tol_infeas", &socp::SolverSettings::tol_infeas)
        .def_readwrite("reduced_dual_factor", &socp::SolverSettings::reduced_dual_factor)
        .def_readwrite("verbose", &socp::SolverSettings::verbose);

    py::class_<socp::SocConstraint>(m, "SocConstraint")
        .def(py::init([](RealMatrix a, RealVector b, RealVector f, double g) {
                 return socp::dense_cone(std::move(a), std::move(b), std::move(f), g);
             }),
             py::arg("A"), py::arg("b"), py::arg("f"), py::arg("g"))
        .def_readwrite("support", &socp::SocConstraint::support)
        .def_readwrite("A", &socp::SocConstraint::A)
        .def_readwrite("b", &socp::SocConstraint::b)
        .def_readwrite("f", &socp::SocConstraint::f)
        .def_readwrite("g", &socp::SocConstraint::g);

    py::class_<socp::ConicProgram>(m, "ConicProgram")
        .def(py::init([](const RealVector& c, const std::vector<socp::SocConstraint>& cones,
                         const std::vector<Index>& nonneg) {
                 socp::ConicProgram p;
                 p.n = c.size();
                 p.c = c;
                 p.cones = cones;
                 p.nonneg = nonneg;
                 p.validate();
                 return p;
             }),
             py::arg("c"), py::arg("cones"), py::arg("nonneg") = std::vector<Index>{})
        .def_readonly("n", &socp::ConicProgram::n)
        .def_readonly("c", &socp::ConicProgram::c)
        .def_readonly("cones", &socp::ConicProgram::cones)
        .def_readonly("nonneg", &socp::ConicProgram::nonneg);

    py::class_<socp::ConicSolution>(m, "ConicSolution")
        .def_readonly("status", &socp::ConicSolution::status)
        .def_readonly("x", &socp::ConicSolution::x)
        .def_readonly("objective", &socp::ConicSolution::objective)
        .def_readonly("dual_objective", &socp::ConicSolution::dual_objective)
        .def_readonly("primal_infeas", &socp::ConicSolution::primal_infeas)
        .def_readonly("gap_estimate", &socp::ConicSolution::gap_estimate)
        .def_readonly("iterations", &socp::ConicSolution::iterations)
        .def_property_readonly("optimal", &socp::ConicSolution::optimal);
    m.def("solve_socp", &socp::solve, py::arg("program"), py::arg("settings") = socp::SolverSettings{});
    m.def(
        "check_feasibility",
        [](const socp::ConicProgram& p, const RealVector& x) { return socp::check_feasibility(p, x).worst_violation; },
        py::arg("program"), py::arg("x"));

    py::class_<DesignSpec>(m, "DesignSpec")
        .def(py::init<>())
        .def_readwrite("alpha", &DesignSpec::alpha)
        .def_readwrite("sigma", &DesignSpec::sigma)
        .def_readwrite("epsilon", &DesignSpec::epsilon)
        .def_readwrite("max_reweight_iters", &DesignSpec::max_reweight_iters)
        .def_readwrite("stable_iterations", &DesignSpec::stable_iterations)
        .def_readwrite("activity_threshold_rel", &DesignSpec::activity_threshold_rel)
        .def_readwrite("activity_floor_abs", &DesignSpec::activity_floor_abs)
        .def_readwrite("rv_angles", &DesignSpec::rv_angles)
        .def_readwrite("rv_normalization", &DesignSpec::rv_normalization)
        .def_readwrite("solver", &DesignSpec::solver);

    py::class_<DesignResult>(m, "DesignResult")
        .def_readonly("success", &DesignResult::success)
        .def_readonly("status", &DesignResult::status)
        .def_readonly("message", &DesignResult::message)
        .def_property_readonly("weights", [](const DesignResult& r) { return as_matrix(r.weights); })
        .def_readonly("t", &DesignResult::t)
        .def_readonly("group_norms", &DesignResult::group_norms)
        .def_property_readonly("active_indices",
                               [](const DesignResult& r) {
                                   std::vector<Index> out;
                                   for (const auto& a : r.active) {
                                       out.push_back(a.index);
                                   }
                                   return out;
                               })
        .def_property_readonly("active_positions",
                               [](const DesignResult& r) {
                                   std::vector<double> out;
                                   for (const auto& a : r.active) {
                                       out.push_back(a.position);
                                   }
                                   return out;
                               })
        .def_readonly("residual", &DesignResult::residual)
        .def_readonly("rv_value", &DesignResult::rv_value)
        .def_readonly("objective", &DesignResult::objective)
        .def_readonly("objective_trace", &DesignResult::objective_trace)
        .def_readonly("active_count_trace", &DesignResult::active_count_trace)
        .def_readonly("solve_seconds", &DesignResult::solve_seconds);

    m.def("group_l1", [](const RealMatrix& w) { return group_l1(from_matrix(w)); }, py::arg("weights"));
    m.def("solve_design", &solve_design, py::arg("grid"), py::arg("tdl"), py::arg("sampling"), py::arg("spec"),
          py::arg("use_rv") = false);
    m.def("reweighted_design", &reweighted_design, py::arg("grid"), py::arg("tdl"), py::arg("sampling"),
          py::arg("spec"), py::arg("use_rv") = false);

    py::class_<JclsSpec>(m, "JclsSpec")
        .def(py::init<>())
        .def_readwrite("sigma", &JclsSpec::sigma)
        .def_readwrite("rv_angles", &JclsSpec::rv_angles)
        .def_readwrite("rv_normalization", &JclsSpec::rv_normalization)
        .def_readwrite("solver", &JclsSpec::solver);
    m.def(
        "j_cls",
        [](const std::vector<double>& positions, const TdlConfig& tdl, const SamplingSpec& sampling,
           const JclsSpec& spec) { return j_cls(positions, tdl, sampling, spec); },
        py::arg("positions"), py::arg("tdl"), py::arg("sampling"), py::arg("spec") = JclsSpec{});

    py::class_<GaConfig>(m, "GaConfig")
        .def(py::init<>())
        .def_readwrite("population", &GaConfig::population)
        .def_readwrite("generations", &GaConfig::generations)
        .def_readwrite("crossover_rate", &GaConfig::crossover_rate)
        .def_readwrite("mutation_rate", &GaConfig::mutation_rate)
        .def_readwrite("mutation_sigma", &GaConfig::mutation_sigma)
        .def_readwrite("tournament_size", &GaConfig::tournament_size)
        .def_readwrite("blend_alpha", &GaConfig::blend_alpha)
        .def_readwrite("min_spacing", &GaConfig::min_spacing)
        .def_readwrite("pin_first", &GaConfig::pin_first)
        .def_readwrite("seed", &GaConfig::seed)
        .def_readwrite("threads", &GaConfig::threads);

    py::class_<GaResult>(m, "GaResult")
        .def_property_readonly("best_positions", [](const GaResult& r) { return r.best.positions; })
        .def_readonly("fitness_history", &GaResult::fitness_history)
        .def_readonly("best_jcls", &GaResult::best_jcls)
        .def_property_readonly("best_weights", [](const GaResult& r) { return as_matrix(r.best_weights); })
        .def_readonly("evaluations", &GaResult::evaluations)
        .def_readonly("seconds", &GaResult::seconds);
    m.def(
        "run_ga",
        [](const GaConfig& config, int n_sensors, double aperture, const TdlConfig& tdl, const SamplingSpec& sampling,
           const JclsSpec& spec) { return run_ga(config, n_sensors, aperture, tdl, sampling, spec); },
        py::arg("config"), py::arg("n_sensors"), py::arg("aperture"), py::arg("tdl"), py::arg("sampling"),
        py::arg("spec") = JclsSpec{});

    py::class_<BeampatternGrid>(m, "BeampatternGrid")
        .def_readonly("frequencies", &BeampatternGrid::frequencies)
        .def_readonly("angles_deg", &BeampatternGrid::angles_deg)
        .def_readonly("response", &BeampatternGrid::response)
        .def_readonly("magnitude_db", &BeampatternGrid::magnitude_db)
        .def_readonly("phase_rad", &BeampatternGrid::phase_rad);
    m.def(
        "beampattern",
        [](const RealMatrix& weights, const std::vector<double>& positions, const TdlConfig& tdl,
           const std::vector<double>& frequencies, const std::vector<double>& angles) {
            return beampattern(from_matrix(weights), positions, tdl, frequencies, angles);
        },
        py::arg("weights"), py::arg("positions"), py::arg("tdl"), py::arg("frequencies"), py::arg("angles_deg"));
    m.def(
        "mean_adjacent_spacing", [](const std::vector<double>& p) { return mean_adjacent_spacing(p); },
        py::arg("positions"));
    m.def(
        "response_variation",
        [](const RealMatrix& weights, const std::vector<double>& positions, const TdlConfig& tdl,
           const SamplingSpec& sampling, RvAngles angles, RvNormalization norm) {
            return response_variation(from_matrix(weights), positions, tdl, sampling, angles, norm);
        },
        py::arg("weights"), py::arg("positions"), py::arg("tdl"), py::arg("sampling"),
        py::arg("rv_angles") = RvAngles::All, py::arg("rv_normalization") = RvNormalization::Mean);
    m.def(
        "design_residual",
        [](const RealMatrix& weights, const std::vector<double>& positions, const TdlConfig& tdl,
           const SamplingSpec& sampling) { return design_residual(from_matrix(weights), positions, tdl, sampling); },
        py::arg("weights"), py::arg("positions"), py::arg("tdl"), py::arg("sampling"));
    m.def("sidelobe_peak", &sidelobe_peak, py::arg("pattern"), py::arg("regions"));
    m.def("relative_sidelobe_levels", &relative_sidelobe_levels, py::arg("pattern"), py::arg("regions"),
          py::arg("mainlobe_deg"));
    m.def("peak_angles", &peak_angles, py::arg("pattern"));
}
