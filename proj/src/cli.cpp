// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sparsewb Authors

#include "sparsewb/cli.hpp"

#include "sparsewb/reference_response.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace sparsewb::cli {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;

// Reads the members of one JSON object and rejects unknown keys.
class Section {
public:
    Section(const json& parent, const std::string& name) : name_(name)
    {
        if (!parent.contains(name)) {
            return;
        }
        obj_ = &parent.at(name);
        if (!obj_->is_object()) {
            throw ConfigError("section '" + name + "' must be an object");
        }
    }

    void number(const char* key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError(where(key) + " must be a number");
            }
            out = v->get<double>();
        }
    }

    void optional_number(const char* key, std::optional<double>& out)
    {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw ConfigError(where(key) + " must be a number or null");
            }
        }
    }

    template <class Int>
    void integer(const char* key, Int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) {
                throw ConfigError(where(key) + " must be an integer");
            }
            if constexpr (std::is_unsigned_v<Int>) {
                if (v->is_number_unsigned()) {
                    out = v->get<Int>();
                } else {
                    throw ConfigError(where(key) + " must be non-negative");
                }
            } else {
                out = static_cast<Int>(v->get<long long>());
            }
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) {
                throw ConfigError(where(key) + " must be true or false");
            }
            out = v->get<bool>();
        }
    }

    template <class E>
    void choice(const char* key, E& out, const std::map<std::string, E>& names)
    {
        if (const json* v = find(key)) {
            if (!v->is_string() || !names.contains(v->get<std::string>())) {
                std::string options;
                for (const auto& [n, e] : names) {
                    options += (options.empty() ? "" : ", ") + n;
                }
                throw ConfigError(where(key) + " must be one of: " + options);
            }
            out = names.at(v->get<std::string>());
        }
    }

    const json* raw(const char* key) { return find(key); }

    void finish() const
    {
        if (obj_ == nullptr) {
            return;
        }
        for (const auto& [k, v] : obj_->items()) {
            if (!seen_.contains(k)) {
                throw ConfigError("unknown key '" + name_ + "." + k + "'");
            }
        }
    }

private:
    const json* find(const char* key)
    {
        seen_.insert(key);
        if (obj_ == nullptr || !obj_->contains(key)) {
            return nullptr;
        }
        return &obj_->at(key);
    }

    [[nodiscard]] std::string where(const char* key) const { return "'" + name_ + "." + key + "'"; }

    const json* obj_ = nullptr;
    std::string name_;
    std::set<std::string> seen_;
};

std::vector<AngleInterval> parse_regions(const json& v)
{
    if (!v.is_array()) {
        throw ConfigError("'sampling.sidelobe_regions' must be a list of [lo, hi] pairs");
    }
    std::vector<AngleInterval> out;
    for (const auto& r : v) {
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw ConfigError("'sampling.sidelobe_regions' entries must be [lo, hi] number pairs");
        }
        out.push_back({r[0].get<double>(), r[1].get<double>()});
    }
    return out;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& s, const std::string& what)
{
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("malformed " + what + ": '" + s + "'");
    }
}

Index parse_index(const std::string& s, const std::string& what)
{
    const double v = parse_double(s, what);
    if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("malformed " + what + ": '" + s + "'");
    }
    return static_cast<Index>(v);
}

// Header-indexed CSV table with LF or CRLF line endings.
struct Table {
    std::map<std::string, size_t> columns;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] size_t column(const std::string& name) const
    {
        const auto it = columns.find(name);
        if (it == columns.end()) {
            throw ConfigError("missing column '" + name + "'");
        }
        return it->second;
    }
};

Table read_table(std::istream& in)
{
    Table t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (header) {
            for (size_t i = 0; i < cells.size(); ++i) {
                t.columns[cells[i]] = i;
            }
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw ConfigError("row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.columns.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (header) {
        throw ConfigError("empty CSV file");
    }
    return t;
}

json number_or_null(const std::optional<double>& v)
{
    if (v && std::isfinite(*v)) {
        return *v;
    }
    return nullptr;
}

// Metrics of a pruned design (positions plus their weights).
struct Metrics {
    double residual = 0.0;
    std::optional<double> rv;
    std::optional<double> mean_spacing;
    std::optional<double> jcls;
    double sidelobe_peak_db = kDbFloor;
    std::optional<double> worst_relative_sidelobe_db;
};

struct EvalGrid {
    std::vector<double> frequencies;
    std::vector<double> angles;
};

EvalGrid evaluation_grid(const RunConfig& cfg, bool dense)
{
    if (dense) {
        return {dense_frequencies(cfg.sampling, cfg.dense), dense_angles(cfg.dense)};
    }
    return {cfg.sampling.frequencies(), angle_grid(0.0, 180.0, cfg.sampling.angle_step_deg)};
}

BeampatternGrid zero_pattern(const EvalGrid& grid)
{
    BeampatternGrid p;
    p.frequencies = grid.frequencies;
    p.angles_deg = grid.angles;
    const auto k = static_cast<Index>(grid.frequencies.size());
    const auto l = static_cast<Index>(grid.angles.size());
    p.response = ComplexMatrix::Zero(k, l);
    p.magnitude_db = RealMatrix::Constant(k, l, kDbFloor);
    p.phase_rad = RealMatrix::Zero(k, l);
    return p;
}

Metrics compute_metrics(const RunConfig& cfg, const std::vector<double>& positions, const WeightVector& weights,
                        const BeampatternGrid& pattern, std::optional<double> known_jcls)
{
    Metrics m;
    if (positions.empty()) {
        const auto ref = build_reference(cfg.sampling, cfg.tdl);
        m.residual = ref.values.norm();
        if (cfg.use_rv) {
            m.rv = 0.0;
        }
        return m;
    }
    m.residual = design_residual(weights, positions, cfg.tdl, cfg.sampling);
    if (cfg.sampling.frequencies().size() >= 2) {
        m.rv = response_variation(weights, positions, cfg.tdl, cfg.sampling, cfg.design.rv_angles,
                                  cfg.design.rv_normalization);
    }
    if (positions.size() >= 2) {
        m.mean_spacing = mean_adjacent_spacing(positions);
    }
    if (known_jcls) {
        m.jcls = known_jcls;
    } else {
        try {
            m.jcls = j_cls(positions, cfg.tdl, cfg.sampling, cfg.jcls_spec());
        } catch (const std::runtime_error& e) {
            std::cerr << "warning: J_CLS not available: " << e.what() << '\n';
        }
    }
    if (!cfg.sampling.sidelobe_regions.empty()) {
        m.sidelobe_peak_db = sidelobe_peak(pattern, cfg.sampling.sidelobe_regions);
        const auto rel = relative_sidelobe_levels(pattern, cfg.sampling.sidelobe_regions, cfg.sampling.mainlobe_deg);
        m.worst_relative_sidelobe_db = *std::max_element(rel.begin(), rel.end());
    }
    return m;
}

void put_metrics(ordered_json& j, const Metrics& m, std::size_t active_count)
{
    j["active_count"] = active_count;
    j["residual"] = m.residual;
    j["rv"] = number_or_null(m.rv);
    j["mean_spacing"] = number_or_null(m.mean_spacing);
    j["j_cls"] = number_or_null(m.jcls);
    j["sidelobe_peak_db"] = m.sidelobe_peak_db;
    j["worst_relative_sidelobe_db"] = number_or_null(m.worst_relative_sidelobe_db);
}

void write_summary(const fs::path& path, const ordered_json& j)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

struct Common {
    std::string config;
    std::string out;
    bool dense = false;
};

int report_config_error(const std::exception& e)
{
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
}

std::vector<Location> design_locations(const DesignResult& r, const ArrayGrid& grid)
{
    std::vector<Location> rows;
    for (const auto& a : r.active) {
        rows.push_back({a.index, grid[a.index], r.group_norms[a.index]});
    }
    return rows;
}

int cmd_design(const Common& opt, bool reweighted)
{
    RunConfig cfg;
    try {
        cfg = load_config(opt.config);
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    const auto grid = build_grid(cfg.aperture, cfg.grid_count);
    const auto start = std::chrono::steady_clock::now();
    DesignResult r = reweighted ? reweighted_design(grid, cfg.tdl, cfg.sampling, cfg.design, cfg.use_rv)
                                : solve_design(grid, cfg.tdl, cfg.sampling, cfg.design, cfg.use_rv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(opt.out);
    fs::create_directories(dir);
    const auto active = active_design(r, grid);
    std::vector<Index> indices;
    for (const auto& a : r.active) {
        indices.push_back(a.index);
    }
    const auto eval = evaluation_grid(cfg, opt.dense);
    const auto pattern = active.positions.empty()
                             ? zero_pattern(eval)
                             : beampattern(active.weights, active.positions, cfg.tdl, eval.frequencies, eval.angles);
    {
        auto out = open_output(dir / "locations.csv");
        write_locations(out, design_locations(r, grid));
    }
    {
        auto out = open_output(dir / "weights.csv");
        write_weights(out, indices, active.weights);
    }
    {
        auto out = open_output(dir / "pattern.csv");
        write_pattern(out, pattern);
    }
    if (reweighted) {
        auto out = open_output(dir / "iterations.csv");
        out << "iteration,objective,active_count,solver_iterations,status\n";
        for (size_t i = 0; i < r.objective_trace.size(); ++i) {
            out << i + 1 << ',' << format_number(r.objective_trace[i]) << ',' << r.active_count_trace[i] << ','
                << r.solver_stats[i].iterations << ',' << socp::to_string(r.solver_stats[i].status) << '\n';
        }
    }

    const auto metrics = compute_metrics(cfg, active.positions, active.weights, pattern, std::nullopt);
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = reweighted ? "reweighted" : "design";
    j["method"] = "cs";
    j["success"] = r.success;
    j["status"] = std::string(socp::to_string(r.status));
    if (!r.message.empty()) {
        j["message"] = r.message;
    }
    j["objective"] = r.objective;
    j["solver_residual"] = r.residual;
    j["solver_rv"] = number_or_null(r.rv_value);
    j["alpha"] = cfg.design.alpha;
    j["sigma"] = number_or_null(cfg.design.sigma);
    j["reweight_iterations"] = r.objective_trace.size();
    put_metrics(j, metrics, r.active.size());
    j["positions"] = active.positions;
    j["wall_time_s"] = wall;
    write_summary(dir / "summary.json", j);

    std::cout << (reweighted ? "reweighted" : "design") << ": " << socp::to_string(r.status) << ", "
              << r.active.size() << " active sensors, residual " << format_number(r.residual) << '\n';
    if (!r.success) {
        std::cerr << "design failed: " << r.message << '\n';
        return kNumericalFailure;
    }
    return kOk;
}

int cmd_ga(const Common& opt, std::optional<std::uint64_t> seed)
{
    RunConfig cfg;
    try {
        cfg = load_config(opt.config);
        if (seed) {
            cfg.ga.seed = *seed;
        }
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    GaResult r;
    try {
        r = run_ga(cfg.ga, cfg.ga_sensors, cfg.ga_aperture, cfg.tdl, cfg.sampling, cfg.jcls_spec());
    } catch (const std::invalid_argument& e) {
        return report_config_error(e);
    } catch (const std::runtime_error& e) {
        std::cerr << "GA failed: " << e.what() << '\n';
        return kNumericalFailure;
    }

    const fs::path dir(opt.out);
    fs::create_directories(dir);
    const auto& positions = r.best.positions;
    std::vector<Index> indices(positions.size());
    std::vector<Location> rows;
    const RealVector norms = r.best_weights.group_norms();
    for (size_t i = 0; i < positions.size(); ++i) {
        indices[i] = static_cast<Index>(i);
        rows.push_back({static_cast<Index>(i), positions[i], norms[static_cast<Index>(i)]});
    }
    const auto eval = evaluation_grid(cfg, opt.dense);
    const auto pattern = beampattern(r.best_weights, positions, cfg.tdl, eval.frequencies, eval.angles);
    {
        auto out = open_output(dir / "locations.csv");
        write_locations(out, rows);
    }
    {
        auto out = open_output(dir / "weights.csv");
        write_weights(out, indices, r.best_weights);
    }
    {
        auto out = open_output(dir / "pattern.csv");
        write_pattern(out, pattern);
    }
    {
        auto out = open_output(dir / "fitness_history.csv");
        out << "generation,best_fitness,best_jcls\n";
        for (size_t g = 0; g < r.fitness_history.size(); ++g) {
            out << g << ',' << format_number(r.fitness_history[g]) << ',' << format_number(1.0 / r.fitness_history[g])
                << '\n';
        }
    }
    const auto metrics = compute_metrics(cfg, positions, r.best_weights, pattern, r.best_jcls);
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "ga";
    j["method"] = "ga";
    j["success"] = true;
    j["seed"] = cfg.ga.seed;
    j["generations"] = cfg.ga.generations;
    j["population"] = cfg.ga.population;
    j["evaluations"] = r.evaluations;
    j["aperture"] = cfg.ga_aperture;
    put_metrics(j, metrics, positions.size());
    j["positions"] = positions;
    j["wall_time_s"] = r.seconds;
    write_summary(dir / "summary.json", j);
    std::cout << "ga: J_CLS " << format_number(r.best_jcls) << " after " << cfg.ga.generations << " generations\n";
    return kOk;
}

int cmd_evaluate(const Common& opt, const std::string& locations_path, const std::string& weights_path)
{
    RunConfig cfg;
    std::vector<Location> locs;
    std::optional<WeightVector> weights;
    try {
        cfg = load_config(opt.config);
        std::ifstream lin(locations_path, std::ios::binary);
        if (!lin) {
            throw ConfigError("cannot open " + locations_path);
        }
        locs = read_locations(lin);
        if (locs.empty()) {
            throw ConfigError("no locations in " + locations_path);
        }
        if (!weights_path.empty()) {
            std::ifstream win(weights_path, std::ios::binary);
            if (!win) {
                throw ConfigError("cannot open " + weights_path);
            }
            std::vector<Index> sensors;
            for (const auto& l : locs) {
                sensors.push_back(l.index);
            }
            weights = read_weights(win, sensors, cfg.tdl.taps);
        }
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    std::vector<double> positions;
    for (const auto& l : locs) {
        positions.push_back(l.position);
    }
    if (!std::is_sorted(positions.begin(), positions.end())) {
        return report_config_error(ConfigError("locations must be sorted by position"));
    }
    std::optional<double> fitted_jcls;
    if (!weights) {
        try {
            auto fit = j_cls_solve(positions, cfg.tdl, cfg.sampling, cfg.jcls_spec());
            weights = std::move(fit.weights);
            fitted_jcls = fit.value;
        } catch (const std::runtime_error& e) {
            std::cerr << "weight fit failed: " << e.what() << '\n';
            return kNumericalFailure;
        }
    }
    const fs::path dir(opt.out);
    fs::create_directories(dir);
    const auto eval = evaluation_grid(cfg, opt.dense);
    const auto pattern = beampattern(*weights, positions, cfg.tdl, eval.frequencies, eval.angles);
    {
        auto out = open_output(dir / "pattern.csv");
        write_pattern(out, pattern);
    }
    if (fitted_jcls) {
        std::vector<Index> sensors;
        for (const auto& l : locs) {
            sensors.push_back(l.index);
        }
        auto out = open_output(dir / "weights.csv");
        write_weights(out, sensors, *weights);
    }
    const auto metrics = compute_metrics(cfg, positions, *weights, pattern, fitted_jcls);
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "evaluate";
    j["method"] = "external";
    j["success"] = true;
    j["weights_fitted"] = fitted_jcls.has_value();
    put_metrics(j, metrics, positions.size());
    j["positions"] = positions;
    write_summary(dir / "summary.json", j);
    std::cout << "evaluate: " << positions.size() << " sensors, residual " << format_number(metrics.residual) << '\n';
    return kOk;
}

std::string cell(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return "n/a";
    }
    const auto& v = j.at(key);
    if (v.is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
        return buf;
    }
    return v.dump();
}

std::string delta(const json& a, const json& b, const char* key)
{
    if (!a.contains(key) || !b.contains(key) || !a.at(key).is_number() || !b.at(key).is_number()) {
        return "n/a";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", b.at(key).get<double>() - a.at(key).get<double>());
    return buf;
}

int cmd_compare(const std::string& first, const std::string& second)
{
    json a;
    json b;
    try {
        a = json::parse(read_file(first));
        b = json::parse(read_file(second));
        if (!a.is_object() || !b.is_object()) {
            throw ConfigError("summary files must hold JSON objects");
        }
    } catch (const std::exception& e) {
        return report_config_error(e);
    }
    auto label = [](const json& j, const std::string& fallback) {
        return j.contains("method") && j.at("method").is_string() ? j.at("method").get<std::string>() : fallback;
    };
    const char* keys[] = {"active_count", "mean_spacing", "j_cls", "residual", "rv", "sidelobe_peak_db",
                          "wall_time_s"};
    auto row = [](const std::string& c0, const std::string& c1, const std::string& c2, const std::string& c3) {
        std::cout << std::left << std::setw(20) << c0 << std::right << ' ' << std::setw(14) << c1 << ' '
                  << std::setw(14) << c2 << ' ' << std::setw(14) << c3 << '\n';
    };
    row("metric", label(a, "A"), label(b, "B"), "delta");
    for (const char* k : keys) {
        row(k, cell(a, k), cell(b, k), delta(a, b, k));
    }
    return kOk;
}

}  // namespace

void RunConfig::validate() const
{
    if (schema_version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
    }
    try {
        build_grid(aperture, grid_count);
        tdl.validate();
        sampling.validate();
        design.validate();
        ga.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (use_rv && !design.sigma) {
        throw ConfigError("the response-variation constraint needs design.sigma");
    }
    if (use_rv && sampling.frequencies().size() < 2) {
        throw ConfigError("the response-variation constraint needs at least two frequencies");
    }
    if (ga_sensors < 1 || !(ga_aperture > 0.0)) {
        throw ConfigError("ga.sensors must be positive and ga.aperture must be positive");
    }
    if (!(dense.omega_step > 0.0) || !(dense.angle_step_deg > 0.0)) {
        throw ConfigError("evaluation steps must be positive");
    }
}

JclsSpec RunConfig::jcls_spec() const
{
    JclsSpec s;
    s.sigma = use_rv ? design.sigma : std::nullopt;
    s.rv_angles = design.rv_angles;
    s.rv_normalization = design.rv_normalization;
    s.solver = design.solver;
    return s;
}

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig cfg;
    if (!root.contains("schema_version")) {
        throw ConfigError("missing schema_version");
    }
    const std::set<std::string> sections{"schema_version", "grid", "tdl", "sampling", "design",
                                         "solver", "ga", "evaluation"};
    for (const auto& [k, v] : root.items()) {
        if (!sections.contains(k)) {
            throw ConfigError("unknown key '" + k + "'");
        }
    }
    if (!root.at("schema_version").is_number_integer()) {
        throw ConfigError("schema_version must be an integer");
    }
    cfg.schema_version = root.at("schema_version").get<int>();

    Section grid(root, "grid");
    grid.number("aperture", cfg.aperture);
    grid.integer("count", cfg.grid_count);
    grid.finish();

    Section tdl(root, "tdl");
    tdl.integer("taps", cfg.tdl.taps);
    tdl.finish();

    Section smp(root, "sampling");
    auto& s = cfg.sampling;
    double lo = s.omega_lo / kPi;
    double hi = s.omega_hi / kPi;
    double step = s.omega_step / kPi;
    double ref = s.omega_ref / kPi;
    smp.number("omega_lo_pi", lo);
    smp.number("omega_hi_pi", hi);
    smp.number("omega_step_pi", step);
    smp.number("omega_ref_pi", ref);
    s.omega_lo = lo * kPi;
    s.omega_hi = hi * kPi;
    s.omega_step = step * kPi;
    s.omega_ref = ref * kPi;
    smp.number("mainlobe_deg", s.mainlobe_deg);
    smp.number("mainlobe_halfwidth_deg", s.mainlobe_halfwidth_deg);
    smp.number("angle_step_deg", s.angle_step_deg);
    if (const json* r = smp.raw("sidelobe_regions")) {
        s.sidelobe_regions = parse_regions(*r);
    }
    smp.choice("mainlobe_phase", s.mainlobe_phase,
               std::map<std::string, MainlobePhase>{{"unit", MainlobePhase::Unit},
                                                    {"group_delay", MainlobePhase::GroupDelay}});
    smp.finish();

    Section des(root, "design");
    auto& d = cfg.design;
    des.number("alpha", d.alpha);
    des.optional_number("sigma", d.sigma);
    des.boolean("use_rv", cfg.use_rv);
    des.number("epsilon", d.epsilon);
    des.integer("max_reweight_iters", d.max_reweight_iters);
    des.integer("stable_iterations", d.stable_iterations);
    des.number("activity_threshold_rel", d.activity_threshold_rel);
    des.number("activity_floor_abs", d.activity_floor_abs);
    des.choice("rv_angles", d.rv_angles,
               std::map<std::string, RvAngles>{{"all", RvAngles::All}, {"mainlobe", RvAngles::Mainlobe}});
    des.choice("rv_normalization", d.rv_normalization,
               std::map<std::string, RvNormalization>{{"mean", RvNormalization::Mean},
                                                      {"sum", RvNormalization::Sum}});
    des.finish();

    Section sol(root, "solver");
    sol.integer("max_iters", d.solver.max_iters);
    sol.number("tol_feas", d.solver.tol_feas);
    sol.number("tol_gap", d.solver.tol_gap);
    sol.number("tol_infeas", d.solver.tol_infeas);
    sol.number("reduced_dual_factor", d.solver.reduced_dual_factor);
    sol.boolean("verbose", d.solver.verbose);
    sol.finish();
    if (!(d.solver.tol_feas > 0.0) || !(d.solver.tol_gap > 0.0) || !(d.solver.tol_infeas > 0.0) ||
        !(d.solver.reduced_dual_factor >= 1.0) || d.solver.max_iters < 0) {
        throw ConfigError("solver tolerances must be positive and max_iters non-negative");
    }

    Section ga(root, "ga");
    auto& g = cfg.ga;
    ga.integer("sensors", cfg.ga_sensors);
    ga.number("aperture", cfg.ga_aperture);
    ga.integer("population", g.population);
    ga.integer("generations", g.generations);
    ga.number("crossover_rate", g.crossover_rate);
    ga.number("mutation_rate", g.mutation_rate);
    ga.optional_number("mutation_sigma", g.mutation_sigma);
    ga.integer("tournament_size", g.tournament_size);
    ga.number("blend_alpha", g.blend_alpha);
    ga.number("min_spacing", g.min_spacing);
    ga.boolean("pin_first", g.pin_first);
    ga.integer("seed", g.seed);
    ga.integer("threads", g.threads);
    ga.finish();

    Section ev(root, "evaluation");
    double dense_step = cfg.dense.omega_step / kPi;
    ev.number("dense_omega_step_pi", dense_step);
    cfg.dense.omega_step = dense_step * kPi;
    ev.number("dense_angle_step_deg", cfg.dense.angle_step_deg);
    ev.finish();

    cfg.validate();
    return cfg;
}

RunConfig load_config(const fs::path& path) { return parse_config(read_file(path)); }

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_locations(std::ostream& out, const std::vector<Location>& rows)
{
    out << "index,position_lambda,group_norm\n";
    for (const auto& r : rows) {
        out << r.index << ',' << format_number(r.position) << ',' << format_number(r.group_norm) << '\n';
    }
}

void write_weights(std::ostream& out, const std::vector<Index>& sensors, const WeightVector& w)
{
    if (static_cast<Index>(sensors.size()) != w.sensors()) {
        throw std::invalid_argument("one sensor index per weight group is required");
    }
    out << "sensor,tap,value\n";
    for (Index m = 0; m < w.sensors(); ++m) {
        for (Index j = 0; j < w.taps(); ++j) {
            out << sensors[static_cast<size_t>(m)] << ',' << j << ',' << format_number(w(m, j)) << '\n';
        }
    }
}

void write_pattern(std::ostream& out, const BeampatternGrid& pattern)
{
    out << "frequency,angle_deg,magnitude_db,phase_rad\n";
    for (size_t k = 0; k < pattern.frequencies.size(); ++k) {
        for (size_t l = 0; l < pattern.angles_deg.size(); ++l) {
            const auto kk = static_cast<Index>(k);
            const auto ll = static_cast<Index>(l);
            out << format_number(pattern.frequencies[k]) << ',' << format_number(pattern.angles_deg[l]) << ','
                << format_number(pattern.magnitude_db(kk, ll)) << ',' << format_number(pattern.phase_rad(kk, ll))
                << '\n';
        }
    }
}

std::vector<Location> read_locations(std::istream& in)
{
    const Table t = read_table(in);
    const size_t pos = t.column("position_lambda");
    const auto idx_it = t.columns.find("index");
    const auto norm_it = t.columns.find("group_norm");
    std::vector<Location> out;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        Location l;
        l.index = idx_it != t.columns.end() ? parse_index(t.rows[r][idx_it->second], "index")
                                            : static_cast<Index>(r);
        l.position = parse_double(t.rows[r][pos], "position");
        if (norm_it != t.columns.end()) {
            l.group_norm = parse_double(t.rows[r][norm_it->second], "group norm");
        }
        out.push_back(l);
    }
    return out;
}

WeightVector read_weights(std::istream& in, const std::vector<Index>& sensors, Index taps)
{
    const Table t = read_table(in);
    const size_t sc = t.column("sensor");
    const size_t tc = t.column("tap");
    const size_t vc = t.column("value");
    std::map<Index, Index> slot;
    for (size_t i = 0; i < sensors.size(); ++i) {
        if (!slot.emplace(sensors[i], static_cast<Index>(i)).second) {
            throw ConfigError("duplicate sensor index " + std::to_string(sensors[i]));
        }
    }
    WeightVector w(static_cast<Index>(sensors.size()), taps);
    std::vector<bool> seen(static_cast<size_t>(w.flat().size()), false);
    for (const auto& row : t.rows) {
        const Index s = parse_index(row[sc], "sensor");
        const Index j = parse_index(row[tc], "tap");
        const auto it = slot.find(s);
        if (it == slot.end()) {
            throw ConfigError("weights reference sensor " + std::to_string(s) + " missing from the locations");
        }
        if (j >= taps) {
            throw ConfigError("tap " + std::to_string(j) + " exceeds the TDL length");
        }
        const auto flat = static_cast<size_t>(it->second * taps + j);
        if (seen[flat]) {
            throw ConfigError("duplicate weight entry");
        }
        seen[flat] = true;
        w(it->second, j) = parse_double(row[vc], "weight");
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw ConfigError("weights file does not cover every sensor and tap");
    }
    return w;
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Sparse wideband array design"};
    app.require_subcommand(1);
    Common common;
    std::optional<std::uint64_t> seed;
    std::string locations;
    std::string weights;
    std::string first;
    std::string second;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "JSON run configuration")->required();
        sub->add_option("--out", common.out, "output directory")->required();
        sub->add_flag("--dense-eval", common.dense, "evaluate the pattern on the dense grid");
    };
    auto* design = app.add_subcommand("design", "group-sparse design");
    add_common(design);
    auto* reweighted = app.add_subcommand("reweighted", "reweighted group-sparse design");
    add_common(reweighted);
    auto* ga = app.add_subcommand("ga", "genetic-algorithm baseline");
    add_common(ga);
    ga->add_option("--seed", seed, "random seed (overrides ga.seed)");
    auto* evaluate = app.add_subcommand("evaluate", "evaluate an externally supplied design");
    add_common(evaluate);
    evaluate->add_option("--locations", locations, "locations CSV")->required();
    evaluate->add_option("--weights", weights, "weights CSV; fitted when omitted");
    auto* compare = app.add_subcommand("compare", "compare two summary files");
    compare->add_option("first", first, "first summary.json")->required();
    compare->add_option("second", second, "second summary.json")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (design->parsed()) {
            return cmd_design(common, false);
        }
        if (reweighted->parsed()) {
            return cmd_design(common, true);
        }
        if (ga->parsed()) {
            return cmd_ga(common, seed);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(common, locations, weights);
        }
        return cmd_compare(first, second);
    } catch (const ConfigError& e) {
        return report_config_error(e);
    } catch (const std::invalid_argument& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace sparsewb::cli
