#pragma once

/// Runs a Scenario and renders the report (YAML) and the per-node trajectory
/// table (CSV). Reports carry no timestamps, so a fixed scenario gives the same
/// bytes on every run; wall-clock time is added only on request.

#include <nsmap/cartan.hpp>
#include <nsmap/cli/scenario.hpp>
#include <nsmap/kaehler.hpp>
#include <nsmap/map_solver.hpp>

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace nsmap::cli {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitDiverged = 2, kExitInternal = 3 };

struct RunOptions {
    std::optional<int> steps; ///< overrides grid.steps
    bool order_check = false; ///< in addition to the scenario's own flag
    bool timing = false;      ///< add wall-clock seconds to the report
};

struct RunResult {
    std::string report;
    std::string trajectory; ///< empty when not requested or not applicable
    int exit_code = kExitOk;
};

namespace detail {

struct Summary {
    double max = 0.0;
    double final = 0.0;
};

inline Summary summarize(const std::vector<double>& v)
{
    Summary s;
    for (double x : v) s.max = std::max(s.max, x);
    s.final = v.empty() ? 0.0 : v.back();
    return s;
}

inline void emit_summary(YAML::Emitter& out, const std::string& key, const Summary& s,
                         std::optional<double> order)
{
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "max" << YAML::Value << format_double(s.max);
    out << YAML::Key << "final" << YAML::Value << format_double(s.final);
    if (order) out << YAML::Key << "order" << YAML::Value << format_double(*order);
    out << YAML::EndMap;
}

inline void kv(YAML::Emitter& out, const std::string& key, double v)
{
    out << YAML::Key << key << YAML::Value << format_double(v);
}

inline std::string csv_row(const std::vector<double>& values)
{
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ',';
        row += format_double(values[i]);
    }
    return row + "\n";
}

inline MapProblem map_problem(const Scenario& s, const TauGrid& grid)
{
    MapProblem p{CoefficientField::constant(s.source.dense(s.m)),
                 CoefficientField::constant(s.target.dense(s.m)), s.signature, s.initial_state, grid};
    if (s.T0) p.T0 = *s.T0;
    if (s.dt_dtau != 1.0) {
        const double r = s.dt_dtau;
        p.dt_dtau = [r](double) { return r; };
    }
    return p;
}

/// Coarse-to-fine levels ending at the requested grid: steps/4, steps/2, steps
/// when steps is divisible by 4, otherwise steps, 2 steps, 4 steps.
inline std::vector<TauGrid> order_levels(const TauGrid& g)
{
    if (g.steps() % 4 == 0 && g.steps() / 4 >= 4) {
        return {TauGrid(g.tau0(), g.tau1(), g.steps() / 4), TauGrid(g.tau0(), g.tau1(), g.steps() / 2), g};
    }
    return {g, g.refined(2), g.refined(4)};
}

inline void run_map_solve(YAML::Emitter& out, std::string& csv, const Scenario& s, const TauGrid& grid,
                          bool order_check)
{
    const MapProblem problem = map_problem(s, grid);
    const MapSolution sol = solve_T_direct(problem);
    const FactorizedSolution fact = factorize(problem, sol);
    const double agreement = trajectory_agreement(fact.T_composed, sol.T);
    const PoissonReport poisson = poisson_structure_report(sol.T.back());

    std::optional<double> full_order, target_order;
    if (order_check) {
        std::vector<double> full, target;
        for (const TauGrid& g : order_levels(grid)) {
            const MapSolution level = solve_T_direct(map_problem(s, g));
            full.push_back(summarize(level.residual_full).max);
            target.push_back(summarize(level.residual_target).max);
        }
        try {
            full_order = fitted_order(full);
        } catch (const OrderIndeterminate&) {
        }
        try {
            target_order = fitted_order(target);
        } catch (const OrderIndeterminate&) {
        }
    }

    out << YAML::Key << "results" << YAML::Value << YAML::BeginMap;
    emit_summary(out, "residual_full", summarize(sol.residual_full), full_order);
    emit_summary(out, "residual_target", summarize(sol.residual_target), target_order);
    if (order_check && (!full_order || !target_order)) {
        out << YAML::Key << "order_note" << YAML::Value << "residuals below the roundoff floor; order indeterminate";
    }
    out << YAML::Key << "residual_warning" << YAML::Value << sol.residual_warning;
    kv(out, "factorization_agreement", agreement);
    kv(out, "poisson_defect", poisson.defect);
    out << YAML::Key << "symplectic" << YAML::Value << poisson.is_symplectic;
    out << YAML::Key << "xi_final" << YAML::Value;
    emit_vector(out, sol.xi.back());
    out << YAML::Key << "eta_final" << YAML::Value;
    emit_vector(out, sol.eta.back());
    out << YAML::Key << "T_final" << YAML::Value;
    emit_matrix(out, sol.T.back());
    out << YAML::Key << "constants" << YAML::Value;
    emit_matrix(out, fact.constants.joined());
    out << YAML::EndMap;

    const int d = 2 * s.m;
    std::string header = "tau";
    for (int i = 0; i < d; ++i) header += ",xi" + std::to_string(i);
    for (int i = 0; i < d; ++i) header += ",eta" + std::to_string(i);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) header += ",T" + std::to_string(i) + "_" + std::to_string(j);
    csv = header + ",residual_full,residual_target\n";
    for (int k = 0; k < grid.nodes(); ++k) {
        std::vector<double> row{grid.node(k)};
        for (int i = 0; i < d; ++i) row.push_back(sol.xi[k](i));
        for (int i = 0; i < d; ++i) row.push_back(sol.eta[k](i));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) row.push_back(sol.T[k](i, j));
        row.push_back(sol.residual_full[k]);
        row.push_back(sol.residual_target[k]);
        csv += csv_row(row);
    }
}

inline void run_cartan_demo(YAML::Emitter& out, std::string& csv, const Scenario& s, const TauGrid& grid)
{
    const BlockFormHamiltonian h = build_block_hamiltonian(s.form.block_matrix(s.m));
    const PairedCoordinates c0 = PairedCoordinates::real(s.X0, s.Xbar0);
    const auto traj = cartan_flow(h, s.signature, c0, grid);
    const double e0 = evaluate_form(h, c0).real();
    double drift = 0.0;
    std::vector<double> values;
    for (const auto& v : traj.values) {
        const double e = evaluate_form(h, PairedCoordinates::real(v.head(s.m).real(), v.tail(s.m).real())).real();
        values.push_back(e);
        drift = std::max(drift, std::abs(e - e0));
    }

    out << YAML::Key << "results" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "H_dense" << YAML::Value;
    emit_matrix(out, h.real_dense());
    out << YAML::Key << "form" << YAML::Value << full_form(h).to_string();
    out << YAML::Key << "diagonal_merge" << YAML::Value
        << restrict_form(h, Restriction::diagonal_merge, s.restriction_index).to_string();
    out << YAML::Key << "zero_slice" << YAML::Value
        << restrict_form(h, Restriction::zero_slice, s.restriction_index).to_string();
    kv(out, "form_initial", e0);
    kv(out, "form_final", values.back());
    kv(out, "form_drift", drift);
    out << YAML::Key << "X_final" << YAML::Value;
    emit_vector(out, traj.back().head(s.m).real());
    out << YAML::Key << "Xbar_final" << YAML::Value;
    emit_vector(out, traj.back().tail(s.m).real());
    out << YAML::EndMap;

    std::string header = "tau";
    for (int i = 0; i < s.m; ++i) header += ",X" + std::to_string(i);
    for (int i = 0; i < s.m; ++i) header += ",Xbar" + std::to_string(i);
    csv = header + ",form\n";
    for (int k = 0; k < grid.nodes(); ++k) {
        std::vector<double> row{grid.node(k)};
        for (int i = 0; i < 2 * s.m; ++i) row.push_back(traj[k](i).real());
        row.push_back(values[k]);
        csv += csv_row(row);
    }
}

inline void run_kaehler(YAML::Emitter& out, const Scenario& s)
{
    const KaehlerPotential pot = s.potential.build(s.n);
    const MetricField field = potential_metric_field(pot, s.step);
    std::vector<ComplexPoint> points;
    for (const auto& z : s.points) points.emplace_back(z);

    const HermitianReport herm = hermitian_validate(field, points);
    std::vector<CurvatureTable> tables;
    std::vector<HermitianMetricTable> metrics;
    std::vector<double> kaehler, mixed;
    for (const auto& p : points) {
        metrics.push_back(metric_from_potential(pot, p, s.step));
        tables.push_back(curvature(pot, p));
        kaehler.push_back(kaehler_condition_residual(field, p));
        mixed.push_back(christoffel_hermitian(field, p).gamma_mixed.max_abs());
    }
    const double k = fit_holomorphic_curvature(tables, metrics);

    double worst_model = 0.0, worst_einstein = 0.0, worst_component = 0.0;
    out << YAML::Key << "results" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double model = holomorphic_model_residual(tables[i], metrics[i], k);
        const double einstein = einstein_residual(tables[i], metrics[i], k, s.n);
        worst_model = std::max(worst_model, model);
        worst_einstein = std::max(worst_einstein, einstein);
        worst_component = std::max(worst_component, tables[i].R.max_abs());
        out << YAML::BeginMap;
        out << YAML::Key << "z" << YAML::Value;
        emit_complex_vector(out, points[i].z());
        kv(out, "hermitian_violation", herm.hermitian_violation[i]);
        kv(out, "line_element_violation", herm.line_element_violation[i]);
        kv(out, "kaehler_residual", kaehler[i]);
        kv(out, "christoffel_mixed_max", mixed[i]);
        kv(out, "curvature_max", tables[i].R.max_abs());
        kv(out, "model_residual", model);
        kv(out, "einstein_residual", einstein);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    kv(out, "fitted_K", k);
    kv(out, "hermitian_violation_max", herm.max_violation());
    kv(out, "kaehler_residual_max", summarize(kaehler).max);
    kv(out, "christoffel_mixed_max", summarize(mixed).max);
    kv(out, "curvature_max", worst_component);
    kv(out, "model_residual_max", worst_model);
    kv(out, "einstein_residual_max", worst_einstein);
    out << YAML::EndMap;
}

} // namespace detail

/// Never throws for numerical failures: divergence and singular geometry are
/// reported with status "diverged" and exit code 2.
inline RunResult run_scenario(Scenario s, const RunOptions& opt = {})
{
    const auto start = std::chrono::steady_clock::now();
    if (opt.steps) {
        if (*opt.steps < 4) throw ScenarioError("--steps must be at least 4");
        s.grid.steps = *opt.steps;
    }
    const bool order_check = opt.order_check || s.output.order_check;
    const TauGrid grid = s.grid.grid();

    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "report_version" << YAML::Value << 1;
    out << YAML::Key << "scenario" << YAML::Value;
    emit_scenario(out, s);

    // Results are rendered into a scratch emitter so a failure midway leaves
    // no partial results block in the report.
    RunResult result;
    YAML::Emitter body;
    body << YAML::BeginMap;
    std::string csv;
    std::string failure;
    double failure_tau = std::nan("");
    try {
        switch (s.kind) {
        case ScenarioKind::map_solve: detail::run_map_solve(body, csv, s, grid, order_check); break;
        case ScenarioKind::cartan_demo: detail::run_cartan_demo(body, csv, s, grid); break;
        case ScenarioKind::kaehler_analyze: detail::run_kaehler(body, s); break;
        }
    } catch (const IntegrationDiverged& e) {
        failure = e.what();
        failure_tau = e.tau();
    } catch (const SingularMetric& e) {
        failure = e.what();
    } catch (const SingularFactor& e) {
        failure = e.what();
    } catch (const DifferentiationError& e) {
        failure = e.what();
    }
    body << YAML::EndMap;

    if (failure.empty()) {
        out << YAML::Key << "status" << YAML::Value << "ok";
        const YAML::Node results = YAML::Load(body.c_str());
        out << YAML::Key << "results" << YAML::Value << results["results"];
    } else {
        out << YAML::Key << "status" << YAML::Value << "diverged";
        out << YAML::Key << "diverged" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "message" << YAML::Value << failure;
        if (!std::isnan(failure_tau)) out << YAML::Key << "tau" << YAML::Value << format_double(failure_tau);
        out << YAML::EndMap;
        result.exit_code = kExitDiverged;
        csv.clear();
    }
    if (opt.timing) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out << YAML::Key << "timing" << YAML::Value << YAML::BeginMap << YAML::Key << "wall_seconds"
            << YAML::Value << format_double(secs) << YAML::EndMap;
    }
    out << YAML::EndMap;
    result.report = std::string(out.c_str()) + "\n";
    if (s.output.trajectory) result.trajectory = std::move(csv);
    return result;
}

/// Writes `content` to `path` via a temporary file in the same directory and a rename.
inline void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// report.txt and, when present, trajectory.csv under `dir`.
inline void write_outputs(const std::filesystem::path& dir, const RunResult& r)
{
    write_atomically(dir / "report.txt", r.report);
    if (!r.trajectory.empty()) write_atomically(dir / "trajectory.csv", r.trajectory);
}

} // namespace nsmap::cli
