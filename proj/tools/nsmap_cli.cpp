// nsmap: run, validate and demo scenarios.

#include <nsmap/cli/demos.hpp>
#include <nsmap/cli/runner.hpp>
#include <nsmap/cli/scenario.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace nsmap::cli;

namespace {

struct Outcome {
    int code = kExitOk;
    std::string stdout_text;
    std::string stderr_text;
};

Outcome run_one(const std::string& path, const std::optional<fs::path>& out_dir, const RunOptions& opt)
{
    Outcome o;
    try {
        const Scenario s = parse_scenario(path);
        const RunResult r = run_scenario(s, opt);
        o.code = r.exit_code;
        if (out_dir) {
            write_outputs(*out_dir, r);
        } else {
            o.stdout_text = r.report;
        }
        if (r.exit_code == kExitDiverged) o.stderr_text = path + ": numerical divergence (see report)\n";
    } catch (const ScenarioError& e) {
        o.code = kExitInvalid;
        o.stderr_text = std::string(e.what()) + "\n";
    } catch (const nsmap::InvalidArgument& e) {
        o.code = kExitInvalid;
        o.stderr_text = path + ": " + e.what() + "\n";
    } catch (const std::exception& e) {
        o.code = kExitInternal;
        o.stderr_text = path + ": internal error: " + e.what() + "\n";
    }
    return o;
}

// Distinct subdirectory names from the scenario file stems.
std::vector<std::string> output_names(const std::vector<std::string>& paths)
{
    std::vector<std::string> names;
    for (const auto& p : paths) {
        std::string base = fs::path(p).stem().string();
        std::string name = base;
        for (int k = 2; std::find(names.begin(), names.end(), name) != names.end(); ++k) {
            name = base + "-" + std::to_string(k);
        }
        names.push_back(name);
    }
    return names;
}

int cmd_run(const std::vector<std::string>& paths, const std::string& out, const RunOptions& opt)
{
    const auto names = output_names(paths);
    std::vector<std::future<Outcome>> jobs;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        std::optional<fs::path> dir;
        if (!out.empty()) dir = paths.size() == 1 ? fs::path(out) : fs::path(out) / names[i];
        jobs.push_back(std::async(std::launch::async, run_one, paths[i], dir, opt));
    }
    int code = kExitOk;
    for (auto& j : jobs) {
        const Outcome o = j.get();
        std::cout << o.stdout_text;
        std::cerr << o.stderr_text;
        code = std::max(code, o.code);
    }
    return code;
}

int cmd_validate(const std::vector<std::string>& paths)
{
    int code = kExitOk;
    for (const auto& p : paths) {
        try {
            parse_scenario(p);
            std::cout << p << ": ok\n";
        } catch (const ScenarioError& e) {
            std::cerr << e.what() << "\n";
            code = std::max<int>(code, kExitInvalid);
        }
    }
    return code;
}

int cmd_demo(const std::string& name, const std::string& out, const RunOptions& opt)
{
    const auto yaml = find_demo(name);
    if (!yaml) {
        std::cerr << "unknown demo '" << name << "'; available:";
        for (const auto& d : kDemos) std::cerr << " " << d.name;
        std::cerr << "\n";
        return kExitInvalid;
    }
    const RunResult r = run_scenario(parse_scenario_text(std::string(*yaml), "demo:" + name), opt);
    if (out.empty()) {
        std::cout << r.report;
    } else {
        write_outputs(out, r);
    }
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Non-symplectic linear maps between quadratic Hamiltonian systems"};
    app.require_subcommand(1);

    std::vector<std::string> scenarios;
    std::string out;
    int steps = 0;
    bool order_check = false;
    bool timing = false;

    auto* run = app.add_subcommand("run", "Run one or more scenarios (concurrently when several are given)");
    run->add_option("--scenario", scenarios, "Scenario file (repeatable)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory for report.txt and trajectory.csv; stdout report otherwise");
    run->add_option("--steps", steps, "Override grid.steps")->check(CLI::Range(4, 100000000));
    run->add_flag("--order-check", order_check, "Estimate residual convergence orders");
    run->add_flag("--timing", timing, "Add wall-clock time to the report (breaks byte determinism)");

    auto* validate = app.add_subcommand("validate", "Parse and validate scenarios without running them");
    validate->add_option("--scenario", scenarios, "Scenario file (repeatable)")->required();

    std::string demo_name;
    auto* demo = app.add_subcommand("demo", "Run a built-in scenario");
    demo->add_option("name", demo_name, "oscillator-map, kaehler-fs or cartan-identity")->required();
    demo->add_option("--out", out, "Output directory");
    demo->add_flag("--timing", timing, "Add wall-clock time to the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalid;
    }

    RunOptions opt;
    if (steps > 0) opt.steps = steps;
    opt.order_check = order_check;
    opt.timing = timing;

    try {
        if (*run) return cmd_run(scenarios, out, opt);
        if (*validate) return cmd_validate(scenarios);
        if (*demo) return cmd_demo(demo_name, out, opt);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
