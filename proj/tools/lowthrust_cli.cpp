// Batch front-end: mission file in, reports and CSV out.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lowthrust/lowthrust.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Low-thrust circular orbit transfer solver with J2 RAAN targeting"};
    std::string config_path;
    std::string mode_name = "ocp";
    std::string out_dir = "out";
    std::optional<int> branch;
    std::optional<std::string> scan;
    std::optional<double> step_day;
    std::optional<double> tol;

    app.add_option("--config", config_path, "Mission file (INI)")->required()->check(CLI::ExistingFile);
    app.add_option("--mode", mode_name, "Pipeline depth")
        ->check(CLI::IsMember({"edelbaum", "ses", "ocp", "singular-analysis"}));
    app.add_option("--out", out_dir, "Output directory");
    auto* b = app.add_option("--branch", branch, "RAAN branch n (target + 2 pi n)");
    auto* s = app.add_option("--scan-branches", scan, "Scan RAAN branches A..B, keep the cheapest");
    b->excludes(s);
    app.add_option("--step", step_day, "Integration step, days")->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "Shooting tolerance on the scaled residual norm")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    try {
        lowthrust::MissionConfig cfg = lowthrust::load_config(config_path);
        if (branch) {
            cfg.solver.raan_branch = *branch;
            cfg.solver.scan_branches.reset();
        }
        if (scan) {
            cfg.solver.scan_branches = lowthrust::parse_branch_range(*scan);
        }
        if (step_day) {
            cfg.solver.step_day = *step_day;
        }
        if (tol) {
            cfg.solver.tolerance = *tol;
        }
        cfg.validate();

        const lowthrust::PipelineResult r = lowthrust::run_pipeline(cfg, lowthrust::parse_mode(mode_name));
        lowthrust::write_outputs(r, cfg, out_dir);
        std::cout << lowthrust::format_report(r, cfg);
        for (const auto& e : r.errors) {
            std::cerr << "error [" << e.stage << "]: " << e.message << '\n';
        }
        return r.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
