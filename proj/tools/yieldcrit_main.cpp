#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "yieldcrit/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"critical yield numbers for rigid particles settling in a Bingham fluid"};
    app.require_subcommand(1);

    yieldcrit::RunConfig cfg;
    std::string mode = "single";

    auto add_solver_options = [&cfg, &mode](CLI::App* cmd) {
        cmd->add_option("--mode", mode, "constraint mode: single pins particles to 1, multi lets rigid velocities float")
            ->check(CLI::IsMember({"single", "multi"}));
        cmd->add_option("--tol", cfg.solver.tol, "stopping tolerance");
        cmd->add_option("--max-iters", cfg.solver.max_iters, "iteration cap");
        cmd->add_option("--check-every", cfg.solver.check_every, "iterations between stopping checks");
        cmd->add_option("--tau", cfg.solver.tau, "primal step, 0 selects the default");
        cmd->add_option("--sigma", cfg.solver.sigma, "dual step, 0 selects the default");
    };
    auto add_output_options = [&cfg](CLI::App* cmd) {
        cmd->add_option("--out", cfg.out_dir, "output directory");
        cmd->add_flag("--pgm,!--no-pgm", cfg.emit_pgm, "write 16-bit rasters");
        cmd->add_flag("--csv,!--no-csv", cfg.emit_csv, "write CSV dumps");
        cmd->add_flag("--report,!--no-report", cfg.emit_report, "write the text report");
    };

    CLI::App* solve = app.add_subcommand("solve", "limiting profile and critical yield number");
    solve->add_option("--geometry", cfg.geometry_path, "geometry file")->required();
    solve->add_option("--n", cfg.n, "grid resolution")->required();
    add_solver_options(solve);
    add_output_options(solve);

    CLI::App* sweep = app.add_subcommand("sweep", "viscous flows at a ladder of yield numbers");
    sweep->add_option("--geometry", cfg.geometry_path, "geometry file")->required();
    sweep->add_option("--n", cfg.n, "grid resolution")->required();
    sweep->add_option("--y", cfg.y_values, "absolute yield numbers, increasing");
    sweep->add_option("--fracs", cfg.y_fracs, "fractions of the critical value used when --y is absent");
    add_solver_options(sweep);
    add_output_options(sweep);

    CLI::App* scale = app.add_subcommand("scale", "buoyancy number from physical parameters");
    scale->add_option("--tau-y", cfg.scales.tau_y, "yield stress")->required();
    scale->add_option("--mu", cfg.scales.mu_f, "fluid viscosity")->required();
    scale->add_option("--rho-s", cfg.scales.rho_s, "particle density")->required();
    scale->add_option("--rho-f", cfg.scales.rho_f, "fluid density")->required();
    scale->add_option("--g", cfg.scales.g, "gravitational acceleration")->required();
    scale->add_option("--l", cfg.scales.l_hat, "length scale")->required();
    CLI::Option* scale_geom =
        scale->add_option("--geometry", cfg.geometry_path, "geometry for the settling verdict");
    CLI::Option* scale_n = scale->add_option("--n", cfg.n, "grid resolution");
    scale_geom->needs(scale_n);
    add_solver_options(scale);

    CLI::App* analyze = app.add_subcommand("analyze", "histogram and level sets of a field dump");
    analyze->add_option("--field", cfg.field_path, "CSV cell dump produced by solve")->required();
    analyze->add_option("--bins", cfg.bins, "histogram bins")->check(CLI::Range(2, 100000));
    add_output_options(analyze);

    CLI11_PARSE(app, argc, argv);

    cfg.mode = mode == "multi" ? yieldcrit::ConstraintMode::MultiParticle
                               : yieldcrit::ConstraintMode::SingleParticle;
    CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    if (sub == solve) return yieldcrit::run_solve(cfg, std::cout, std::cerr);
    if (sub == sweep) return yieldcrit::run_sweep(cfg, std::cout, std::cerr);
    if (sub == scale) return yieldcrit::run_scale(cfg, std::cout, std::cerr);
    return yieldcrit::run_analyze(cfg, std::cout, std::cerr);
}
