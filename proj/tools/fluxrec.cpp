#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxrec/run.hpp"

int main(int argc, char **argv) {
    using namespace fluxrec;
    CLI::App app{"Adaptive SUPG with flux-recovery error estimators"};
    app.require_subcommand(1);

    RunConfig cfg;
    double epsilon = 0.0;
    std::string recovery = "l2-rt0";
    std::string marking = "minimal";
    std::string refinement = "bisect";
    auto *run_cmd = app.add_subcommand("run", "Run the adaptive loop and write history.csv / meta.json");
    run_cmd->add_option("--problem", cfg.problem, "Built-in problem: example1, example2, manufactured");
    run_cmd->add_option("--config", cfg.problem_file, "Problem description file (key = value)")
        ->check(CLI::ExistingFile);
    auto *eps_opt = run_cmd->add_option("--epsilon", epsilon, "Diffusion coefficient")->check(CLI::PositiveNumber);
    run_cmd->add_option("--theta", cfg.adapt.theta, "Marking parameter in (0, 1]")->capture_default_str();
    run_cmd->add_option("--delta", cfg.adapt.c_delta, "SUPG multiplier c: delta_K = c h_K")->capture_default_str();
    run_cmd->add_option("--recovery", recovery, "explicit | l2-rt0 | l2-bdm1 | hdiv | hdiv-rt0 | hdiv-bdm1")
        ->capture_default_str();
    run_cmd->add_option("--c-stab", cfg.adapt.c_stab, "Constant C in the H(div) stabilization weight")
        ->capture_default_str();
    run_cmd->add_option("--tol", cfg.adapt.tol, "Stop once eta <= tol")->capture_default_str();
    run_cmd->add_option("--max-iters", cfg.adapt.max_iterations, "Iteration budget")->capture_default_str();
    run_cmd->add_option("--max-elements", cfg.adapt.max_elements, "Element budget")->capture_default_str();
    run_cmd->add_option("--marking", marking, "minimal | cumulative")->capture_default_str();
    run_cmd->add_option("--refinement", refinement, "bisect | four-t")->capture_default_str();
    run_cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    run_cmd->add_option("--sweep-epsilon", cfg.sweep_epsilon, "Comma-separated epsilon values, one subdirectory each")
        ->delimiter(',');
    run_cmd->add_flag("--dump-meshes", cfg.dump_meshes, "Write mesh_NNN.txt per iteration");

    std::vector<std::string> histories;
    auto *report_cmd = app.add_subcommand("report", "Summarize history.csv files");
    report_cmd->add_option("histories", histories, "history.csv files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (*eps_opt) cfg.epsilon = epsilon;
            cfg.adapt.recovery = parse_recovery_kind(recovery);
            cfg.adapt.marking = parse_marking_rule(marking);
            cfg.adapt.refinement = parse_refine_rule(refinement);
            return run(cfg, std::cout);
        }
        print_report(histories, std::cout);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
