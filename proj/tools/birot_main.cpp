#include <iostream>

#include "CLI11.hpp"
#include "birot/scenario.hpp"
#include "birot/transport.hpp"
#include "birot/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"birot: swirl-free bi-rotational Euler simulator on the quadrant"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "integrate a scenario config");
    run_cmd->add_option("config", config_path, "scenario config file")->required();

    std::string suite{"all"};
    std::string verify_out{"verify_out"};
    auto* verify_cmd = app.add_subcommand("verify", "run an acceptance suite");
    verify_cmd->add_option("suite", suite,
                           "kernel|lorentz|routes|conservation|estimates|all");
    verify_cmd->add_option("--out", verify_out, "artifact directory");

    std::string checkpoint_path;
    double probe_r = 0.0, probe_s = 0.0;
    auto* probe_cmd = app.add_subcommand("probe", "velocity at a point from a checkpoint");
    probe_cmd->add_option("checkpoint", checkpoint_path)->required();
    probe_cmd->add_option("r", probe_r)->required();
    probe_cmd->add_option("s", probe_s)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const birot::ScenarioConfig cfg = birot::load_config(config_path);
            const birot::RunResult res = birot::run(cfg);
            if (res.exit_code == birot::exit_ok) {
                std::cout << "completed t=" << res.final_time << " with "
                          << res.n_particles << " particles; diagnostics in "
                          << cfg.output_dir << "/diagnostics.csv\n";
                if (res.unreliable)
                    std::cout << "warning: more than 0.1% of particle-steps were "
                                 "clipped at the axes; run marked unreliable\n";
            } else {
                std::cerr << "run failed: " << res.error << " (exit "
                          << res.exit_code << ")\n";
            }
            return res.exit_code;
        }
        if (*verify_cmd) return birot::verify_main(suite, std::cout, verify_out);
        if (*probe_cmd) {
            const birot::SimState state = birot::read_checkpoint(checkpoint_path);
            const birot::QuadrantPoint at{probe_r, probe_s};
            const auto v = birot::ensemble_velocity(state.particles, {&at, 1}, {});
            char buf[128];
            std::snprintf(buf, sizeof buf, "u_r = %.17g\nu_s = %.17g\n", v[0].u_r,
                          v[0].u_s);
            std::cout << buf;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return birot::exit_config_error;
    }
    return 0;
}
