#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jetstokes/harness.hpp"

using namespace jetstokes;

int main(int argc, char** argv) {
    CLI::App app{"jetstokes: modified Stokes operator on a periodic cylinder"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve-mode", "solve one axial mode of the Dirichlet problem"},
        {"project", "apply the Helmholtz projection"},
        {"spectrum", "eigenvalues of the operator blocks"},
        {"resolvent-sweep", "resolvent gains along a lambda grid"},
        {"evolve", "time integration with energy trace and estimate"},
        {"verify-all", "full acceptance suite"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "seed for randomized checks");
        sub->add_option("--out", out_dir, "output directory");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string cmd = app.get_subcommands().front()->get_name();
    const Progress log = [](const std::string& msg) { std::cerr << msg << '\n'; };
    try {
        RunConfig cfg = config_path.empty() ? parse_run_config(nlohmann::json::object()) : load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (cmd == "solve-mode") return cmd_solve_mode(cfg, log);
        if (cmd == "project") return cmd_project(cfg, log);
        if (cmd == "spectrum") return cmd_spectrum(cfg, log);
        if (cmd == "resolvent-sweep") return cmd_resolvent_sweep(cfg, log);
        if (cmd == "evolve") return cmd_evolve(cfg, log);
        return cmd_verify_all(cfg, log);
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "] " << cmd << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [harness] " << cmd << ": " << e.what() << '\n';
        return 2;
    }
}
