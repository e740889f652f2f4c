#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jetstokes/domain.hpp"
#include "jetstokes/evolution.hpp"

namespace jetstokes {

struct SolveModeConfig {
    int n = 1;
    std::string source = "constant";  // "constant": f = value at m = 0; "file": ScalarField FieldFile
    double value = 1.0;
    std::string input;
    double tolerance = 1e-10;
};

struct ProjectConfig {
    std::string input;  // VectorField FieldFile; empty draws a seeded random field
    int n_max = 2;
    int band = 3;
    int degree = 10;
};

struct SpectrumConfig {
    int n_min = 0;
    int n_max = 8;
    int count = 20;
    double sector_tolerance = 1e-8;
    double kernel_tolerance = 1e-10;
    bool export_matrices = false;
};

struct SweepConfig {
    std::vector<cplx> grid{{0, 1}, {0, 2}, {0, 4}, {0, 8}, {-1, 2}, {-2, 4}};
    double epsilon = 0.5;
    int samples = 10;
    double tolerance = 1e-8;
};

struct EvolveConfig {
    std::string scheme = "crank-nicolson";
    double dt = 0.01;
    double t_final = 1.0;
    int snapshot_stride = 0;
    std::string forcing = "smooth";  // "smooth" or "zero"
    std::string profile = "saturating";  // 1 - exp(-t); "pulse": t exp(-t)
    double amplitude = 1.0;
};

struct VerifyConfig {
    std::vector<int> convergence_n_r{4, 8, 16, 32, 64};
    double mode_solve_tolerance = 1e-8;
    double convergence_factor = 10.0;
    double plateau = 1e-12;
    int projector_samples = 50;
    int potential_samples = 20;
    double projector_tolerance = 1e-10;
    double kernel_tolerance = 1e-10;
    int kernel_refined_n_r = 48;
    int sector_n_max = 8;
    int sector_count = 20;
    double sector_tolerance = 1e-8;
    int resolvent_samples = 10;
    double resolvent_tolerance = 1e-8;
    double defect_tolerance = 1e-8;
    int contraction_runs = 20;
    int contraction_steps = 100;
    double contraction_dt = 0.01;
    double contraction_tolerance = 1e-12;
    double constant_tolerance = 1e-12;
    double energy_tolerance = 1e-8;
    double estimate_T_factor = 2.0;
    double estimate_T_ratio = 2.0;
    double estimate_dt_change = 0.1;
    bool determinism_rerun = true;
};

struct RunConfig {
    DomainConfig domain;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    SolveModeConfig solve_mode;
    ProjectConfig project;
    SpectrumConfig spectrum;
    SweepConfig sweep;
    EvolveConfig evolve;
    VerifyConfig verify;
};

/// Every object in the file is checked against its known keys; anything
/// unknown, mistyped or out of range raises Error("harness", ...).
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Manufactured forcing for evolve / verify-all: smooth, axial modes +-1
/// only (so orthogonal to the kernel), zero at t = 0.
Forcing manufactured_forcing(const DomainPtr& d, const EvolveConfig& cfg);

using Progress = std::function<void(const std::string&)>;

/// Drivers. Each writes its outputs under cfg.output_dir and returns the
/// process exit code.
int cmd_solve_mode(const RunConfig& cfg, const Progress& log = {});
int cmd_project(const RunConfig& cfg, const Progress& log = {});
int cmd_spectrum(const RunConfig& cfg, const Progress& log = {});
int cmd_resolvent_sweep(const RunConfig& cfg, const Progress& log = {});
int cmd_evolve(const RunConfig& cfg, const Progress& log = {});
int cmd_verify_all(const RunConfig& cfg, const Progress& log = {});

/// The acceptance suite: {criterion: {pass, measured, target, tolerance}}.
nlohmann::ordered_json verify_all(const RunConfig& cfg, const Progress& log = {});
bool report_passed(const nlohmann::ordered_json& report);

}  // namespace jetstokes
