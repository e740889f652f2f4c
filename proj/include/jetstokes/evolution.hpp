#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jetstokes/stokesop.hpp"

namespace jetstokes {

enum class Scheme { ImplicitEuler, CrankNicolson };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme s);

using Forcing = std::function<VectorField(double)>;

struct EvolutionConfig {
    double t_final = 1.0;
    double dt = 0.01;
    Scheme scheme = Scheme::CrankNicolson;
    Forcing forcing;                                  // empty = homogeneous
    std::optional<StokesOperator::State> initial;     // homogeneous diagnostics only; default 0
    int snapshot_stride = 0;                          // 0 = no snapshots
    bool keep_states = false;                         // store every step (needed by estimate_report)
    double forcing_tolerance = 1e-10;
    bool weak = true;                                 // step with the Galerkin matrix G instead of the strong A
};

struct EnergyRow {
    double t = 0.0;
    double l2_norm_sq = 0.0;
    double dissipation = 0.0;
    double residual = 0.0;  // energy identity residual of the step ending at t, relative to its scale
};

struct EnergyTrace {
    std::vector<EnergyRow> rows;
    double max_algebraic_residual = 0.0;
    std::vector<std::string> warnings;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StokesOperator::State> states;                           // filled if keep_states
    std::vector<std::pair<double, StokesOperator::State>> snapshots;    // every snapshot_stride steps
    EnergyTrace energy;
};

/// v' + A v = P f, one coefficient state per axial mode. Each step solves
/// (I + dt A) (implicit Euler) or (I + dt/2 A) (Crank-Nicolson) per block,
/// through the factored G (weak) or a cached LU of the strong A. Pf is the
/// L^2 projection onto the constrained space.
Trajectory evolve(const StokesOperator& op, const EvolutionConfig& cfg);

/// q = Q v + phi with Laplace(phi) = div f, phi = 0 on S_F.
ScalarField recover_pressure(const VectorField& v, const VectorField& f);

struct EstimateReport {
    double ratio = 0.0;
    double T = 0.0;
    double dt = 0.0;
    // H^2 in space / L^2 in time, L^2 of time differences, grad q, q on S_F, f
    double v_h2 = 0.0;
    double v_dt = 0.0;
    double grad_q = 0.0;
    double q_trace = 0.0;
    double f_norm = 0.0;
};

/// Surrogate ratio (||v||_K + ||grad q||_{L2L2} + ||q|S_F||_{L2L2}) / ||f||_{L2L2},
/// where ||v||_K = ||v||_{L2 H2} + ||dv/dt||_{L2L2} by backward differences.
/// Needs a trajectory run with keep_states; time integrals use the right
/// endpoint rule over the steps.
EstimateReport estimate_report(const StokesOperator& op, const Trajectory& traj, const Forcing& f, double dt);

void write_energy_csv(const std::filesystem::path& path, const EnergyTrace& trace);
void write_estimate_json(const std::filesystem::path& path, const EstimateReport& rep);

}  // namespace jetstokes
