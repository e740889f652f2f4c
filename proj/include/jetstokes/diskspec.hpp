#pragma once

#include <cstdint>

#include "jetstokes/field.hpp"

namespace jetstokes {

/// Axial/azimuthal mode pair with its axial wavenumber.
struct ModeIndex {
    int n = 0;
    int m = 0;
    double beta(const Domain& d) const { return d.beta(n); }
};

/// Solves Delta u = f on one axial mode n with u = 0 on r = kappa, i.e.
/// L_n u = -f with L_n = -Delta_D + beta_n^2. Each azimuthal mode is an
/// independent dense collocation solve on the reflected radial grid.
DiskField solve_mode_dirichlet(const Domain& d, int n, const DiskField& f);
ScalarField solve_dirichlet(const ScalarField& f);

/// Relative interior residual ||(Delta_D - beta^2) u - f|| / ||f|| at the
/// collocation nodes, plus the boundary value max |u(kappa)|.
struct DirichletResidual {
    double interior = 0.0;
    double boundary = 0.0;
};
DirichletResidual dirichlet_residual(const Domain& d, int n, const DiskField& u, const DiskField& f);

/// Harmonic (Delta - beta_n^2 = 0) extension of boundary data on r = kappa.
DiskField harmonic_extension(const Domain& d, int n, const TraceSlice& g);
ScalarField harmonic_extension(const TraceField& g);

/// Largest observed ||u||_{H^2_p} / ||f||_{L^2} over `sample_count` random
/// smooth right-hand sides on axial mode n (u = solve_mode_dirichlet(f)).
/// Throws when sample_count < 1.
double stability_constant(const Domain& d, int n, int sample_count, std::uint64_t seed = 0);

/// ||u e^{i beta_n z}||^2 in H^k_p for a single axial mode.
double mode_norm_sq_Hkp(const Domain& d, int n, const DiskField& u, int k);

}  // namespace jetstokes
