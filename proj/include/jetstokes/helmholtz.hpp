#pragma once

#include <cstdint>

#include "jetstokes/field.hpp"

namespace jetstokes {

/// u = solenoidal + grad(potential), potential = 0 on S_F.
struct DecompositionResult {
    VectorField solenoidal;
    ScalarField potential;
    /// ||div(solenoidal)||_{L^2} / ||u||_{H^1_p}; zero for u = 0.
    double residual = 0.0;
};

/// Orthogonal projection onto divergence-free periodic fields. The
/// complement is {grad q : q = 0 on S_F}, so q solves Delta q = div u with
/// a homogeneous Dirichlet condition on the free surface.
DecompositionResult project_P(const VectorField& u);

/// Slice version; `potential` (optional) receives q for this axial mode.
VectorSlice project_P(const Domain& d, int n, const VectorSlice& u, DiskField* potential = nullptr);

/// Largest ||P u||_{H^k_p} / ||u||_{H^k_p} over random smooth real fields.
/// Supports k in {0, 1, 2}.
double projector_norm_Hk(const DomainPtr& d, SobolevIndex k, int sample_count, std::uint64_t seed = 0);

/// Boundary datum of the pressure operator on r = kappa for one axial mode:
/// 2 mu sum_{i,j<=2} n_i n_j D_j v_i.
TraceSlice normal_stress_datum(const Domain& d, const VectorSlice& v);

/// Q v: the harmonic function (Delta - beta_n^2 = 0 per mode) whose trace on
/// S_F is the datum above.
DiskField operator_Q(const Domain& d, int n, const VectorSlice& v);
ScalarField operator_Q(const VectorField& v);

}  // namespace jetstokes
