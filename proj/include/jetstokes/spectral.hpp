#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jetstokes/random.hpp"
#include "jetstokes/stokesop.hpp"

namespace jetstokes {

struct SpectralEntry {
    int n = 0;
    cplx lambda;
    double residual = 0.0;  // ||A c - lambda c|| / ||c|| in coefficient space (= L^2 norm)
    bool in_sector = false;
};

struct SpectralReport {
    std::vector<SpectralEntry> entries;
    int kernel_dim = -1;
    double tolerance = 1e-8;
};

/// Eigenpairs of the strongly assembled A_block (general complex solver, so
/// any non-Hermitian defect shows up in Im lambda). Sorted by real part;
/// count <= 0 keeps all.
std::vector<SpectralEntry> eigensolve(const ModeOperator& op, int count, double tolerance = 1e-8);

/// Largest |lambda| of A_block (its spectral norm for the Hermitian part).
double operator_norm(const ModeOperator& op);

/// Number of eigenvalues with |lambda| < tol * ||A_block||.
int kernel_dimension(const ModeOperator& op, double tol);

/// Rayleigh quotients of the rigid motions e1, e2, e3 and (-a2, a1, 0) on the
/// n = 0 block, relative to ||A_block||, with their span-membership ratios.
struct KernelReport {
    int dimension = 0;
    double a_norm = 0.0;
    std::array<std::string, 4> names{"e1", "e2", "e3", "rotation"};
    std::array<double, 4> rayleigh{};
    std::array<double, 4> membership{};
};
KernelReport analyze_kernel(const ModeOperator& op0, double tol);

/// Galerkin resolvent (G - lambda I) c = g per block via the factored
/// eigendecomposition of G held by each block.
struct ResolveResult {
    StokesOperator::State v;
    double residual = 0.0;   // max relative weak-equation residual
    double condition = 0.0;  // largest block condition number
    bool ill_conditioned = false;
};

class Resolvent {
  public:
    explicit Resolvent(const StokesOperator& op);
    ResolveResult solve(cplx lambda, const StokesOperator::State& g) const;
    VectorField solve(cplx lambda, const VectorField& g) const;
    const StokesOperator& op() const { return op_; }

  private:
    struct BlockEig {
        Eigen::VectorXd values;
        Eigen::MatrixXcd vectors;
    };
    const StokesOperator& op_;
    std::vector<std::vector<BlockEig>> eig_;  // [mode][block]
};

struct ResolventSample {
    cplx lambda;
    double l2_gain = 0.0;
    double l2_bound = 0.0;
    double hk_gain = 0.0;
    bool bound_ok = false;
};

struct SweepResult {
    std::vector<ResolventSample> samples;
    /// Least-squares slope of log hk_gain against log |lambda| per ray of
    /// equal arg(lambda); the largest over rays with >= 2 points (NaN if none).
    double growth_exponent = 0.0;
};

/// Random g are drawn in the constrained space (so g lies in P^0) with
/// `samples` draws per lambda. Throws on an empty grid or |lambda| < eps.
SweepResult resolvent_sweep(const Resolvent& res, const std::vector<cplx>& grid, double eps, int samples,
                            std::uint64_t seed, double tolerance = 1e-8);

/// Random unit-norm state with all axial modes populated (real structure not imposed).
StokesOperator::State random_state(const StokesOperator& op, CounterRng& rng);

void write_eigenvalues_csv(const std::filesystem::path& path, const std::vector<SpectralEntry>& entries);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<ResolventSample>& samples);

}  // namespace jetstokes
