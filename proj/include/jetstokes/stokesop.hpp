#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "jetstokes/field.hpp"

namespace jetstokes {

/// Traction S(v, q)_i = q n_i - mu sum_j (D_j v_i + D_i v_j) n_j on S_F.
struct Traction {
    std::array<TraceField, 3> c;
    double max_abs() const;
};

std::array<TraceSlice, 3> traction(const Domain& d, int n, const VectorSlice& v, const DiskField& q);
/// S_tan = S - (S.n) n; independent of q.
std::array<TraceSlice, 3> tangential_traction(const Domain& d, int n, const VectorSlice& v);
Traction traction(const VectorField& v, const ScalarField& q);
Traction tangential_traction(const VectorField& v);

/// A v = -mu P Delta v + grad Q v, slice by slice. Preserves the axial band.
VectorSlice apply_A(const Domain& d, int n, const VectorSlice& v);
VectorField apply_A(const VectorField& v);

/// <v, u> = -lambda (v, u) + (mu/2) sum_ij (E_ij v, E_ij u), E_ij = D_j v_i + D_i v_j.
cplx form_value(const VectorField& v, const VectorField& u, cplx lambda);

/// One azimuthal block of an axial mode. Unknowns are v+ = v1 + i v2 at
/// azimuthal mode M+1, v- = v1 - i v2 at M-1 and v3 at M; each is a sum of
/// disk-orthonormal Zernike functions scaled to unit L^2(Omega) norm, so the
/// raw mass matrix is the identity. `basis` is an orthonormal nullspace of
/// the stacked constraints (nodal divergence, tangential traction traces).
struct BlockSpace {
    int M = 0;
    std::array<int, 3> mode{};
    std::array<int, 3> count{};
    std::array<int, 3> offset{};
    int raw_size = 0;
    Eigen::MatrixXd raw_nodal;    // 3 n_r x raw_size; stacked (v+, v-, v3)
    Eigen::MatrixXd raw_weights;  // raw_size x 3 n_r; raw L^2 inner products
    Eigen::MatrixXcd basis;       // raw_size x dim
    Eigen::VectorXd singular_values;
    Eigen::MatrixXcd A;           // strong assembly (A b_j, b_i)
    Eigen::MatrixXcd G;           // weak assembly of the form at lambda = 0
    // G = G_vectors diag(G_values) G_vectors^H from an SVD of the weighted
    // symmetric-gradient factor; small eigenvalues keep full accuracy
    Eigen::VectorXd G_values;
    Eigen::MatrixXcd G_vectors;
    double constraint_residual = 0.0;

    int dim() const { return static_cast<int>(basis.cols()); }
};

/// The modified Stokes operator restricted to one axial mode n.
class ModeOperator {
  public:
    ModeOperator(DomainPtr domain, int n, double null_tol = 1e-9);

    int n() const { return n_; }
    const DomainPtr& domain() const { return domain_; }
    const std::vector<BlockSpace>& blocks() const { return blocks_; }
    int dim() const { return dim_; }
    int offset(size_t b) const { return offsets_[b]; }

    /// Block-diagonal matrices over all azimuthal blocks.
    Eigen::MatrixXcd A_block() const;
    Eigen::MatrixXcd G_block() const;
    Eigen::MatrixXcd M_block() const { return Eigen::MatrixXcd::Identity(dim_, dim_); }
    Eigen::MatrixXcd form_block(cplx lambda) const;

    /// ||A - G||_F / ||G||_F and the largest columnwise constraint residual.
    double strong_weak_defect() const;
    double constraint_residual() const;

    /// L^2-orthogonal projection of a slice onto the constrained space, as
    /// coefficients; and the inverse map.
    Eigen::VectorXcd coordinates(const VectorSlice& v) const;
    VectorSlice field(const Eigen::VectorXcd& c) const;
    VectorSlice block_field(size_t b, const Eigen::VectorXcd& cb) const;

    /// Coefficient-space operator applications.
    Eigen::VectorXcd apply_A(const Eigen::VectorXcd& c) const;
    Eigen::VectorXcd apply_G(const Eigen::VectorXcd& c) const;

    /// ||field(c)||^2 in H^k_p as c^H K c with a per-block Gram matrix K.
    double norm_sq_Hkp(const Eigen::VectorXcd& c, int k) const;
    const Eigen::MatrixXcd& hk_gram(size_t b, int k) const;

  private:
    DomainPtr domain_;
    int n_;
    std::vector<BlockSpace> blocks_;
    std::vector<int> offsets_;
    int dim_ = 0;
    mutable std::mutex gram_mutex_;
    mutable std::map<std::pair<size_t, int>, Eigen::MatrixXcd> gram_cache_;
};

/// All axial modes of the discrete operator. Coefficient states are one
/// vector per axial mode, n = -n_z .. n_z.
class StokesOperator {
  public:
    explicit StokesOperator(DomainPtr domain, double null_tol = 1e-9);

    const DomainPtr& domain() const { return domain_; }
    const ModeOperator& mode(int n) const { return *modes_.at(n + domain_->config().n_z); }
    int n_z() const { return domain_->config().n_z; }

    using State = std::vector<Eigen::VectorXcd>;
    State coordinates(const VectorField& v) const;
    VectorField field(const State& s) const;
    State zero_state() const;

  private:
    DomainPtr domain_;
    std::vector<std::unique_ptr<ModeOperator>> modes_;
};

double state_norm_sq(const StokesOperator::State& s);
cplx state_inner(const StokesOperator::State& a, const StokesOperator::State& b);

/// Block matrix export (A, G) for one axial mode as matrix files.
void export_mode_operator(const ModeOperator& op, const std::filesystem::path& dir);

}  // namespace jetstokes
