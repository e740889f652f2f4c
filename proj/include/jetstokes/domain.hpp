#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace jetstokes {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Failure raised by the library. `module` names the component that
/// detected the problem so drivers can report it.
class Error : public std::runtime_error {
  public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}
    const std::string& module() const noexcept { return module_; }

  private:
    std::string module_;
};

/// Geometry, physics and resolution of the periodic cylinder
/// Omega = {a1^2 + a2^2 < kappa^2} x (0, ell).
struct DomainConfig {
    double kappa = 0.5;
    double ell = 2.0 * kPi;
    double mu = 1.0;
    int n_r = 32;      // positive radial collocation nodes
    int n_theta = 8;   // azimuthal modes m in [-n_theta, n_theta]
    int n_z = 8;       // axial modes n in [-n_z, n_z]
    int quad_order = 0;  // Gauss points in r; 0 selects 2 * n_r

    void validate() const;
    int quadrature_points() const { return quad_order > 0 ? quad_order : 2 * n_r; }
    /// Axial wavenumber 2*pi*n/ell.
    double beta(int n) const { return 2.0 * kPi * n / ell; }
};

bool operator==(const DomainConfig& a, const DomainConfig& b);

/// Precomputed radial machinery shared by every field on one domain.
///
/// The radial direction uses Chebyshev points of the second kind on the
/// full diameter [-kappa, kappa] with an even point count 2*n_r, so that
/// no node sits on the axis. A mode-m coefficient function has parity
/// (-1)^m under r -> -r; only the n_r positive nodes are stored and the
/// reflected half is folded into the matrices below. Node 0 is r = kappa.
class Domain {
  public:
    explicit Domain(const DomainConfig& cfg);

    static std::shared_ptr<const Domain> make(const DomainConfig& cfg) {
        return std::make_shared<const Domain>(cfg);
    }

    const DomainConfig& config() const { return cfg_; }
    int n_r() const { return cfg_.n_r; }
    double kappa() const { return cfg_.kappa; }
    double ell() const { return cfg_.ell; }
    double mu() const { return cfg_.mu; }
    double beta(int n) const { return cfg_.beta(n); }

    const Eigen::VectorXd& nodes() const { return r_; }
    const Eigen::VectorXd& inv_nodes() const { return inv_r_; }

    /// d/dr acting on nodal values of parity `parity` (+1 or -1).
    const Eigen::MatrixXd& diff(int parity) const { return parity > 0 ? d_even_ : d_odd_; }

    /// Interpolation from nodal values to the Gauss points.
    const Eigen::MatrixXd& to_quad(int parity) const { return parity > 0 ? e_even_ : e_odd_; }
    const Eigen::VectorXd& quad_nodes() const { return rq_; }
    /// Gauss weights for integral_0^kappa g(r) r dr (the factor r is included).
    const Eigen::VectorXd& quad_weights() const { return wq_; }

    /// Evaluate the interpolant of mode-parity nodal values at an arbitrary radius.
    Eigen::RowVectorXd interpolation_row(double r, int parity) const;

    /// Cartesian derivative pieces. For f_m(r) e^{i m theta}:
    ///   (d1 + i d2) -> (f' - m f / r) e^{i(m+1)theta}
    ///   (d1 - i d2) -> (f' + m f / r) e^{i(m-1)theta}
    Eigen::MatrixXd raise_matrix(int m) const;
    Eigen::MatrixXd lower_matrix(int m) const;

    /// Disk Laplacian for mode m, assembled as (d1^2 + d2^2) from the raise
    /// and lower matrices so that div(grad) and laplacian coincide exactly.
    const Eigen::MatrixXd& laplacian_matrix(int m) const;

    /// Factorized Dirichlet operator for -Delta + beta_n^2 at (|n|, |m|):
    /// row 0 (r = kappa) is replaced by the identity row.
    const Eigen::PartialPivLU<Eigen::MatrixXd>& dirichlet_lu(int n, int m) const;

    /// Raw Dirichlet matrix (before factorization), exposed for diagnostics.
    Eigen::MatrixXd dirichlet_matrix(int n, int m) const;

  private:
    DomainConfig cfg_;
    Eigen::VectorXd r_, inv_r_;
    Eigen::MatrixXd d_even_, d_odd_;
    Eigen::MatrixXd e_even_, e_odd_;
    Eigen::VectorXd rq_, wq_;
    Eigen::VectorXd xfull_, bary_;

    mutable std::mutex cache_mutex_;
    mutable std::map<int, std::unique_ptr<Eigen::MatrixXd>> lap_cache_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>>>
        lu_cache_;
};

using DomainPtr = std::shared_ptr<const Domain>;

inline int parity_of(int m) { return (m % 2 == 0) ? 1 : -1; }

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, Eigen::VectorXd& x, Eigen::VectorXd& w);

}  // namespace jetstokes
