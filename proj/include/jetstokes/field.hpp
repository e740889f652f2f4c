#pragma once

#include <array>
#include <vector>

#include "jetstokes/domain.hpp"

namespace jetstokes {

/// One axial Fourier mode of a scalar function on the disk: azimuthal modes
/// m in [m_lo, m_hi], each stored as nodal values at the positive radial
/// collocation nodes. Row i of `data` holds mode m_lo + i.
struct DiskField {
    int m_lo = 0;
    Eigen::MatrixXcd data;

    DiskField() = default;
    DiskField(int lo, int hi, int n_r) : m_lo(lo), data(Eigen::MatrixXcd::Zero(hi - lo + 1, n_r)) {}

    int m_hi() const { return m_lo + static_cast<int>(data.rows()) - 1; }
    int n_r() const { return static_cast<int>(data.cols()); }
    bool has(int m) const { return m >= m_lo && m <= m_hi(); }
    auto row(int m) { return data.row(m - m_lo); }
    auto row(int m) const { return data.row(m - m_lo); }
    cplx operator()(int m, int j) const { return has(m) ? data(m - m_lo, j) : cplx{}; }
    cplx& at(int m, int j) { return data(m - m_lo, j); }

    /// Copy into a new mode range (zero padded, truncating outside).
    DiskField with_range(int lo, int hi) const;

    DiskField& operator+=(const DiskField& o);
    DiskField& operator-=(const DiskField& o);
    DiskField& operator*=(cplx s) {
        data *= s;
        return *this;
    }
};

DiskField operator+(DiskField a, const DiskField& b);
DiskField operator-(DiskField a, const DiskField& b);
DiskField operator*(cplx s, DiskField a);

/// Values on r = kappa for one axial mode, azimuthal modes [m_lo, m_hi].
struct TraceSlice {
    int m_lo = 0;
    Eigen::VectorXcd c;

    TraceSlice() = default;
    TraceSlice(int lo, int hi) : m_lo(lo), c(Eigen::VectorXcd::Zero(hi - lo + 1)) {}
    int m_hi() const { return m_lo + static_cast<int>(c.size()) - 1; }
    bool has(int m) const { return m >= m_lo && m <= m_hi(); }
    cplx operator()(int m) const { return has(m) ? c(m - m_lo) : cplx{}; }
    cplx& at(int m) { return c(m - m_lo); }
    TraceSlice with_range(int lo, int hi) const;
};

TraceSlice operator+(const TraceSlice& a, const TraceSlice& b);
TraceSlice operator-(const TraceSlice& a, const TraceSlice& b);
TraceSlice operator*(cplx s, TraceSlice a);
/// Multiplication by cos(theta) and sin(theta) (the in-plane normal).
TraceSlice times_cos(const TraceSlice& g);
TraceSlice times_sin(const TraceSlice& g);
double max_abs(const TraceSlice& g);

using VectorSlice = std::array<DiskField, 3>;

namespace disk {

/// Cartesian derivative building blocks on one axial slice.
DiskField raise(const Domain& d, const DiskField& f);  // d1 + i d2
DiskField lower(const Domain& d, const DiskField& f);  // d1 - i d2
DiskField d1(const Domain& d, const DiskField& f);
DiskField d2(const Domain& d, const DiskField& f);
/// Axial derivative: multiplication by i*beta_n.
DiskField d3(const Domain& d, int n, const DiskField& f);
DiskField partial(const Domain& d, int n, int axis, const DiskField& f);
/// Delta = d1^2 + d2^2 - beta_n^2, mode diagonal.
DiskField laplacian(const Domain& d, int n, const DiskField& f);

VectorSlice grad(const Domain& d, int n, const DiskField& f);
DiskField div(const Domain& d, int n, const VectorSlice& v);
VectorSlice laplacian(const Domain& d, int n, const VectorSlice& v);
/// E_ij = D_j v_i + D_i v_j, row-major 3x3.
std::array<DiskField, 9> sym_grad(const Domain& d, int n, const VectorSlice& v);

TraceSlice trace(const DiskField& f);

/// (f, g)_{L^2(D)} by Parseval in theta and Gauss quadrature in r.
cplx inner(const Domain& d, const DiskField& f, const DiskField& g);
cplx inner(const Domain& d, const VectorSlice& f, const VectorSlice& g);
double norm_sq(const Domain& d, const DiskField& f);
/// (f, g)_{H^k(D)}: sum over multi-indices |alpha| <= k of (D^alpha f, D^alpha g).
cplx inner_hk(const Domain& d, const DiskField& f, const DiskField& g, int k);
/// Boundary integral over the circle r = kappa of g * conj(h) (arclength).
cplx trace_inner(const Domain& d, const TraceSlice& g, const TraceSlice& h);

VectorSlice zero_vector(int lo, int hi, int n_r);
VectorSlice add(const VectorSlice& a, const VectorSlice& b);
VectorSlice sub(const VectorSlice& a, const VectorSlice& b);
VectorSlice scale(cplx s, const VectorSlice& a);

}  // namespace disk

inline constexpr int kMaxSobolevOrder = 4;

struct SobolevIndex {
    int k = 0;
    explicit SobolevIndex(int order);
};

/// Nodal values on the physical grid (z_k, theta_t, r_j), z-major then theta then r.
struct NodalGrid {
    int nz = 0, ntheta = 0, nr = 0;
    std::vector<cplx> values;
    cplx& operator()(int k, int t, int j) { return values[(static_cast<size_t>(k) * ntheta + t) * nr + j]; }
    cplx operator()(int k, int t, int j) const { return values[(static_cast<size_t>(k) * ntheta + t) * nr + j]; }
};

/// A scalar function on Omega: axial Fourier modes n in [-n_z, n_z], each a DiskField.
class ScalarField {
  public:
    ScalarField() = default;
    /// Zero field with azimuthal range [-n_theta, n_theta].
    explicit ScalarField(DomainPtr domain, bool real = true);
    ScalarField(DomainPtr domain, int m_lo, int m_hi, bool real = true);

    const DomainPtr& domain() const { return domain_; }
    int n_z() const { return domain_->config().n_z; }
    DiskField& slice(int n) { return slices_.at(n + n_z()); }
    const DiskField& slice(int n) const { return slices_.at(n + n_z()); }
    bool real_flag() const { return real_; }
    void set_real_flag(bool r) { real_ = r; }
    int band() const;  // max |m| held by any slice

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(cplx s);

    /// Largest violation of coeffs[-n][-m] == conj(coeffs[n][m]).
    double conjugate_symmetry_defect() const;
    double max_abs() const;

  private:
    DomainPtr domain_;
    std::vector<DiskField> slices_;
    bool real_ = true;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx s, ScalarField a);

struct VectorField {
    std::array<ScalarField, 3> c;

    VectorField() = default;
    explicit VectorField(DomainPtr domain, bool real = true)
        : c{ScalarField(domain, real), ScalarField(domain, real), ScalarField(domain, real)} {}
    VectorField(ScalarField a, ScalarField b, ScalarField d) : c{std::move(a), std::move(b), std::move(d)} {}

    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }
    const DomainPtr& domain() const { return c[0].domain(); }
    VectorSlice slice(int n) const { return {c[0].slice(n), c[1].slice(n), c[2].slice(n)}; }
    void set_slice(int n, const VectorSlice& s) {
        for (int i = 0; i < 3; ++i) c[i].slice(n) = s[i];
    }
    bool real_flag() const { return c[0].real_flag() && c[1].real_flag() && c[2].real_flag(); }
    double max_abs() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(cplx s, const VectorField& a);

/// Functions on the free surface S_F, one TraceSlice per axial mode.
class TraceField {
  public:
    TraceField() = default;
    explicit TraceField(DomainPtr domain);
    const DomainPtr& domain() const { return domain_; }
    TraceSlice& slice(int n) { return slices_.at(n + domain_->config().n_z); }
    const TraceSlice& slice(int n) const { return slices_.at(n + domain_->config().n_z); }
    double max_abs() const;

  private:
    DomainPtr domain_;
    std::vector<TraceSlice> slices_;
};

TraceField operator-(const TraceField& a, const TraceField& b);

/// Transforms between the physical grid and coefficient space.
ScalarField analyze(const DomainPtr& domain, const NodalGrid& grid);
/// The azimuthal grid resolves modes up to max(band, field.band()).
NodalGrid synthesize(const ScalarField& f, int band = -1);

ScalarField grad_component(const ScalarField& f, int axis);
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
std::array<ScalarField, 9> sym_grad(const VectorField& v);

cplx inner_product_Hkp(const ScalarField& u, const ScalarField& v, SobolevIndex k);
cplx inner_product_Hkp(const VectorField& u, const VectorField& v, SobolevIndex k);
double norm_Hkp(const ScalarField& u, SobolevIndex k);
double norm_Hkp(const VectorField& u, SobolevIndex k);
/// L^2(Omega) helpers (equal to the k = 0 periodic inner product).
cplx inner_l2(const ScalarField& u, const ScalarField& v);
cplx inner_l2(const VectorField& u, const VectorField& v);
double norm_l2(const ScalarField& u);
double norm_l2(const VectorField& u);

TraceField trace_SF(const ScalarField& f);
/// Mismatch of D_3^j f between the faces z = 0 and z = ell for j < order,
/// evaluated on the radial/azimuthal grid. Zero by construction here.
double periodicity_defect(const ScalarField& f, int order);

/// L^2(S_F) inner product (integral over theta and z with arclength kappa).
cplx inner_trace(const TraceField& g, const TraceField& h);
double norm_trace(const TraceField& g);

}  // namespace jetstokes
