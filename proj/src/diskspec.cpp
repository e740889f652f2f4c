#include "jetstokes/diskspec.hpp"

#include <cmath>

#include "jetstokes/random.hpp"

namespace jetstokes {

namespace {

Eigen::VectorXcd lu_solve(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, const Eigen::VectorXcd& rhs) {
    Eigen::VectorXd re = lu.solve(rhs.real());
    Eigen::VectorXd im = lu.solve(rhs.imag());
    Eigen::VectorXcd out(rhs.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

void require_finite(const DiskField& u, const char* what) {
    if (!u.data.allFinite()) throw Error("diskspec", std::string(what) + " produced non-finite values");
}

}  // namespace

DiskField solve_mode_dirichlet(const Domain& d, int n, const DiskField& f) {
    if (f.n_r() != d.n_r()) throw Error("diskspec", "right-hand side radial size mismatch");
    DiskField u(f.m_lo, f.m_hi(), d.n_r());
    for (int m = f.m_lo; m <= f.m_hi(); ++m) {
        Eigen::VectorXcd rhs = -f.row(m).transpose();
        rhs(0) = 0.0;
        u.row(m) = lu_solve(d.dirichlet_lu(n, m), rhs).transpose();
    }
    require_finite(u, "dirichlet solve");
    return u;
}

ScalarField solve_dirichlet(const ScalarField& f) {
    const auto& d = f.domain();
    ScalarField u = f;
    for (int n = -f.n_z(); n <= f.n_z(); ++n) u.slice(n) = solve_mode_dirichlet(*d, n, f.slice(n));
    return u;
}

DirichletResidual dirichlet_residual(const Domain& d, int n, const DiskField& u, const DiskField& f) {
    DiskField lu = disk::laplacian(d, n, u) - f;
    DirichletResidual out;
    double num = 0.0, den = 0.0;
    for (int m = lu.m_lo; m <= lu.m_hi(); ++m)
        for (int j = 1; j < d.n_r(); ++j) {
            num += std::norm(lu(m, j));
            den += std::norm(f(m, j));
        }
    out.interior = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    for (int m = u.m_lo; m <= u.m_hi(); ++m) out.boundary = std::max(out.boundary, std::abs(u(m, 0)));
    return out;
}

DiskField harmonic_extension(const Domain& d, int n, const TraceSlice& g) {
    DiskField u(g.m_lo, g.m_hi(), d.n_r());
    for (int m = g.m_lo; m <= g.m_hi(); ++m) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d.n_r());
        rhs(0) = g(m);
        u.row(m) = lu_solve(d.dirichlet_lu(n, m), rhs).transpose();
    }
    require_finite(u, "harmonic extension");
    return u;
}

ScalarField harmonic_extension(const TraceField& g) {
    const auto& d = g.domain();
    const int nz = d->config().n_z;
    int lo = 0, hi = 0;
    for (int n = -nz; n <= nz; ++n) {
        lo = std::min(lo, g.slice(n).m_lo);
        hi = std::max(hi, g.slice(n).m_hi());
    }
    ScalarField u(d, lo, hi, false);
    for (int n = -nz; n <= nz; ++n) u.slice(n) = harmonic_extension(*d, n, g.slice(n)).with_range(lo, hi);
    return u;
}

double mode_norm_sq_Hkp(const Domain& d, int n, const DiskField& u, int k) {
    SobolevIndex idx(k);
    const double b2 = d.beta(n) * d.beta(n);
    double sum = 0.0, bp = 1.0;
    for (int j = 0; j <= idx.k; ++j) {
        sum += bp * disk::inner_hk(d, u, u, idx.k - j).real();
        bp *= b2;
    }
    return d.ell() * sum;
}

double stability_constant(const Domain& d, int n, int sample_count, std::uint64_t seed) {
    if (sample_count < 1) throw Error("diskspec", "stability_constant needs at least one sample");
    const int band = d.config().n_theta;
    CounterRng rng(seed, 0x5d15c0ULL + static_cast<std::uint64_t>(n + 1000));
    double worst = 0.0;
    for (int s = 0; s < sample_count; ++s) {
        const DiskField f = random_regular_slice(d, rng, -band, band, d.n_r());
        const DiskField u = solve_mode_dirichlet(d, n, f);
        const double fn = std::sqrt(d.ell() * disk::norm_sq(d, f));
        worst = std::max(worst, std::sqrt(mode_norm_sq_Hkp(d, n, u, 2)) / fn);
    }
    return worst;
}

}  // namespace jetstokes
