#include "jetstokes/random.hpp"

#include <cmath>
#include <cstdlib>

namespace jetstokes {

double CounterRng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double zernike_radial(int m, int k, double r, double kappa) {
    const int am = std::abs(m);
    const double rho = r / kappa;
    const double x = 2.0 * rho * rho - 1.0;
    const double b = am;
    // Jacobi P_k^{(0, |m|)}(x)
    double p0 = 1.0, p1 = 1.0 + (b + 2.0) * (x - 1.0) / 2.0;
    double pk = (k == 0) ? p0 : p1;
    for (int j = 2; j <= k; ++j) {
        const double s = 2.0 * j + b;
        const double a1 = 2.0 * j * (j + b) * (s - 2.0);
        const double a2 = (s - 1.0) * (s * (s - 2.0) * x - b * b);
        const double a3 = 2.0 * (j - 1.0) * (j + b - 1.0) * s;
        pk = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = pk;
    }
    const double norm = std::sqrt((2.0 * k + am + 1.0) / (kPi * kappa * kappa));
    return norm * std::pow(rho, am) * pk;
}

Eigen::VectorXd zernike_nodal(const Domain& d, int m, int k) {
    Eigen::VectorXd out(d.n_r());
    for (int j = 0; j < d.n_r(); ++j) out(j) = zernike_radial(m, k, d.nodes()(j), d.kappa());
    return out;
}

DiskField random_regular_slice(const Domain& d, CounterRng& rng, int m_lo, int m_hi, int degree) {
    DiskField out(m_lo, m_hi, d.n_r());
    for (int m = m_lo; m <= m_hi; ++m)
        for (int k = 0; k < regular_count(m, degree); ++k) out.row(m) += rng.complex_normal() * zernike_nodal(d, m, k).transpose();
    return out;
}

ScalarField random_regular_field(const DomainPtr& d, CounterRng& rng, int n_max, int band, int degree, bool real) {
    ScalarField out(d, -band, band, real);
    const int nz = d->config().n_z;
    n_max = std::min(n_max, nz);
    for (int n = real ? 0 : -n_max; n <= n_max; ++n) {
        for (int m = -band; m <= band; ++m) {
            if (real && n == 0 && m < 0) continue;
            for (int k = 0; k < regular_count(m, degree); ++k) {
                cplx c = rng.complex_normal();
                if (real && n == 0 && m == 0) c = c.real();
                const Eigen::VectorXd z = zernike_nodal(*d, m, k);
                out.slice(n).row(m) += c * z.transpose();
                if (real && !(n == 0 && m == 0)) out.slice(-n).row(-m) += std::conj(c) * z.transpose();
            }
        }
    }
    return out;
}

VectorField random_regular_vector(const DomainPtr& d, CounterRng& rng, int n_max, int band, int degree, bool real) {
    ScalarField a = random_regular_field(d, rng, n_max, band, degree, real);
    ScalarField b = random_regular_field(d, rng, n_max, band, degree, real);
    ScalarField c = random_regular_field(d, rng, n_max, band, degree, real);
    return {std::move(a), std::move(b), std::move(c)};
}

}  // namespace jetstokes
