#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/random.hpp"

using namespace jetstokes;

namespace {

DomainPtr make_domain(int n_r, int n_theta = 4, int n_z = 2) {
    DomainConfig cfg;
    cfg.n_r = n_r;
    cfg.n_theta = n_theta;
    cfg.n_z = n_z;
    return Domain::make(cfg);
}

// I0 by its power series; cross-checked against std::cyl_bessel_i below.
double bessel_i0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= (x * x / 4.0) / (k * k);
        sum += term;
    }
    return sum;
}

// Closed form for Delta u - beta^2 u = 1, u(kappa) = 0, radial.
double bessel_solution(double r, double beta, double kappa) {
    return (bessel_i0_series(beta * r) / bessel_i0_series(beta * kappa) - 1.0) / (beta * beta);
}

DiskField constant_rhs(const Domain& d) {
    DiskField f(0, 0, d.n_r());
    f.row(0).setConstant(1.0);
    return f;
}

double relative_l2_error(const Domain& d, const DiskField& u, double (*exact)(double, double, double), double beta) {
    DiskField e(0, 0, d.n_r());
    for (int j = 0; j < d.n_r(); ++j) e.at(0, j) = exact(d.nodes()(j), beta, d.kappa());
    return std::sqrt(disk::norm_sq(d, u - e) / disk::norm_sq(d, e));
}

// Second-order finite differences for u'' + u'/r - (m^2/r^2 + beta^2) u = f(r)
// on r_i = i h, with u(kappa) = 0 and u(0) = 0 (m != 0). Thomas algorithm.
std::vector<double> fd_radial(int m, double beta, double kappa, int N, double (*f)(double)) {
    const double h = kappa / N;
    std::vector<double> a(N + 1), b(N + 1), c(N + 1), rhs(N + 1), u(N + 1, 0.0);
    for (int i = 1; i < N; ++i) {
        const double r = i * h;
        a[i] = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
        b[i] = -2.0 / (h * h) - m * m / (r * r) - beta * beta;
        c[i] = 1.0 / (h * h) + 1.0 / (2.0 * h * r);
        rhs[i] = f(r);
    }
    for (int i = 2; i < N; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (int i = N - 1; i >= 1; --i) u[i] = (rhs[i] - (i + 1 < N ? c[i] * u[i + 1] : 0.0)) / b[i];
    return u;
}

double cubic_profile(double r) { return r * r * r; }

}  // namespace

TEST(BesselOracle, SeriesMatchesLibrary) {
    for (double x : {0.0, 0.25, 0.5, 1.0, 3.0}) EXPECT_NEAR(bessel_i0_series(x), std::cyl_bessel_i(0.0, x), 1e-14 * std::cyl_bessel_i(0.0, x));
}

TEST(ModeSolve, BesselClosedForm) {
    auto d = make_domain(32);
    const int n = 1;  // beta = 1 for ell = 2 pi
    ASSERT_NEAR(d->beta(n), 1.0, 1e-15);
    const DiskField u = solve_mode_dirichlet(*d, n, constant_rhs(*d));
    EXPECT_LT(relative_l2_error(*d, u, bessel_solution, 1.0), 1e-8);
    const auto res = dirichlet_residual(*d, n, u, constant_rhs(*d));
    EXPECT_LT(res.interior, 1e-10);
    EXPECT_LT(res.boundary, 1e-15);
}

TEST(ModeSolve, ZeroAxialModeIsQuadratic) {
    auto d = make_domain(8);
    const DiskField u = solve_mode_dirichlet(*d, 0, constant_rhs(*d));
    const double k2 = d->kappa() * d->kappa();
    for (int j = 0; j < d->n_r(); ++j) {
        const double r = d->nodes()(j);
        EXPECT_NEAR(u(0, j).real(), (r * r - k2) / 4.0, 1e-14);
    }
}

TEST(ModeSolve, SpectralConvergenceUnderRefinement) {
    double prev = 0.0;
    for (int nr : {2, 4, 8, 16, 32}) {
        auto d = make_domain(nr);
        const double err = relative_l2_error(*d, solve_mode_dirichlet(*d, 1, constant_rhs(*d)), bessel_solution, 1.0);
        if (prev > 1e-12) EXPECT_LT(err, prev / 10.0) << "n_r = " << nr;
        prev = err;
    }
    EXPECT_LT(prev, 1e-12);
}

TEST(ModeSolve, AgreesWithFiniteDifferenceOracle) {
    auto d = make_domain(24);
    const int n = 2, m = 1;
    const double beta = d->beta(n);
    DiskField f(m, m, d->n_r());
    for (int j = 0; j < d->n_r(); ++j) f.at(m, j) = cubic_profile(d->nodes()(j));
    const DiskField u = solve_mode_dirichlet(*d, n, f);

    const int N = 4000;
    const auto ref = fd_radial(m, beta, d->kappa(), N, cubic_profile);
    const double h = d->kappa() / N;
    double scale = 0.0, err = 0.0;
    for (int j = 0; j < d->n_r(); ++j) {
        const double r = d->nodes()(j);
        const int i = std::min(N - 1, static_cast<int>(r / h));
        const double t = (r - i * h) / h;
        const double v = (1.0 - t) * ref[i] + t * ref[i + 1];
        scale = std::max(scale, std::abs(v));
        err = std::max(err, std::abs(u(m, j).real() - v));
        EXPECT_LT(std::abs(u(m, j).imag()), 1e-15);
    }
    EXPECT_LT(err, 1e-5 * scale);
}

TEST(ModeSolve, Linearity) {
    auto d = make_domain(16);
    CounterRng rng(21, 1);
    const DiskField f = random_regular_slice(*d, rng, -4, 4, 12);
    const DiskField g = random_regular_slice(*d, rng, -4, 4, 12);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    const DiskField lhs = solve_mode_dirichlet(*d, 2, a * f + b * g);
    const DiskField rhs = a * solve_mode_dirichlet(*d, 2, f) + b * solve_mode_dirichlet(*d, 2, g);
    EXPECT_LT((lhs - rhs).data.cwiseAbs().maxCoeff(), 1e-13 * rhs.data.cwiseAbs().maxCoeff());
}

TEST(ModeSolve, MaximumPrinciple) {
    auto d = make_domain(16);
    DiskField f(0, 0, d->n_r());
    for (int j = 0; j < d->n_r(); ++j) {
        const double r = d->nodes()(j);
        f.at(0, j) = -1.0 - 5.0 * r * r;
    }
    for (int n : {0, 1, 2}) {
        const DiskField u = solve_mode_dirichlet(*d, n, f);
        for (int j = 0; j < d->n_r(); ++j) EXPECT_GE(u(0, j).real(), -1e-15);
    }
    TraceSlice g(0, 0);
    g.at(0) = 1.0;
    const DiskField h = harmonic_extension(*d, 1, g);
    for (int j = 0; j < d->n_r(); ++j) {
        EXPECT_LE(h(0, j).real(), 1.0 + 1e-14);
        EXPECT_GT(h(0, j).real(), 0.0);
    }
}

TEST(HarmonicExtension, BesselProfile) {
    auto d = make_domain(24);
    TraceSlice g(0, 0);
    g.at(0) = 1.0;
    const DiskField h = harmonic_extension(*d, 1, g);
    for (int j = 0; j < d->n_r(); ++j) {
        const double r = d->nodes()(j);
        EXPECT_NEAR(h(0, j).real(), bessel_i0_series(r) / bessel_i0_series(d->kappa()), 1e-12);
    }
}

TEST(HarmonicExtension, PolynomialHarmonicAtZeroMode) {
    // r^3 e^{3 i theta} is harmonic; its trace is kappa^3.
    auto d = make_domain(12);
    TraceSlice g(3, 3);
    g.at(3) = std::pow(d->kappa(), 3);
    const DiskField h = harmonic_extension(*d, 0, g);
    for (int j = 0; j < d->n_r(); ++j) EXPECT_NEAR(h(3, j).real(), std::pow(d->nodes()(j), 3), 1e-14);
}

TEST(ModeSolve, GalerkinMatrixIsHermitian) {
    // Basis (r^2 - kappa^2) Z_{m,k}: vanishes on the boundary, so (L phi_j, phi_i)
    // must be symmetric for L = -Delta + beta^2.
    auto d = make_domain(16);
    const double k2 = d->kappa() * d->kappa();
    for (int m : {0, 1, 3}) {
        const int K = regular_count(m, 13);
        std::vector<DiskField> basis;
        for (int k = 0; k < K; ++k) {
            DiskField phi(m, m, d->n_r());
            const Eigen::VectorXd z = zernike_nodal(*d, m, k);
            for (int j = 0; j < d->n_r(); ++j) phi.at(m, j) = (d->nodes()(j) * d->nodes()(j) - k2) * z(j);
            basis.push_back(phi);
        }
        Eigen::MatrixXcd G(K, K);
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) G(i, j) = -disk::inner(*d, disk::laplacian(*d, 2, basis[j]), basis[i]);
        EXPECT_LT((G - G.adjoint()).norm(), 1e-11 * G.norm()) << "m = " << m;
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(0.5 * (G + G.adjoint())).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Stability, ConstantIsFiniteAndRejectsEmptySample) {
    auto d = make_domain(16);
    EXPECT_THROW(stability_constant(*d, 1, 0), Error);
    const double c0 = stability_constant(*d, 0, 8, 3);
    const double c2 = stability_constant(*d, 2, 8, 3);
    EXPECT_TRUE(std::isfinite(c0));
    EXPECT_GT(c0, 0.0);
    EXPECT_GT(c2, 0.0);
    EXPECT_EQ(stability_constant(*d, 1, 8, 3), stability_constant(*d, 1, 8, 3));
}

TEST(FieldSolve, WholeFieldDirichletResidual) {
    auto d = make_domain(16);
    CounterRng rng(4, 2);
    ScalarField f = random_regular_field(d, rng, 2, 4, 12, true);
    ScalarField u = solve_dirichlet(f);
    for (int n = -2; n <= 2; ++n) EXPECT_LT(dirichlet_residual(*d, n, u.slice(n), f.slice(n)).interior, 1e-10);
    EXPECT_LT(trace_SF(u).max_abs(), 1e-14);
    EXPECT_LT(u.conjugate_symmetry_defect(), 1e-14);
}
