#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "jetstokes/field_io.hpp"
#include "jetstokes/random.hpp"
#include "jetstokes/stokesop.hpp"

using namespace jetstokes;

namespace {

DomainPtr make_domain(int n_r = 12, int n_theta = 4, int n_z = 2) {
    DomainConfig cfg;
    cfg.n_r = n_r;
    cfg.n_theta = n_theta;
    cfg.n_z = n_z;
    return Domain::make(cfg);
}

ScalarField constant(const DomainPtr& d, cplx c) {
    return sample_field(d, [c](double, double, double) { return c; });
}

VectorField rotation(const DomainPtr& d) {
    return {sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); }),
            sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); }), ScalarField(d)};
}

VectorField unit_vector(const DomainPtr& d, int i) {
    VectorField v(d);
    v[i] = constant(d, 1.0);
    return v;
}

// Relative norm of the projection of v onto the constrained span at mode n.
double membership(const ModeOperator& op, const VectorField& v, int n) {
    const Eigen::VectorXcd c = op.coordinates(v.slice(n));
    return c.norm() / std::sqrt(disk::inner(*op.domain(), v.slice(n), v.slice(n)).real() * op.domain()->ell());
}

Eigen::VectorXcd random_coeffs(CounterRng& rng, int dim) {
    Eigen::VectorXcd c(dim);
    for (int i = 0; i < dim; ++i) c(i) = rng.complex_normal();
    return c;
}

}  // namespace

TEST(Traction, TrivialCases) {
    auto d = make_domain();
    VectorField c{constant(d, 1.0), constant(d, -2.0), constant(d, 3.0)};
    EXPECT_LT(traction(c, ScalarField(d)).max_abs(), 1e-11);
    const Traction pressure = traction(VectorField(d), constant(d, 1.0));
    // S = n = (cos, sin, 0)
    EXPECT_NEAR(std::abs(pressure.c[0].slice(0)(1) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pressure.c[0].slice(0)(-1) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pressure.c[1].slice(0)(1) - cplx(0.0, -0.5)), 0.0, 1e-15);
    EXPECT_LT(pressure.c[2].max_abs(), 1e-15);
    EXPECT_LT(tangential_traction(VectorField(d)).max_abs(), 1e-15);
    EXPECT_LT(traction(rotation(d), ScalarField(d)).max_abs(), 1e-11);
}

TEST(Traction, SplitsIntoNormalAndTangential) {
    auto d = make_domain();
    CounterRng rng(41, 1);
    const VectorField v = random_regular_vector(d, rng, 2, 3, 8, true);
    const ScalarField q = random_regular_field(d, rng, 2, 3, 8, true);
    for (int n = -2; n <= 2; ++n) {
        const auto s = traction(*d, n, v.slice(n), q.slice(n));
        const auto st = tangential_traction(*d, n, v.slice(n));
        const TraceSlice sn = times_cos(s[0]) + times_sin(s[1]);
        EXPECT_LT(max_abs(s[0] - times_cos(sn) - st[0]), 1e-12 * max_abs(sn));
        EXPECT_LT(max_abs(s[1] - times_sin(sn) - st[1]), 1e-12 * max_abs(sn));
        EXPECT_LT(max_abs(s[2] - st[2]), 1e-14);
        EXPECT_LT(max_abs(times_cos(st[0]) + times_sin(st[1])), 1e-12 * max_abs(sn));
    }
}

TEST(ConstrainedBasis, RawSpaceIsOrthonormalAndBasisSatisfiesConstraints) {
    auto d = make_domain();
    ModeOperator op(d, 1);
    for (const auto& b : op.blocks()) {
        const Eigen::MatrixXd gram = b.raw_weights * b.raw_nodal;
        EXPECT_LT((gram - Eigen::MatrixXd::Identity(b.raw_size, b.raw_size)).norm(), 1e-12);
        if (b.dim() == 0) continue;
        EXPECT_LT((b.basis.adjoint() * b.basis - Eigen::MatrixXcd::Identity(b.dim(), b.dim())).norm(), 1e-12);
    }
    EXPECT_LT(op.constraint_residual(), 1e-10);
    CounterRng rng(42, 1);
    const Eigen::VectorXcd c = random_coeffs(rng, op.dim());
    VectorField v(d, false);
    v.set_slice(1, op.field(c));
    EXPECT_LT(norm_l2(div(v)), 1e-10 * norm_Hkp(v, SobolevIndex(1)));
    EXPECT_LT(tangential_traction(v).max_abs(), 1e-10 * norm_Hkp(v, SobolevIndex(1)));
    EXPECT_LT((op.coordinates(op.field(c)) - c).norm(), 1e-12 * c.norm());
}

TEST(ConstrainedBasis, ContainsConstantsAndRotationAtZeroMode) {
    auto d = make_domain();
    ModeOperator op(d, 0);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(membership(op, unit_vector(d, i), 0), 1.0, 1e-12);
    EXPECT_NEAR(membership(op, rotation(d), 0), 1.0, 1e-12);
}

TEST(ModeOperator, StrongAndWeakAssemblyAgree) {
    auto d = make_domain();
    for (int n = -2; n <= 2; ++n) {
        ModeOperator op(d, n);
        EXPECT_LT(op.strong_weak_defect(), 1e-8) << "n = " << n;
        const Eigen::MatrixXcd G = op.G_block();
        EXPECT_LT((G - G.adjoint()).norm(), 1e-12 * G.norm());
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(G).eigenvalues().minCoeff();
        EXPECT_GE(lmin, -1e-10 * G.norm());
        EXPECT_LT((op.form_block(cplx(0, 2)) - (G - cplx(0, 2) * op.M_block())).norm(), 1e-15);
        for (const auto& b : op.blocks()) {
            if (b.dim() == 0) continue;
            const Eigen::MatrixXcd V = b.G_vectors;
            EXPECT_LT((V * b.G_values.cast<cplx>().asDiagonal() * V.adjoint() - b.G).norm(), 1e-12 * b.G.norm());
            EXPECT_LT((V.adjoint() * V - Eigen::MatrixXcd::Identity(b.dim(), b.dim())).norm(), 1e-12);
        }
    }
}

TEST(ApplyA, KernelFieldsAreAnnihilated) {
    auto d = make_domain();
    for (int i = 0; i < 3; ++i) EXPECT_LT(apply_A(unit_vector(d, i)).max_abs(), 1e-9);
    EXPECT_LT(apply_A(rotation(d)).max_abs(), 1e-9);
}

TEST(ApplyA, MatchesBlockMatrixAndIsDissipative) {
    auto d = make_domain();
    StokesOperator A(d);
    CounterRng rng(43, 1);
    auto s = A.zero_state();
    for (int n = -2; n <= 2; ++n) s[n + 2] = random_coeffs(rng, A.mode(n).dim());
    const VectorField v = A.field(s);
    const VectorField av = apply_A(v);
    const auto back = A.coordinates(av);
    double num = 0.0, den = 0.0;
    for (int n = -2; n <= 2; ++n) {
        const Eigen::VectorXcd ac = A.mode(n).apply_A(s[n + 2]);
        num += (back[n + 2] - ac).squaredNorm();
        den += ac.squaredNorm();
        EXPECT_GE(s[n + 2].dot(ac).real(), -1e-10 * ac.norm() * s[n + 2].norm());
    }
    EXPECT_LT(std::sqrt(num / den), 1e-9);
    // (A v, v) equals the form at lambda = 0
    const cplx av_v = inner_l2(av, v);
    const cplx form = form_value(v, v, 0.0);
    EXPECT_LT(std::abs(av_v - form), 1e-9 * std::abs(form));
}

TEST(ApplyA, PreservesAxialBand) {
    auto d = make_domain();
    CounterRng rng(44, 1);
    VectorField v(d, false);
    v.set_slice(1, VectorSlice{random_regular_slice(*d, rng, -3, 3, 8), random_regular_slice(*d, rng, -3, 3, 8),
                               random_regular_slice(*d, rng, -3, 3, 8)});
    const VectorField av = apply_A(v);
    for (int n = -2; n <= 2; ++n) {
        if (n == 1) continue;
        for (int i = 0; i < 3; ++i) EXPECT_EQ(av[i].slice(n).data.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(FormValue, RotationRealityAndCoercivity) {
    auto d = make_domain();
    EXPECT_LT(std::abs(form_value(rotation(d), rotation(d), 0.0)), 1e-10);
    CounterRng rng(45, 1);
    VectorField v = random_regular_vector(d, rng, 2, 3, 8, true);
    v = cplx(1.0 / norm_l2(v)) * v;
    const cplx f0 = form_value(v, v, 0.0);
    EXPECT_LT(std::abs(f0.imag()), 1e-12 * std::abs(f0));
    EXPECT_GE(f0.real(), 0.0);
    EXPECT_GE(std::abs(form_value(v, v, cplx(0, 1))), 1.0 / std::sqrt(2.0));
    for (cplx lam : {cplx(-1, 2), cplx(1, 3), cplx(-4, 0.5), cplx(0, -8)})
        EXPECT_GE(std::abs(form_value(v, v, lam)), std::abs(lam) / std::sqrt(2.0) - 1e-12);
    const VectorField w = random_regular_vector(d, rng, 2, 3, 8, true);
    const cplx a(0.3, 0.9);
    EXPECT_LT(std::abs(form_value(v + a * w, v, 0.5) - form_value(v, v, 0.5) - a * form_value(w, v, 0.5)), 1e-10 * std::abs(form_value(w, v, 0.5)) + 1e-12);
}

TEST(Export, MatrixFilesRoundTrip) {
    auto d = make_domain(8, 2, 1);
    ModeOperator op(d, 1);
    const auto dir = std::filesystem::temp_directory_path() / "jetstokes_export_test";
    export_mode_operator(op, dir);
    EXPECT_EQ(read_matrix_file(dir / "mode_1_A.json"), op.A_block());
    EXPECT_EQ(read_matrix_file(dir / "mode_1_G.json"), op.G_block());
}
