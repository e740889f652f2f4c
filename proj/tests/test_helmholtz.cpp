#include <cmath>

#include <gtest/gtest.h>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/helmholtz.hpp"
#include "jetstokes/random.hpp"

using namespace jetstokes;

namespace {

DomainPtr make_domain(int n_r = 16, int n_theta = 6, int n_z = 3) {
    DomainConfig cfg;
    cfg.n_r = n_r;
    cfg.n_theta = n_theta;
    cfg.n_z = n_z;
    return Domain::make(cfg);
}

ScalarField constant(const DomainPtr& d, cplx c) {
    return sample_field(d, [c](double, double, double) { return c; });
}

// Zero-traced potential: Dirichlet solution of a random smooth source.
ScalarField zero_trace_potential(const DomainPtr& d, CounterRng& rng) {
    return solve_dirichlet(random_regular_field(d, rng, 3, 4, 10, true));
}

}  // namespace

TEST(ProjectP, GradientOfZeroTracePotentialIsAnnihilated) {
    auto d = make_domain();
    const double k2 = d->kappa() * d->kappa();
    auto q0 = sample_field(d, [&](double r, double, double) { return cplx(r * r - k2); });
    const VectorField g = grad(q0);
    EXPECT_LT(norm_l2(project_P(g).solenoidal), 1e-12 * norm_l2(g));
    CounterRng rng(31, 1);
    for (int s = 0; s < 5; ++s) {
        const VectorField gq = grad(zero_trace_potential(d, rng));
        EXPECT_LT(norm_l2(project_P(gq).solenoidal), 1e-10 * norm_l2(gq));
    }
}

TEST(ProjectP, ConstantIsFixed) {
    auto d = make_domain();
    VectorField c{constant(d, 1.0), constant(d, -2.0), constant(d, 0.5)};
    const auto res = project_P(c);
    EXPECT_LT(norm_l2(res.solenoidal - c), 1e-14);
    EXPECT_LT(res.potential.max_abs(), 1e-14);
    // Oracle: (c, grad q) = 0 for zero-traced q by quadrature.
    CounterRng rng(32, 1);
    for (int s = 0; s < 5; ++s) {
        const VectorField gq = grad(zero_trace_potential(d, rng));
        EXPECT_LT(std::abs(inner_l2(c, gq)), 1e-12 * norm_l2(c) * norm_l2(gq));
    }
}

TEST(ProjectP, DivergenceFreeFieldsAreFixed) {
    auto d = make_domain();
    auto rot1 = sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); });
    auto rot2 = sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); });
    auto a1 = sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); });
    auto ma2 = sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); });
    for (const VectorField& v : {VectorField{rot1, rot2, ScalarField(d)}, VectorField{a1, ma2, ScalarField(d)}}) {
        const auto res = project_P(v);
        EXPECT_LT(norm_l2(res.solenoidal - v), 1e-13 * norm_l2(v));
        EXPECT_LT(res.potential.max_abs(), 1e-13);
    }
}

TEST(ProjectP, IdempotentSelfAdjointOrthogonal) {
    auto d = make_domain();
    CounterRng rng(33, 1);
    for (int s = 0; s < 10; ++s) {
        const VectorField u = random_regular_vector(d, rng, 3, 4, 10, true);
        const VectorField w = random_regular_vector(d, rng, 3, 4, 10, true);
        const auto pu = project_P(u);
        const VectorField pw = project_P(w).solenoidal;
        const double nu = norm_l2(u), nw = norm_l2(w);
        EXPECT_LT(norm_l2(project_P(pu.solenoidal).solenoidal - pu.solenoidal), 1e-10 * nu);
        EXPECT_LT(std::abs(inner_l2(pu.solenoidal, w) - inner_l2(u, pw)), 1e-10 * nu * nw);
        EXPECT_LT(std::abs(inner_l2(pu.solenoidal, u - pu.solenoidal)), 1e-10 * nu * nu);
        EXPECT_LT(pu.residual, 1e-10);
        EXPECT_LT(trace_SF(pu.potential).max_abs(), 1e-13 * pu.potential.max_abs());
        EXPECT_LT(pu.solenoidal[0].conjugate_symmetry_defect(), 1e-13 * nu);
    }
}

TEST(ProjectP, GradientPartMatchesHarmonicReplacement) {
    // P(grad f) = grad f~ with f~ harmonic and equal to f on S_F.
    auto d = make_domain();
    CounterRng rng(34, 1);
    const ScalarField f = random_regular_field(d, rng, 2, 3, 8, true);
    const auto res = project_P(grad(f));
    const ScalarField ft = f - res.potential;
    EXPECT_LT(norm_l2(res.solenoidal - grad(ft)), 1e-12 * norm_l2(grad(f)));
    EXPECT_LT((trace_SF(ft) - trace_SF(f)).max_abs(), 1e-13 * f.max_abs());
    for (int n = -3; n <= 3; ++n) {
        const DiskField lap = disk::laplacian(*d, n, ft.slice(n));
        for (int m = lap.m_lo; m <= lap.m_hi(); ++m)
            for (int j = 1; j < d->n_r(); ++j) EXPECT_LT(std::abs(lap(m, j)), 1e-9 * f.max_abs());
    }
}

TEST(ProjectorNorm, L2IsAtMostOneAndHigherOrdersFinite) {
    auto d = make_domain(12, 6, 2);
    EXPECT_LE(projector_norm_Hk(d, SobolevIndex(0), 8, 1), 1.0 + 1e-8);
    const double c1 = projector_norm_Hk(d, SobolevIndex(1), 8, 1);
    const double c2 = projector_norm_Hk(d, SobolevIndex(2), 8, 1);
    EXPECT_TRUE(std::isfinite(c1));
    EXPECT_TRUE(std::isfinite(c2));
    EXPECT_THROW(projector_norm_Hk(d, SobolevIndex(3), 8, 1), Error);
    EXPECT_THROW(projector_norm_Hk(d, SobolevIndex(0), 0, 1), Error);
}

TEST(OperatorQ, ConstantAndRotationGiveZero) {
    auto d = make_domain();
    VectorField c{constant(d, 1.0), constant(d, 2.0), constant(d, 3.0)};
    EXPECT_LT(operator_Q(c).max_abs(), 1e-11);
    auto rot1 = sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); });
    auto rot2 = sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); });
    EXPECT_LT(operator_Q(VectorField{rot1, rot2, ScalarField(d)}).max_abs(), 1e-12);
}

TEST(OperatorQ, StrainGivesQuadraticHarmonic) {
    auto d = make_domain();
    auto a1 = sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); });
    auto ma2 = sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); });
    const ScalarField q = operator_Q(VectorField{a1, ma2, ScalarField(d)});
    const double mu = d->mu(), kappa = d->kappa();
    const ScalarField expect = sample_field(d, [&](double r, double t, double) {
        return cplx(2.0 * mu * (r / kappa) * (r / kappa) * std::cos(2.0 * t));
    });
    EXPECT_LT((q - expect).max_abs(), 1e-12);
}

TEST(OperatorQ, HarmonicLinearAndMatchesDatum) {
    auto d = make_domain();
    CounterRng rng(35, 1);
    const VectorField v = random_regular_vector(d, rng, 3, 4, 10, true);
    const VectorField w = random_regular_vector(d, rng, 3, 4, 10, true);
    const ScalarField q = operator_Q(v);
    for (int n = -3; n <= 3; ++n) {
        const DiskField lap = disk::laplacian(*d, n, q.slice(n));
        double interior = 0.0;
        for (int m = lap.m_lo; m <= lap.m_hi(); ++m)
            for (int j = 1; j < d->n_r(); ++j) interior = std::max(interior, std::abs(lap(m, j)));
        EXPECT_LT(interior, 1e-8 * std::max(1.0, q.max_abs()));
        const TraceSlice datum = normal_stress_datum(*d, v.slice(n));
        const TraceSlice tr = disk::trace(q.slice(n));
        EXPECT_LT(max_abs(tr - datum), 1e-13 * std::max(1.0, max_abs(datum)));
    }
    const cplx a(0.7, 0.2);
    const ScalarField lhs = operator_Q(v + a * w);
    const ScalarField rhs = q + a * operator_Q(w);
    EXPECT_LT((lhs - rhs).max_abs(), 1e-12 * rhs.max_abs());
}
