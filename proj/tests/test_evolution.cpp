#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/evolution.hpp"
#include "jetstokes/helmholtz.hpp"
#include "jetstokes/random.hpp"
#include "jetstokes/spectral.hpp"

using namespace jetstokes;

namespace {

DomainPtr make_domain(int n_r = 10, int n_theta = 3, int n_z = 2) {
    DomainConfig cfg;
    cfg.n_r = n_r;
    cfg.n_theta = n_theta;
    cfg.n_z = n_z;
    return Domain::make(cfg);
}

ScalarField constant(const DomainPtr& d, cplx c) {
    return sample_field(d, [c](double, double, double) { return c; });
}

Forcing smooth_forcing(const DomainPtr& d) {
    return [d](double t) {
        const double p = 1.0 - std::exp(-t), k = d->kappa();
        return VectorField{sample_field(d, [=](double r, double, double z) { return cplx(p * std::cos(z) * (1 - r * r / (k * k))); }),
                           sample_field(d, [=](double r, double th, double z) { return cplx(p * std::sin(z) * r * std::cos(th)); }),
                           sample_field(d, [=](double, double, double z) { return cplx(p * std::cos(z)); })};
    };
}

}  // namespace

TEST(Evolve, ZeroDataStaysZero) {
    auto d = make_domain();
    StokesOperator op(d);
    EvolutionConfig cfg;
    cfg.t_final = 0.1;
    for (auto s : {Scheme::ImplicitEuler, Scheme::CrankNicolson}) {
        cfg.scheme = s;
        const auto tr = evolve(op, cfg);
        ASSERT_EQ(tr.energy.rows.size(), 11u);
        for (const auto& r : tr.energy.rows) EXPECT_EQ(r.l2_norm_sq, 0.0);
    }
}

TEST(Evolve, RejectsBadConfig) {
    auto d = make_domain(6, 2, 1);
    StokesOperator op(d);
    EvolutionConfig cfg;
    cfg.dt = 0.0;
    EXPECT_THROW(evolve(op, cfg), Error);
    cfg.dt = 0.1;
    cfg.t_final = 0.05;
    EXPECT_THROW(evolve(op, cfg), Error);
    cfg.t_final = 0.25;
    EXPECT_THROW(evolve(op, cfg), Error);
    EXPECT_THROW(parse_scheme("rk4"), Error);
    EXPECT_EQ(parse_scheme(scheme_name(Scheme::ImplicitEuler)), Scheme::ImplicitEuler);
}

TEST(Evolve, ConstantsAreSteady) {
    auto d = make_domain();
    StokesOperator op(d);
    VectorField c(d);
    c[2] = constant(d, 1.5);
    EvolutionConfig cfg;
    cfg.initial = op.coordinates(c);
    cfg.keep_states = true;
    cfg.t_final = 0.5;
    for (auto s : {Scheme::ImplicitEuler, Scheme::CrankNicolson}) {
        cfg.scheme = s;
        const auto tr = evolve(op, cfg);
        EXPECT_LT(norm_l2(op.field(tr.states.back()) - c), 1e-12 * norm_l2(c));
    }
}

TEST(Evolve, ImplicitEulerContractsAndCrankNicolsonBalancesEnergy) {
    auto d = make_domain();
    StokesOperator op(d);
    CounterRng rng(5, 2);
    EvolutionConfig cfg;
    cfg.initial = random_state(op, rng);
    cfg.scheme = Scheme::ImplicitEuler;
    const auto ie = evolve(op, cfg);
    for (size_t k = 1; k < ie.energy.rows.size(); ++k) {
        EXPECT_LE(ie.energy.rows[k].l2_norm_sq, ie.energy.rows[k - 1].l2_norm_sq * (1 + 1e-12));
        EXPECT_LT(ie.energy.rows[k].residual, 1e-10);
    }
    EXPECT_LT(ie.energy.max_algebraic_residual, 1e-10);
    cfg.scheme = Scheme::CrankNicolson;
    const auto cn = evolve(op, cfg);
    for (const auto& r : cn.energy.rows) EXPECT_LT(r.residual, 1e-8);
}

TEST(Evolve, EnergyRateMatchesDissipation) {
    auto d = make_domain();
    StokesOperator op(d);
    // smooth initial data: the lowest eigenvector of one block plus a kernel constant
    const auto& mode = op.mode(1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mode.blocks()[3].G);
    auto init = op.zero_state();
    init[3].segment(mode.offset(3), mode.blocks()[3].dim()) = es.eigenvectors().col(0);
    VectorField c(d);
    c[2] = constant(d, 1.0);
    init[2] = op.coordinates(c)[2];
    double prev = 0.0;
    for (double dt : {2e-3, 1e-3}) {
        EvolutionConfig cfg;
        cfg.initial = init;
        cfg.dt = dt;
        cfg.t_final = 4 * dt;
        cfg.scheme = Scheme::ImplicitEuler;
        const auto r = evolve(op, cfg).energy.rows;
        const double rate = (r[1].l2_norm_sq - r[0].l2_norm_sq) / dt;
        const double err = std::abs(rate + 2.0 * r[1].dissipation) / (2.0 * r[1].dissipation);
        EXPECT_LT(err, 0.05);
        if (prev > 0.0) EXPECT_NEAR(prev / err, 2.0, 0.2);
        prev = err;
    }
}

TEST(Evolve, CrankNicolsonIsSecondOrder) {
    auto d = make_domain(8, 2, 1);
    StokesOperator op(d);
    const Forcing f = smooth_forcing(d);
    auto final_state = [&](double dt) {
        EvolutionConfig cfg;
        cfg.forcing = f;
        cfg.dt = dt;
        cfg.t_final = 0.4;
        cfg.keep_states = true;
        return evolve(op, cfg).states.back();
    };
    auto dist = [](const StokesOperator::State& a, const StokesOperator::State& b) {
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
        return std::sqrt(s);
    };
    const auto ref = final_state(0.0025);
    const double e1 = dist(final_state(0.04), ref), e2 = dist(final_state(0.02), ref);
    EXPECT_GT(e1 / e2, 3.0);
}

TEST(Pressure, RecoveryExamples) {
    auto d = make_domain();
    VectorField zero(d);
    EXPECT_EQ(recover_pressure(zero, zero).max_abs(), 0.0);
    const VectorField rot{sample_field(d, [](double r, double t, double) { return cplx(-r * std::sin(t)); }),
                          sample_field(d, [](double r, double t, double) { return cplx(r * std::cos(t)); }), ScalarField(d)};
    EXPECT_LT(recover_pressure(rot, zero).max_abs(), 1e-10);
    // f = grad psi with psi zero on S_F gives q = Q v + psi
    const double k = d->kappa();
    const ScalarField psi = sample_field(d, [k](double r, double t, double z) { return cplx((k * k - r * r) * (1 + r * std::cos(t)) * std::sin(z)); });
    CounterRng rng(9, 1);
    const VectorField v = random_regular_vector(d, rng, 2, 2, 6, true);
    const ScalarField q = recover_pressure(v, grad(psi));
    EXPECT_LT((q - operator_Q(v) - psi).max_abs(), 1e-9 * psi.max_abs());
    EXPECT_LT((trace_SF(q) - trace_SF(operator_Q(v))).max_abs(), 1e-10 * operator_Q(v).max_abs());
}

TEST(Estimate, RatioIsStableAndZeroForZeroForcing) {
    auto d = make_domain(8, 2, 1);
    StokesOperator op(d);
    const Forcing f = smooth_forcing(d);
    auto ratio = [&](double T, double dt) {
        EvolutionConfig cfg;
        cfg.forcing = f;
        cfg.dt = dt;
        cfg.t_final = T;
        cfg.keep_states = true;
        const auto tr = evolve(op, cfg);
        EXPECT_TRUE(tr.energy.warnings.empty());
        return estimate_report(op, tr, f, dt).ratio;
    };
    const double r1 = ratio(1.0, 0.05), r2 = ratio(2.0, 0.05), r3 = ratio(1.0, 0.025);
    EXPECT_GT(r1, 0.0);
    EXPECT_LT(std::max(r1, r2) / std::min(r1, r2), 2.0);
    EXPECT_LT(std::abs(r3 - r1) / r1, 0.1);
    EvolutionConfig cfg;
    cfg.keep_states = true;
    cfg.t_final = 0.05;
    EXPECT_EQ(estimate_report(op, evolve(op, cfg), Forcing{}, cfg.dt).ratio, 0.0);
}

TEST(Estimate, WarnsWhenForcingStartsNonzero) {
    auto d = make_domain(6, 2, 1);
    StokesOperator op(d);
    EvolutionConfig cfg;
    cfg.t_final = 0.02;
    cfg.forcing = [d](double) {
        VectorField f(d);
        f[2] = sample_field(d, [](double, double, double z) { return cplx(std::cos(z)); });
        return f;
    };
    EXPECT_EQ(evolve(op, cfg).energy.warnings.size(), 1u);
}

TEST(Output, EnergyCsvAndEstimateJson) {
    const auto dir = std::filesystem::temp_directory_path() / "jetstokes_evolution_test";
    EnergyTrace tr;
    tr.rows.push_back({0.0, 1.0, 0.5, 0.0});
    write_energy_csv(dir / "energy.csv", tr);
    std::ifstream in(dir / "energy.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,l2_norm_sq,dissipation,residual");
    std::getline(in, line);
    EXPECT_EQ(line, "0,1,0.5,0");
    EstimateReport rep;
    rep.ratio = 1.25;
    write_estimate_json(dir / "estimate.json", rep);
    EXPECT_TRUE(std::filesystem::exists(dir / "estimate.json"));
}
