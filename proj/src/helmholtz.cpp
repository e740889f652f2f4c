#include "jetstokes/helmholtz.hpp"

#include <cmath>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/random.hpp"

namespace jetstokes {

VectorSlice project_P(const Domain& d, int n, const VectorSlice& u, DiskField* potential) {
    DiskField q = solve_mode_dirichlet(d, n, disk::div(d, n, u));
    VectorSlice out = disk::sub(u, disk::grad(d, n, q));
    if (potential) *potential = std::move(q);
    return out;
}

DecompositionResult project_P(const VectorField& u) {
    const auto& dom = u.domain();
    const int nz = dom->config().n_z;
    DecompositionResult res;
    std::vector<VectorSlice> sol(2 * nz + 1);
    std::vector<DiskField> pot(2 * nz + 1);
    int lo = 0, hi = 0, qlo = 0, qhi = 0;
    for (int n = -nz; n <= nz; ++n) {
        auto& s = sol[n + nz];
        s = project_P(*dom, n, u.slice(n), &pot[n + nz]);
        for (const auto& c : s) {
            lo = std::min(lo, c.m_lo);
            hi = std::max(hi, c.m_hi());
        }
        qlo = std::min(qlo, pot[n + nz].m_lo);
        qhi = std::max(qhi, pot[n + nz].m_hi());
    }
    const bool real = u.real_flag();
    res.solenoidal = VectorField(ScalarField(dom, lo, hi, real), ScalarField(dom, lo, hi, real), ScalarField(dom, lo, hi, real));
    res.potential = ScalarField(dom, qlo, qhi, real);
    for (int n = -nz; n <= nz; ++n) {
        for (int i = 0; i < 3; ++i) res.solenoidal[i].slice(n) = sol[n + nz][i].with_range(lo, hi);
        res.potential.slice(n) = pot[n + nz].with_range(qlo, qhi);
    }
    const double scale = norm_Hkp(u, SobolevIndex(1));
    res.residual = scale > 0.0 ? norm_l2(div(res.solenoidal)) / scale : 0.0;
    return res;
}

double projector_norm_Hk(const DomainPtr& d, SobolevIndex k, int sample_count, std::uint64_t seed) {
    if (k.k > 2) throw Error("helmholtz", "projector_norm_Hk supports k in {0, 1, 2}");
    if (sample_count < 1) throw Error("helmholtz", "projector_norm_Hk needs at least one sample");
    const auto& cfg = d->config();
    CounterRng rng(seed, 0x4e1d00ULL + static_cast<std::uint64_t>(k.k));
    double worst = 0.0;
    for (int s = 0; s < sample_count; ++s) {
        VectorField u = random_regular_vector(d, rng, std::min(cfg.n_z, 3), cfg.n_theta / 2, cfg.n_r / 2, true);
        const double un = norm_Hkp(u, k);
        if (un == 0.0) continue;
        worst = std::max(worst, norm_Hkp(project_P(u).solenoidal, k) / un);
    }
    return worst;
}

TraceSlice normal_stress_datum(const Domain& d, const VectorSlice& v) {
    // n_i n_j t_ij with n = (cos, sin): cos^2 t11 + cos sin (t12 + t21) + sin^2 t22
    const TraceSlice t11 = disk::trace(disk::d1(d, v[0]));
    const TraceSlice t22 = disk::trace(disk::d2(d, v[1]));
    const TraceSlice t12 = disk::trace(disk::d2(d, v[0])) + disk::trace(disk::d1(d, v[1]));
    const TraceSlice sum = times_cos(times_cos(t11)) + times_cos(times_sin(t12)) + times_sin(times_sin(t22));
    return cplx(2.0 * d.mu()) * sum;
}

DiskField operator_Q(const Domain& d, int n, const VectorSlice& v) {
    return harmonic_extension(d, n, normal_stress_datum(d, v));
}

ScalarField operator_Q(const VectorField& v) {
    const auto& dom = v.domain();
    const int nz = dom->config().n_z;
    std::vector<DiskField> q(2 * nz + 1);
    int lo = 0, hi = 0;
    for (int n = -nz; n <= nz; ++n) {
        q[n + nz] = operator_Q(*dom, n, v.slice(n));
        lo = std::min(lo, q[n + nz].m_lo);
        hi = std::max(hi, q[n + nz].m_hi());
    }
    ScalarField out(dom, lo, hi, v.real_flag());
    for (int n = -nz; n <= nz; ++n) out.slice(n) = q[n + nz].with_range(lo, hi);
    return out;
}

}  // namespace jetstokes
