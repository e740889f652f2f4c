#pragma once

#include <cstdint>

#include "jetstokes/field.hpp"

namespace jetstokes {

/// Counter-based generator: the k-th draw of stream s under seed x is
/// splitmix64(x ^ splitmix64(s) + k), so sequences are reproducible across
/// platforms and independent of call interleaving between streams.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(seed ^ mix(stream + 0x5851f42d4c957f2dULL)) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key_ + counter_++); }
    /// Uniform in (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double normal();
    cplx complex_normal() { return {normal(), normal()}; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Radial factor of the disk-orthonormal Zernike function of azimuthal
/// order m and radial index k (polynomial degree |m| + 2k):
/// integral over the disk of |R(r) e^{i m theta}|^2 equals 1.
double zernike_radial(int m, int k, double r, double kappa);
Eigen::VectorXd zernike_nodal(const Domain& d, int m, int k);
/// Number of regular radial functions of order m with degree <= degree.
inline int regular_count(int m, int degree) {
    const int am = m < 0 ? -m : m;
    return degree >= am ? (degree - am) / 2 + 1 : 0;
}
/// Largest polynomial degree the radial collocation represents exactly.
inline int max_radial_degree(const Domain& d) { return 2 * d.n_r() - 1; }

/// Random smooth slice: modes [m_lo, m_hi], each a random combination of
/// regular radial functions up to `degree`.
DiskField random_regular_slice(const Domain& d, CounterRng& rng, int m_lo, int m_hi, int degree);

/// Random band-limited field with axial modes |n| <= n_max, azimuthal
/// modes |m| <= band and radial degree <= degree. Real-valued fields satisfy
/// conjugate symmetry exactly.
ScalarField random_regular_field(const DomainPtr& d, CounterRng& rng, int n_max, int band, int degree, bool real = true);
VectorField random_regular_vector(const DomainPtr& d, CounterRng& rng, int n_max, int band, int degree, bool real = true);

/// Nodal field from a function of (r, theta, z) sampled on the physical grid.
template <class F>
ScalarField sample_field(const DomainPtr& d, F&& fn, int band = -1) {
    const auto& cfg = d->config();
    NodalGrid g;
    g.nz = 2 * cfg.n_z + 1;
    g.ntheta = 2 * (band < 0 ? cfg.n_theta : band) + 1;
    g.nr = cfg.n_r;
    g.values.resize(static_cast<size_t>(g.nz) * g.ntheta * g.nr);
    for (int k = 0; k < g.nz; ++k)
        for (int t = 0; t < g.ntheta; ++t)
            for (int j = 0; j < g.nr; ++j)
                g(k, t, j) = fn(d->nodes()(j), 2.0 * kPi * t / g.ntheta, cfg.ell * k / g.nz);
    return analyze(d, g);
}

}  // namespace jetstokes
