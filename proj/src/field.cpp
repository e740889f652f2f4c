#include "jetstokes/field.hpp"

#include <algorithm>
#include <cmath>

namespace jetstokes {

// ---------------------------------------------------------------------------
// DiskField / TraceSlice arithmetic

DiskField DiskField::with_range(int lo, int hi) const {
    DiskField out(lo, hi, n_r());
    const int a = std::max(lo, m_lo), b = std::min(hi, m_hi());
    for (int m = a; m <= b; ++m) out.row(m) = row(m);
    return out;
}

DiskField& DiskField::operator+=(const DiskField& o) {
    if (data.size() == 0) return *this = o;
    if (o.m_lo < m_lo || o.m_hi() > m_hi())
        *this = with_range(std::min(m_lo, o.m_lo), std::max(m_hi(), o.m_hi()));
    for (int m = o.m_lo; m <= o.m_hi(); ++m) row(m) += o.row(m);
    return *this;
}

DiskField& DiskField::operator-=(const DiskField& o) {
    if (data.size() == 0) {
        *this = o;
        data = -data;
        return *this;
    }
    if (o.m_lo < m_lo || o.m_hi() > m_hi())
        *this = with_range(std::min(m_lo, o.m_lo), std::max(m_hi(), o.m_hi()));
    for (int m = o.m_lo; m <= o.m_hi(); ++m) row(m) -= o.row(m);
    return *this;
}

DiskField operator+(DiskField a, const DiskField& b) { return a += b; }
DiskField operator-(DiskField a, const DiskField& b) { return a -= b; }
DiskField operator*(cplx s, DiskField a) { return a *= s; }

TraceSlice TraceSlice::with_range(int lo, int hi) const {
    TraceSlice out(lo, hi);
    for (int m = std::max(lo, m_lo); m <= std::min(hi, m_hi()); ++m) out.at(m) = (*this)(m);
    return out;
}

TraceSlice operator+(const TraceSlice& a, const TraceSlice& b) {
    TraceSlice out(std::min(a.m_lo, b.m_lo), std::max(a.m_hi(), b.m_hi()));
    for (int m = out.m_lo; m <= out.m_hi(); ++m) out.at(m) = a(m) + b(m);
    return out;
}

TraceSlice operator-(const TraceSlice& a, const TraceSlice& b) {
    TraceSlice out(std::min(a.m_lo, b.m_lo), std::max(a.m_hi(), b.m_hi()));
    for (int m = out.m_lo; m <= out.m_hi(); ++m) out.at(m) = a(m) - b(m);
    return out;
}

TraceSlice operator*(cplx s, TraceSlice a) {
    a.c *= s;
    return a;
}

TraceSlice times_cos(const TraceSlice& g) {
    TraceSlice out(g.m_lo - 1, g.m_hi() + 1);
    for (int m = out.m_lo; m <= out.m_hi(); ++m) out.at(m) = 0.5 * (g(m - 1) + g(m + 1));
    return out;
}

TraceSlice times_sin(const TraceSlice& g) {
    TraceSlice out(g.m_lo - 1, g.m_hi() + 1);
    for (int m = out.m_lo; m <= out.m_hi(); ++m) out.at(m) = (g(m - 1) - g(m + 1)) / (2.0 * kI);
    return out;
}

double max_abs(const TraceSlice& g) { return g.c.size() ? g.c.cwiseAbs().maxCoeff() : 0.0; }

// ---------------------------------------------------------------------------
// slice operators

namespace disk {

DiskField raise(const Domain& d, const DiskField& f) {
    DiskField out(f.m_lo + 1, f.m_hi() + 1, f.n_r());
    const auto& inv_r = d.inv_nodes();
    for (int m = f.m_lo; m <= f.m_hi(); ++m) {
        const auto& dm = d.diff(parity_of(m));
        out.row(m + 1) = f.row(m) * dm.transpose();
        out.row(m + 1).array() -= double(m) * f.row(m).array() * inv_r.transpose().array();
    }
    return out;
}

DiskField lower(const Domain& d, const DiskField& f) {
    DiskField out(f.m_lo - 1, f.m_hi() - 1, f.n_r());
    const auto& inv_r = d.inv_nodes();
    for (int m = f.m_lo; m <= f.m_hi(); ++m) {
        const auto& dm = d.diff(parity_of(m));
        out.row(m - 1) = f.row(m) * dm.transpose();
        out.row(m - 1).array() += double(m) * f.row(m).array() * inv_r.transpose().array();
    }
    return out;
}

DiskField d1(const Domain& d, const DiskField& f) { return 0.5 * (raise(d, f) + lower(d, f)); }

DiskField d2(const Domain& d, const DiskField& f) { return (-0.5 * kI) * (raise(d, f) - lower(d, f)); }

DiskField d3(const Domain& d, int n, const DiskField& f) { return (kI * d.beta(n)) * f; }

DiskField partial(const Domain& d, int n, int axis, const DiskField& f) {
    switch (axis) {
        case 0: return d1(d, f);
        case 1: return d2(d, f);
        case 2: return d3(d, n, f);
    }
    throw Error("fieldspace", "axis out of range");
}

DiskField laplacian(const Domain& d, int n, const DiskField& f) {
    DiskField out(f.m_lo, f.m_hi(), f.n_r());
    const double b2 = d.beta(n) * d.beta(n);
    for (int m = f.m_lo; m <= f.m_hi(); ++m)
        out.row(m) = f.row(m) * d.laplacian_matrix(m).transpose() - b2 * f.row(m);
    return out;
}

VectorSlice grad(const Domain& d, int n, const DiskField& f) {
    DiskField rp = raise(d, f), lw = lower(d, f);
    DiskField g1 = 0.5 * (rp + lw);
    DiskField g2 = (-0.5 * kI) * (rp - lw);
    DiskField g3 = d3(d, n, f).with_range(g1.m_lo, g1.m_hi());
    return {std::move(g1), std::move(g2), std::move(g3)};
}

DiskField div(const Domain& d, int n, const VectorSlice& v) {
    return d1(d, v[0]) + d2(d, v[1]) + d3(d, n, v[2]);
}

VectorSlice laplacian(const Domain& d, int n, const VectorSlice& v) {
    return {laplacian(d, n, v[0]), laplacian(d, n, v[1]), laplacian(d, n, v[2])};
}

std::array<DiskField, 9> sym_grad(const Domain& d, int n, const VectorSlice& v) {
    std::array<DiskField, 9> dv;  // dv[i*3+j] = D_j v_i
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dv[i * 3 + j] = partial(d, n, j, v[i]);
    std::array<DiskField, 9> e;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) e[i * 3 + j] = dv[i * 3 + j] + dv[j * 3 + i];
    return e;
}

TraceSlice trace(const DiskField& f) {
    TraceSlice out(f.m_lo, f.m_hi());
    for (int m = f.m_lo; m <= f.m_hi(); ++m) out.at(m) = f.data(m - f.m_lo, 0);
    return out;
}

cplx inner(const Domain& d, const DiskField& f, const DiskField& g) {
    if (f.data.size() == 0 || g.data.size() == 0) return {};
    const int lo = std::max(f.m_lo, g.m_lo), hi = std::min(f.m_hi(), g.m_hi());
    const auto& w = d.quad_weights();
    cplx sum{};
    for (int m = lo; m <= hi; ++m) {
        const auto& e = d.to_quad(parity_of(m));
        Eigen::VectorXcd a = e * f.row(m).transpose();
        Eigen::VectorXcd b = e * g.row(m).transpose();
        sum += (a.array() * b.conjugate().array() * w.array()).sum();
    }
    return 2.0 * kPi * sum;
}

cplx inner(const Domain& d, const VectorSlice& f, const VectorSlice& g) {
    return inner(d, f[0], g[0]) + inner(d, f[1], g[1]) + inner(d, f[2], g[2]);
}

double norm_sq(const Domain& d, const DiskField& f) { return inner(d, f, f).real(); }

cplx inner_hk(const Domain& d, const DiskField& f, const DiskField& g, int k) {
    // Walk multi-indices (a, b) with a + b <= k: D1^a D2^b.
    cplx sum{};
    DiskField fa = f, ga = g;
    for (int a = 0; a <= k; ++a) {
        DiskField fb = fa, gb = ga;
        for (int b = 0; a + b <= k; ++b) {
            sum += inner(d, fb, gb);
            if (a + b < k) {
                fb = d2(d, fb);
                gb = d2(d, gb);
            }
        }
        if (a < k) {
            fa = d1(d, fa);
            ga = d1(d, ga);
        }
    }
    return sum;
}

cplx trace_inner(const Domain& d, const TraceSlice& g, const TraceSlice& h) {
    cplx sum{};
    for (int m = std::max(g.m_lo, h.m_lo); m <= std::min(g.m_hi(), h.m_hi()); ++m) sum += g(m) * std::conj(h(m));
    return 2.0 * kPi * d.kappa() * sum;
}

VectorSlice zero_vector(int lo, int hi, int n_r) {
    return {DiskField(lo, hi, n_r), DiskField(lo, hi, n_r), DiskField(lo, hi, n_r)};
}

VectorSlice add(const VectorSlice& a, const VectorSlice& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VectorSlice sub(const VectorSlice& a, const VectorSlice& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VectorSlice scale(cplx s, const VectorSlice& a) { return {s * a[0], s * a[1], s * a[2]}; }

}  // namespace disk

SobolevIndex::SobolevIndex(int order) : k(order) {
    if (order < 0) throw Error("fieldspace", "Sobolev index must be nonnegative");
    if (order > kMaxSobolevOrder)
        throw Error("fieldspace", "Sobolev index exceeds the configured derivative order " +
                                      std::to_string(kMaxSobolevOrder));
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(DomainPtr domain, bool real)
    : ScalarField(domain, -domain->config().n_theta, domain->config().n_theta, real) {}

ScalarField::ScalarField(DomainPtr domain, int m_lo, int m_hi, bool real) : domain_(std::move(domain)), real_(real) {
    const int nz = domain_->config().n_z;
    slices_.assign(2 * nz + 1, DiskField(m_lo, m_hi, domain_->n_r()));
}

int ScalarField::band() const {
    int b = 0;
    for (const auto& s : slices_) b = std::max({b, std::abs(s.m_lo), std::abs(s.m_hi())});
    return b;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    for (size_t i = 0; i < slices_.size(); ++i) slices_[i] += o.slices_[i];
    real_ = real_ && o.real_;
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    for (size_t i = 0; i < slices_.size(); ++i) slices_[i] -= o.slices_[i];
    real_ = real_ && o.real_;
    return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
    for (auto& sl : slices_) sl *= s;
    if (s.imag() != 0.0) real_ = false;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

double ScalarField::conjugate_symmetry_defect() const {
    double worst = 0.0;
    const int nz = n_z();
    const int b = band();
    for (int n = -nz; n <= nz; ++n)
        for (int m = -b; m <= b; ++m)
            for (int j = 0; j < domain_->n_r(); ++j)
                worst = std::max(worst, std::abs(slice(-n)(-m, j) - std::conj(slice(n)(m, j))));
    return worst;
}

double ScalarField::max_abs() const {
    double worst = 0.0;
    for (const auto& s : slices_)
        if (s.data.size()) worst = std::max(worst, s.data.cwiseAbs().maxCoeff());
    return worst;
}

double VectorField::max_abs() const { return std::max({c[0].max_abs(), c[1].max_abs(), c[2].max_abs()}); }

VectorField operator+(const VectorField& a, const VectorField& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VectorField operator-(const VectorField& a, const VectorField& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VectorField operator*(cplx s, const VectorField& a) { return {s * a[0], s * a[1], s * a[2]}; }

TraceField::TraceField(DomainPtr domain) : domain_(std::move(domain)) {
    const auto& cfg = domain_->config();
    slices_.assign(2 * cfg.n_z + 1, TraceSlice(-cfg.n_theta, cfg.n_theta));
}

double TraceField::max_abs() const {
    double worst = 0.0;
    for (const auto& s : slices_) worst = std::max(worst, jetstokes::max_abs(s));
    return worst;
}

TraceField operator-(const TraceField& a, const TraceField& b) {
    TraceField out(a.domain());
    const int nz = a.domain()->config().n_z;
    for (int n = -nz; n <= nz; ++n) out.slice(n) = a.slice(n) - b.slice(n);
    return out;
}

// ---------------------------------------------------------------------------
// transforms

ScalarField analyze(const DomainPtr& domain, const NodalGrid& grid) {
    const auto& cfg = domain->config();
    if (grid.nz != 2 * cfg.n_z + 1 || grid.nr != cfg.n_r || grid.ntheta < 1 || grid.ntheta % 2 == 0 ||
        grid.values.size() != static_cast<size_t>(grid.nz) * grid.ntheta * grid.nr)
        throw Error("fieldspace", "nodal grid dimensions do not match the domain");
    const int band = (grid.ntheta - 1) / 2;
    bool real = true;
    for (const auto& v : grid.values)
        if (v.imag() != 0.0) real = false;
    ScalarField out(domain, -band, band, real);
    // theta transform first: tmp[k][m][j]
    std::vector<cplx> tmp(static_cast<size_t>(grid.nz) * grid.ntheta * grid.nr);
    for (int k = 0; k < grid.nz; ++k)
        for (int m = -band; m <= band; ++m)
            for (int t = 0; t < grid.ntheta; ++t) {
                const cplx ph = std::polar(1.0, -2.0 * kPi * m * t / grid.ntheta) / double(grid.ntheta);
                for (int j = 0; j < grid.nr; ++j)
                    tmp[(static_cast<size_t>(k) * grid.ntheta + (m + band)) * grid.nr + j] += ph * grid(k, t, j);
            }
    for (int n = -cfg.n_z; n <= cfg.n_z; ++n) {
        auto& s = out.slice(n);
        for (int k = 0; k < grid.nz; ++k) {
            const cplx ph = std::polar(1.0, -2.0 * kPi * n * k / grid.nz) / double(grid.nz);
            for (int m = -band; m <= band; ++m)
                for (int j = 0; j < grid.nr; ++j)
                    s.at(m, j) += ph * tmp[(static_cast<size_t>(k) * grid.ntheta + (m + band)) * grid.nr + j];
        }
    }
    return out;
}

NodalGrid synthesize(const ScalarField& f, int band) {
    const auto& cfg = f.domain()->config();
    const int b = std::max({band, f.band(), cfg.n_theta});
    NodalGrid g;
    g.nz = 2 * cfg.n_z + 1;
    g.ntheta = 2 * b + 1;
    g.nr = cfg.n_r;
    g.values.assign(static_cast<size_t>(g.nz) * g.ntheta * g.nr, cplx{});
    std::vector<cplx> tmp(static_cast<size_t>(g.nz) * g.ntheta * g.nr);  // [k][m][j]
    for (int n = -cfg.n_z; n <= cfg.n_z; ++n) {
        const auto& s = f.slice(n);
        for (int k = 0; k < g.nz; ++k) {
            const cplx ph = std::polar(1.0, 2.0 * kPi * n * k / g.nz);
            for (int m = s.m_lo; m <= s.m_hi(); ++m)
                for (int j = 0; j < g.nr; ++j)
                    tmp[(static_cast<size_t>(k) * g.ntheta + (m + b)) * g.nr + j] += ph * s(m, j);
        }
    }
    for (int k = 0; k < g.nz; ++k)
        for (int t = 0; t < g.ntheta; ++t)
            for (int m = -b; m <= b; ++m) {
                const cplx ph = std::polar(1.0, 2.0 * kPi * m * t / g.ntheta);
                for (int j = 0; j < g.nr; ++j)
                    g(k, t, j) += ph * tmp[(static_cast<size_t>(k) * g.ntheta + (m + b)) * g.nr + j];
            }
    return g;
}

// ---------------------------------------------------------------------------
// whole-field calculus

namespace {

ScalarField map_slices(const ScalarField& f, bool real, auto&& op) {
    const auto& dom = *f.domain();
    ScalarField out(f.domain(), real);
    for (int n = -f.n_z(); n <= f.n_z(); ++n) out.slice(n) = op(dom, n, f.slice(n));
    return out;
}

}  // namespace

ScalarField grad_component(const ScalarField& f, int axis) {
    return map_slices(f, f.real_flag(),
                      [axis](const Domain& d, int n, const DiskField& s) { return disk::partial(d, n, axis, s); });
}

VectorField grad(const ScalarField& f) { return {grad_component(f, 0), grad_component(f, 1), grad_component(f, 2)}; }

ScalarField div(const VectorField& v) {
    const auto& dom = *v.domain();
    ScalarField out(v.domain(), v.real_flag());
    for (int n = -out.n_z(); n <= out.n_z(); ++n) out.slice(n) = disk::div(dom, n, v.slice(n));
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    return map_slices(f, f.real_flag(),
                      [](const Domain& d, int n, const DiskField& s) { return disk::laplacian(d, n, s); });
}

VectorField laplacian(const VectorField& v) { return {laplacian(v[0]), laplacian(v[1]), laplacian(v[2])}; }

std::array<ScalarField, 9> sym_grad(const VectorField& v) {
    std::array<ScalarField, 9> out;
    for (auto& e : out) e = ScalarField(v.domain(), v.real_flag());
    const auto& dom = *v.domain();
    for (int n = -v[0].n_z(); n <= v[0].n_z(); ++n) {
        auto e = disk::sym_grad(dom, n, v.slice(n));
        for (int i = 0; i < 9; ++i) out[i].slice(n) = std::move(e[i]);
    }
    return out;
}

cplx inner_product_Hkp(const ScalarField& u, const ScalarField& v, SobolevIndex k) {
    const auto& dom = *u.domain();
    cplx sum{};
    for (int n = -u.n_z(); n <= u.n_z(); ++n) {
        const double b = dom.beta(n);
        for (int j = 0; j <= k.k; ++j) {
            if (n == 0 && j > 0) break;
            sum += std::pow(b, 2 * j) * disk::inner_hk(dom, u.slice(n), v.slice(n), k.k - j);
        }
    }
    return dom.ell() * sum;
}

cplx inner_product_Hkp(const VectorField& u, const VectorField& v, SobolevIndex k) {
    return inner_product_Hkp(u[0], v[0], k) + inner_product_Hkp(u[1], v[1], k) + inner_product_Hkp(u[2], v[2], k);
}

double norm_Hkp(const ScalarField& u, SobolevIndex k) { return std::sqrt(std::max(0.0, inner_product_Hkp(u, u, k).real())); }
double norm_Hkp(const VectorField& u, SobolevIndex k) { return std::sqrt(std::max(0.0, inner_product_Hkp(u, u, k).real())); }

cplx inner_l2(const ScalarField& u, const ScalarField& v) {
    const auto& dom = *u.domain();
    cplx sum{};
    for (int n = -u.n_z(); n <= u.n_z(); ++n) sum += disk::inner(dom, u.slice(n), v.slice(n));
    return dom.ell() * sum;
}

cplx inner_l2(const VectorField& u, const VectorField& v) {
    return inner_l2(u[0], v[0]) + inner_l2(u[1], v[1]) + inner_l2(u[2], v[2]);
}

double norm_l2(const ScalarField& u) { return std::sqrt(std::max(0.0, inner_l2(u, u).real())); }
double norm_l2(const VectorField& u) { return std::sqrt(std::max(0.0, inner_l2(u, u).real())); }

TraceField trace_SF(const ScalarField& f) {
    TraceField out(f.domain());
    for (int n = -f.n_z(); n <= f.n_z(); ++n) out.slice(n) = disk::trace(f.slice(n));
    return out;
}

double periodicity_defect(const ScalarField& f, int order) {
    const auto& dom = *f.domain();
    double worst = 0.0, scale = 1.0;
    const int b = f.band();
    for (int p = 0; p < std::max(order, 1); ++p)
        for (int m = -b; m <= b; ++m)
            for (int j = 0; j < dom.n_r(); ++j) {
                cplx at0{}, atl{};
                for (int n = -f.n_z(); n <= f.n_z(); ++n) {
                    const cplx c = std::pow(kI * dom.beta(n), p) * f.slice(n)(m, j);
                    at0 += c;
                    atl += c * std::polar(1.0, dom.beta(n) * dom.ell());
                    scale = std::max(scale, std::abs(c));
                }
                worst = std::max(worst, std::abs(atl - at0));
            }
    return worst / scale;
}

cplx inner_trace(const TraceField& g, const TraceField& h) {
    const auto& dom = *g.domain();
    const int nz = dom.config().n_z;
    cplx sum{};
    for (int n = -nz; n <= nz; ++n) sum += disk::trace_inner(dom, g.slice(n), h.slice(n));
    return dom.ell() * sum;
}

double norm_trace(const TraceField& g) { return std::sqrt(std::max(0.0, inner_trace(g, g).real())); }

}  // namespace jetstokes
