#include "jetstokes/stokesop.hpp"

#include <cmath>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/field_io.hpp"
#include "jetstokes/helmholtz.hpp"
#include "jetstokes/random.hpp"

namespace jetstokes {

namespace {

constexpr std::array<double, 3> kAlpha{0.5, 0.5, 1.0};

using Pm = std::array<Eigen::VectorXcd, 3>;

VectorSlice cartesian_from_pm(const Domain& d, int M, const Pm& u) {
    const int nr = d.n_r();
    VectorSlice v = disk::zero_vector(M - 1, M + 1, nr);
    v[0].row(M + 1) += 0.5 * u[0].transpose();
    v[1].row(M + 1) += -0.5 * kI * u[0].transpose();
    v[0].row(M - 1) += 0.5 * u[1].transpose();
    v[1].row(M - 1) += 0.5 * kI * u[1].transpose();
    v[2].row(M) = u[2].transpose();
    return v;
}

Eigen::VectorXcd pm_from_cartesian(int M, const VectorSlice& v, int nr) {
    Eigen::VectorXcd out(3 * nr);
    for (int j = 0; j < nr; ++j) {
        out(j) = v[0](M + 1, j) + kI * v[1](M + 1, j);
        out(nr + j) = v[0](M - 1, j) - kI * v[1](M - 1, j);
        out(2 * nr + j) = v[2](M, j);
    }
    return out;
}

Pm split(const Eigen::VectorXcd& stacked, int nr) {
    return {stacked.segment(0, nr), stacked.segment(nr, nr), stacked.segment(2 * nr, nr)};
}

ScalarField gather(const DomainPtr& d, const std::vector<DiskField>& slices, bool real) {
    int lo = 0, hi = 0;
    for (const auto& s : slices) {
        lo = std::min(lo, s.m_lo);
        hi = std::max(hi, s.m_hi());
    }
    ScalarField out(d, lo, hi, real);
    const int nz = d->config().n_z;
    for (int n = -nz; n <= nz; ++n) out.slice(n) = slices[n + nz].with_range(lo, hi);
    return out;
}

// Real matrix times complex matrix without promoting the real operand.
Eigen::MatrixXcd apply_real(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd out(a.rows(), x.cols());
    out.real() = a * x.real();
    out.imag() = a * x.imag();
    return out;
}

BlockSpace build_block(const Domain& d, int n, int M, double null_tol) {
    const auto& cfg = d.config();
    const int nr = d.n_r();
    const int deg = max_radial_degree(d);
    const double ell = d.ell();
    BlockSpace b;
    b.M = M;
    b.mode = {M + 1, M - 1, M};
    for (int c = 0; c < 3; ++c) {
        b.offset[c] = b.raw_size;
        b.count[c] = std::abs(b.mode[c]) <= cfg.n_theta ? regular_count(b.mode[c], deg) : 0;
        b.raw_size += b.count[c];
    }
    const int R = b.raw_size;
    const int Q = static_cast<int>(d.quad_nodes().size());
    b.raw_nodal = Eigen::MatrixXd::Zero(3 * nr, R);
    b.raw_weights = Eigen::MatrixXd::Zero(R, 3 * nr);
    for (int c = 0; c < 3; ++c) {
        const int m = b.mode[c];
        const double s = 1.0 / std::sqrt(ell * kAlpha[c]);
        const Eigen::MatrixXd& E = d.to_quad(parity_of(m));
        for (int k = 0; k < b.count[c]; ++k) {
            const int col = b.offset[c] + k;
            b.raw_nodal.block(c * nr, col, nr, 1) = s * zernike_nodal(d, m, k);
            Eigen::RowVectorXd zq(Q);
            for (int q = 0; q < Q; ++q) zq(q) = zernike_radial(m, k, d.quad_nodes()(q), d.kappa()) * d.quad_weights()(q);
            b.raw_weights.block(col, c * nr, 1, nr) = (ell * kAlpha[c] * 2.0 * kPi * s) * zq * E;
        }
    }

    // Constraints, strong operator and symmetric-gradient samples per raw column.
    Eigen::MatrixXcd C(nr + 3, R);
    Eigen::MatrixXcd Anodal(3 * nr, R);
    const int n_e_rows = 9 * 5 * Q;
    Eigen::MatrixXcd Emat = Eigen::MatrixXcd::Zero(n_e_rows, R);
    Eigen::VectorXd ew(Q);
    for (int q = 0; q < Q; ++q) ew(q) = std::sqrt(0.5 * d.mu() * ell * 2.0 * kPi * d.quad_weights()(q));
    const Eigen::MatrixXd wq_even = ew.asDiagonal() * d.to_quad(1);
    const Eigen::MatrixXd wq_odd = ew.asDiagonal() * d.to_quad(-1);
    for (int j = 0; j < R; ++j) {
        const Eigen::VectorXcd col = b.raw_nodal.col(j).cast<cplx>();
        const VectorSlice v = cartesian_from_pm(d, M, split(col, nr));
        const DiskField dv = disk::div(d, n, v);
        for (int i = 0; i < nr; ++i) C(i, j) = dv(M, i);
        const auto st = tangential_traction(d, n, v);
        C(nr, j) = st[0](M + 1) + kI * st[1](M + 1);
        C(nr + 1, j) = st[0](M - 1) - kI * st[1](M - 1);
        C(nr + 2, j) = st[2](M);

        Anodal.col(j) = pm_from_cartesian(M, apply_A(d, n, v), nr);

        const auto E = disk::sym_grad(d, n, v);
        for (int e = 0; e < 9; ++e)
            for (int mm = M - 2; mm <= M + 2; ++mm) {
                if (!E[e].has(mm)) continue;
                Emat.block((e * 5 + (mm - M + 2)) * Q, j, Q, 1) = apply_real(parity_of(mm) > 0 ? wq_even : wq_odd, E[e].row(mm).transpose());
            }
    }

    const Eigen::MatrixXcd Araw = apply_real(b.raw_weights, Anodal);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
    b.singular_values = svd.singularValues();
    const double smax = b.singular_values.size() ? b.singular_values(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < b.singular_values.size(); ++i)
        if (b.singular_values(i) > null_tol * smax) ++rank;
    b.basis = svd.matrixV().rightCols(R - rank);
    if (b.basis.cols() > 0) {
        const double cn = C.norm();
        b.constraint_residual = cn > 0.0 ? (C * b.basis).colwise().norm().maxCoeff() / cn : 0.0;
        b.A = b.basis.adjoint() * Araw * b.basis;
        const Eigen::MatrixXcd EB = Emat * b.basis;
        b.G = EB.adjoint() * EB;
        const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(EB);
        const Eigen::MatrixXcd R = qr.matrixQR().topRows(b.dim()).triangularView<Eigen::Upper>();
        Eigen::JacobiSVD<Eigen::MatrixXcd> rsvd(R, Eigen::ComputeFullV);
        b.G_values = rsvd.singularValues().array().square();
        b.G_vectors = rsvd.matrixV();
    }
    return b;
}

Eigen::MatrixXcd block_diagonal(const std::vector<BlockSpace>& blocks, int dim, Eigen::MatrixXcd BlockSpace::*member) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    int off = 0;
    for (const auto& b : blocks) {
        out.block(off, off, b.dim(), b.dim()) = b.*member;
        off += b.dim();
    }
    return out;
}

}  // namespace

double Traction::max_abs() const {
    return std::max({c[0].max_abs(), c[1].max_abs(), c[2].max_abs()});
}

std::array<TraceSlice, 3> traction(const Domain& d, int n, const VectorSlice& v, const DiskField& q) {
    const auto E = disk::sym_grad(d, n, v);
    const TraceSlice tq = disk::trace(q);
    std::array<TraceSlice, 3> out;
    for (int i = 0; i < 3; ++i) {
        const TraceSlice en = times_cos(disk::trace(E[3 * i])) + times_sin(disk::trace(E[3 * i + 1]));
        out[i] = cplx(-d.mu()) * en;
    }
    out[0] = out[0] + times_cos(tq);
    out[1] = out[1] + times_sin(tq);
    return out;
}

std::array<TraceSlice, 3> tangential_traction(const Domain& d, int n, const VectorSlice& v) {
    DiskField zero(0, 0, d.n_r());
    auto s = traction(d, n, v, zero);
    const TraceSlice sn = times_cos(s[0]) + times_sin(s[1]);
    s[0] = s[0] - times_cos(sn);
    s[1] = s[1] - times_sin(sn);
    return s;
}

namespace {

template <class Fn>
Traction traction_field(const VectorField& v, Fn&& fn) {
    const auto& d = v.domain();
    Traction t{{TraceField(d), TraceField(d), TraceField(d)}};
    const int nz = d->config().n_z;
    for (int n = -nz; n <= nz; ++n) {
        const auto s = fn(n);
        for (int i = 0; i < 3; ++i) t.c[i].slice(n) = s[i];
    }
    return t;
}

}  // namespace

Traction traction(const VectorField& v, const ScalarField& q) {
    return traction_field(v, [&](int n) { return traction(*v.domain(), n, v.slice(n), q.slice(n)); });
}

Traction tangential_traction(const VectorField& v) {
    return traction_field(v, [&](int n) { return tangential_traction(*v.domain(), n, v.slice(n)); });
}

VectorSlice apply_A(const Domain& d, int n, const VectorSlice& v) {
    const VectorSlice plap = project_P(d, n, disk::laplacian(d, n, v));
    const VectorSlice gq = disk::grad(d, n, operator_Q(d, n, v));
    return disk::sub(gq, disk::scale(d.mu(), plap));
}

VectorField apply_A(const VectorField& v) {
    const auto& d = v.domain();
    const int nz = d->config().n_z;
    std::array<std::vector<DiskField>, 3> parts;
    for (auto& p : parts) p.resize(2 * nz + 1);
    for (int n = -nz; n <= nz; ++n) {
        const VectorSlice a = apply_A(*d, n, v.slice(n));
        for (int i = 0; i < 3; ++i) parts[i][n + nz] = a[i];
    }
    return VectorField(gather(d, parts[0], v.real_flag()), gather(d, parts[1], v.real_flag()), gather(d, parts[2], v.real_flag()));
}

cplx form_value(const VectorField& v, const VectorField& u, cplx lambda) {
    const auto ev = sym_grad(v);
    const auto eu = sym_grad(u);
    cplx sum = 0.0;
    for (int e = 0; e < 9; ++e) sum += inner_l2(ev[e], eu[e]);
    return -lambda * inner_l2(v, u) + 0.5 * v.domain()->mu() * sum;
}

ModeOperator::ModeOperator(DomainPtr domain, int n, double null_tol) : domain_(std::move(domain)), n_(n) {
    const int nt = domain_->config().n_theta;
    for (int M = -nt; M <= nt; ++M) {
        blocks_.push_back(build_block(*domain_, n, M, null_tol));
        offsets_.push_back(dim_);
        dim_ += blocks_.back().dim();
    }
}

Eigen::MatrixXcd ModeOperator::A_block() const { return block_diagonal(blocks_, dim_, &BlockSpace::A); }

Eigen::MatrixXcd ModeOperator::G_block() const { return block_diagonal(blocks_, dim_, &BlockSpace::G); }

Eigen::MatrixXcd ModeOperator::form_block(cplx lambda) const { return G_block() - lambda * M_block(); }

double ModeOperator::strong_weak_defect() const {
    double num = 0.0, den = 0.0;
    for (const auto& b : blocks_) {
        if (b.dim() == 0) continue;
        num += (b.A - b.G).squaredNorm();
        den += b.G.squaredNorm();
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double ModeOperator::constraint_residual() const {
    double worst = 0.0;
    for (const auto& b : blocks_) worst = std::max(worst, b.constraint_residual);
    return worst;
}

Eigen::VectorXcd ModeOperator::coordinates(const VectorSlice& v) const {
    Eigen::VectorXcd c(dim_);
    const int nr = domain_->n_r();
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        if (b.dim() == 0) continue;
        const Eigen::VectorXcd raw = apply_real(b.raw_weights, pm_from_cartesian(b.M, v, nr));
        c.segment(offsets_[i], b.dim()) = b.basis.adjoint() * raw;
    }
    return c;
}

VectorSlice ModeOperator::block_field(size_t i, const Eigen::VectorXcd& cb) const {
    const auto& b = blocks_[i];
    const Eigen::VectorXcd nodal = apply_real(b.raw_nodal, b.basis * cb);
    return cartesian_from_pm(*domain_, b.M, split(nodal, domain_->n_r()));
}

VectorSlice ModeOperator::field(const Eigen::VectorXcd& c) const {
    const int nt = domain_->config().n_theta;
    VectorSlice out = disk::zero_vector(-nt, nt, domain_->n_r());
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        if (b.dim() == 0) continue;
        const VectorSlice part = block_field(i, c.segment(offsets_[i], b.dim()));
        for (int k = 0; k < 3; ++k) out[k] += part[k];
    }
    for (auto& f : out) f = f.with_range(-nt, nt);
    return out;
}

Eigen::VectorXcd ModeOperator::apply_A(const Eigen::VectorXcd& c) const {
    Eigen::VectorXcd out(dim_);
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        if (b.dim()) out.segment(offsets_[i], b.dim()) = b.A * c.segment(offsets_[i], b.dim());
    }
    return out;
}

Eigen::VectorXcd ModeOperator::apply_G(const Eigen::VectorXcd& c) const {
    Eigen::VectorXcd out(dim_);
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        if (b.dim()) out.segment(offsets_[i], b.dim()) = b.G * c.segment(offsets_[i], b.dim());
    }
    return out;
}

const Eigen::MatrixXcd& ModeOperator::hk_gram(size_t bi, int k) const {
    const SobolevIndex idx(k);
    std::lock_guard<std::mutex> lock(gram_mutex_);
    auto it = gram_cache_.find({bi, idx.k});
    if (it != gram_cache_.end()) return it->second;
    const auto& d = *domain_;
    const auto& b = blocks_[bi];
    const int Q = static_cast<int>(d.quad_nodes().size());
    const int span = 2 * (idx.k + 1) + 1;  // modes M-1-k .. M+1+k
    const int n_alpha = (idx.k + 1) * (idx.k + 2) / 2;
    const double b2 = d.beta(n_) * d.beta(n_);
    std::vector<Eigen::MatrixXd> wq(2);
    for (int p = 0; p < 2; ++p) {
        const Eigen::VectorXd w = (d.ell() * 2.0 * kPi * d.quad_weights()).cwiseSqrt();
        wq[p] = w.asDiagonal() * d.to_quad(p == 0 ? 1 : -1);
    }
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(3 * n_alpha * span * Q, b.dim());
    for (int col = 0; col < b.dim(); ++col) {
        const VectorSlice v = block_field(bi, Eigen::VectorXcd::Unit(b.dim(), col));
        int row = 0;
        for (int c = 0; c < 3; ++c) {
            DiskField d2f = v[c];
            for (int bb = 0; bb <= idx.k; ++bb) {
                DiskField f = d2f;
                for (int a = 0; a + bb <= idx.k; ++a) {
                    double weight = 0.0, bp = 1.0;
                    for (int j = 0; j <= idx.k - a - bb; ++j, bp *= b2) weight += bp;
                    const double sw = std::sqrt(weight);
                    for (int mm = b.M - 1 - idx.k; mm <= b.M + 1 + idx.k; ++mm, row += Q) {
                        if (!f.has(mm)) continue;
                        const Eigen::MatrixXd& W = wq[parity_of(mm) > 0 ? 0 : 1];
                        Eigen::VectorXcd vals(Q);
                        vals.real() = W * f.row(mm).real().transpose();
                        vals.imag() = W * f.row(mm).imag().transpose();
                        F.block(row, col, Q, 1) = sw * vals;
                    }
                    f = disk::d1(d, f);
                }
                d2f = disk::d2(d, d2f);
            }
        }
    }
    return gram_cache_[{bi, idx.k}] = F.adjoint() * F;
}

double ModeOperator::norm_sq_Hkp(const Eigen::VectorXcd& c, int k) const {
    double sum = 0.0;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        if (b.dim() == 0) continue;
        const Eigen::VectorXcd cb = c.segment(offsets_[i], b.dim());
        sum += cb.dot(hk_gram(i, k) * cb).real();
    }
    return sum;
}

StokesOperator::StokesOperator(DomainPtr domain, double null_tol) : domain_(std::move(domain)) {
    const int nz = domain_->config().n_z;
    for (int n = -nz; n <= nz; ++n) modes_.push_back(std::make_unique<ModeOperator>(domain_, n, null_tol));
}

StokesOperator::State StokesOperator::coordinates(const VectorField& v) const {
    State s;
    for (int n = -n_z(); n <= n_z(); ++n) s.push_back(mode(n).coordinates(v.slice(n)));
    return s;
}

VectorField StokesOperator::field(const State& s) const {
    std::array<std::vector<DiskField>, 3> parts;
    for (auto& p : parts) p.resize(2 * n_z() + 1);
    for (int n = -n_z(); n <= n_z(); ++n) {
        const VectorSlice v = mode(n).field(s.at(n + n_z()));
        for (int i = 0; i < 3; ++i) parts[i][n + n_z()] = v[i];
    }
    return VectorField(gather(domain_, parts[0], false), gather(domain_, parts[1], false), gather(domain_, parts[2], false));
}

StokesOperator::State StokesOperator::zero_state() const {
    State s;
    for (int n = -n_z(); n <= n_z(); ++n) s.push_back(Eigen::VectorXcd::Zero(mode(n).dim()));
    return s;
}

double state_norm_sq(const StokesOperator::State& s) {
    double sum = 0.0;
    for (const auto& v : s) sum += v.squaredNorm();
    return sum;
}

cplx state_inner(const StokesOperator::State& a, const StokesOperator::State& b) {
    cplx sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += b[i].dot(a[i]);
    return sum;
}

void export_mode_operator(const ModeOperator& op, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string tag = "mode_" + std::to_string(op.n());
    write_matrix_file(dir / (tag + "_A.json"), op.A_block(), "A_block n=" + std::to_string(op.n()));
    write_matrix_file(dir / (tag + "_G.json"), op.G_block(), "G_block n=" + std::to_string(op.n()));
}

}  // namespace jetstokes
