#include "jetstokes/domain.hpp"

#include <cmath>
#include <cstdlib>

namespace jetstokes {

void DomainConfig::validate() const {
    if (!(kappa > 0.0 && kappa < 1.0)) throw Error("fieldspace", "kappa must lie in (0, 1)");
    if (!(ell > 0.0)) throw Error("fieldspace", "ell must be positive");
    if (!(mu > 0.0)) throw Error("fieldspace", "mu must be positive");
    if (n_r < 1 || n_theta < 1 || n_z < 1) throw Error("fieldspace", "grid counts must be >= 1");
    if (quad_order < 0) throw Error("fieldspace", "quad_order must be >= 0");
}

bool operator==(const DomainConfig& a, const DomainConfig& b) {
    return a.kappa == b.kappa && a.ell == b.ell && a.mu == b.mu && a.n_r == b.n_r &&
           a.n_theta == b.n_theta && a.n_z == b.n_z && a.quadrature_points() == b.quadrature_points();
}

void gauss_legendre(int count, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    x.resize(count);
    w.resize(count);
    for (int i = 0; i < count; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = count * (z * p1 - p0) / (z * z - 1.0);
        x(i) = z;
        w(i) = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

namespace {

// Fold a full-diameter operator onto the positive half for a given parity.
Eigen::MatrixXd fold(const Eigen::MatrixXd& full, int rows, int half, int parity) {
    const int np = static_cast<int>(full.cols());
    Eigen::MatrixXd out(rows, half);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < half; ++j) out(i, j) = full(i, j) + parity * full(i, np - 1 - j);
    return out;
}

}  // namespace

Domain::Domain(const DomainConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int half = cfg_.n_r;
    const int np = 2 * half;
    const int nn = np - 1;

    xfull_.resize(np);
    for (int j = 0; j < np; ++j) xfull_(j) = std::cos(kPi * j / nn);
    // Symmetrize so that x_{np-1-j} == -x_j bitwise.
    for (int j = 0; j < half; ++j) xfull_(np - 1 - j) = -xfull_(j);

    bary_.resize(np);
    for (int j = 0; j < np; ++j) bary_(j) = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == nn) ? 0.5 : 1.0);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < np; ++j) {
            if (i == j) continue;
            d(i, j) = (bary_(j) / bary_(i)) / (xfull_(i) - xfull_(j));
            rowsum += d(i, j);
        }
        d(i, i) = -rowsum;
    }
    d /= cfg_.kappa;
    d_even_ = fold(d, half, half, 1);
    d_odd_ = fold(d, half, half, -1);

    r_ = cfg_.kappa * xfull_.head(half);
    inv_r_ = r_.cwiseInverse();

    Eigen::VectorXd gx, gw;
    gauss_legendre(cfg_.quadrature_points(), gx, gw);
    const int nq = static_cast<int>(gx.size());
    rq_.resize(nq);
    wq_.resize(nq);
    for (int q = 0; q < nq; ++q) {
        rq_(q) = 0.5 * cfg_.kappa * (1.0 + gx(q));
        wq_(q) = 0.5 * cfg_.kappa * gw(q) * rq_(q);
    }
    e_even_.resize(nq, half);
    e_odd_.resize(nq, half);
    for (int q = 0; q < nq; ++q) {
        e_even_.row(q) = interpolation_row(rq_(q), 1);
        e_odd_.row(q) = interpolation_row(rq_(q), -1);
    }
}

Eigen::RowVectorXd Domain::interpolation_row(double r, int parity) const {
    const int half = cfg_.n_r;
    const int np = 2 * half;
    const double x = r / cfg_.kappa;
    Eigen::RowVectorXd full = Eigen::RowVectorXd::Zero(np);
    int hit = -1;
    for (int j = 0; j < np; ++j)
        if (x == xfull_(j)) hit = j;
    if (hit >= 0) {
        full(hit) = 1.0;
    } else {
        double denom = 0.0;
        for (int j = 0; j < np; ++j) {
            const double t = bary_(j) / (x - xfull_(j));
            full(j) = t;
            denom += t;
        }
        full /= denom;
    }
    Eigen::RowVectorXd out(half);
    for (int j = 0; j < half; ++j) out(j) = full(j) + parity * full(np - 1 - j);
    return out;
}

Eigen::MatrixXd Domain::raise_matrix(int m) const {
    Eigen::MatrixXd out = diff(parity_of(m));
    out.diagonal().noalias() -= m * inv_r_;
    return out;
}

Eigen::MatrixXd Domain::lower_matrix(int m) const {
    Eigen::MatrixXd out = diff(parity_of(m));
    out.diagonal().noalias() += m * inv_r_;
    return out;
}

const Eigen::MatrixXd& Domain::laplacian_matrix(int m) const {
    const int key = std::abs(m);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = lap_cache_.find(key);
    if (it != lap_cache_.end()) return *it->second;
    const int mm = key;
    // 1/2 [ raise(m-1) lower(m) + lower(m+1) raise(m) ]
    Eigen::MatrixXd lap = 0.5 * (raise_matrix(mm - 1) * lower_matrix(mm) + lower_matrix(mm + 1) * raise_matrix(mm));
    auto [pos, ok] = lap_cache_.emplace(key, std::make_unique<Eigen::MatrixXd>(std::move(lap)));
    return *pos->second;
}

Eigen::MatrixXd Domain::dirichlet_matrix(int n, int m) const {
    const double b = beta(n);
    Eigen::MatrixXd op = -laplacian_matrix(m);
    op.diagonal().array() += b * b;
    op.row(0).setZero();
    op(0, 0) = 1.0;
    return op;
}

const Eigen::PartialPivLU<Eigen::MatrixXd>& Domain::dirichlet_lu(int n, int m) const {
    const auto key = std::make_pair(std::abs(n), std::abs(m));
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = lu_cache_.find(key);
        if (it != lu_cache_.end()) return *it->second;
    }
    Eigen::MatrixXd op = dirichlet_matrix(n, m);
    auto lu = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(op);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [pos, ok] = lu_cache_.emplace(key, std::move(lu));
    return *pos->second;
}

}  // namespace jetstokes
