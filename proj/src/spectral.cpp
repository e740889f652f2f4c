#include "jetstokes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

namespace jetstokes {

std::vector<SpectralEntry> eigensolve(const ModeOperator& op, int count, double tolerance) {
    std::vector<SpectralEntry> out;
    for (const auto& b : op.blocks()) {
        if (b.dim() == 0) continue;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b.A, true);
        if (es.info() != Eigen::Success) throw Error("spectral", "eigensolver did not converge");
        for (int i = 0; i < b.dim(); ++i) {
            const cplx lam = es.eigenvalues()(i);
            const Eigen::VectorXcd v = es.eigenvectors().col(i);
            SpectralEntry e;
            e.n = op.n();
            e.lambda = lam;
            e.residual = (b.A * v - lam * v).norm() / v.norm();
            e.in_sector = std::abs(lam.imag()) <= lam.real() + tolerance;
            out.push_back(e);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const SpectralEntry& a, const SpectralEntry& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    if (count > 0 && static_cast<int>(out.size()) > count) out.resize(count);
    return out;
}

double operator_norm(const ModeOperator& op) {
    double worst = 0.0;
    for (const auto& b : op.blocks()) {
        if (b.dim() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (b.A + b.A.adjoint()), Eigen::EigenvaluesOnly);
        worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return worst;
}

int kernel_dimension(const ModeOperator& op, double tol) {
    const double scale = operator_norm(op);
    int count = 0;
    for (const auto& e : eigensolve(op, 0)) count += std::abs(e.lambda) < tol * scale;
    return count;
}

KernelReport analyze_kernel(const ModeOperator& op0, double tol) {
    if (op0.n() != 0) throw Error("spectral", "kernel analysis needs the n = 0 block");
    const auto& d = op0.domain();
    KernelReport rep;
    rep.a_norm = operator_norm(op0);
    rep.dimension = kernel_dimension(op0, tol);
    const int nr = d->n_r();
    for (int f = 0; f < 4; ++f) {
        VectorSlice v = disk::zero_vector(-1, 1, nr);
        for (int j = 0; j < nr; ++j) {
            const double r = d->nodes()(j);
            if (f < 3) {
                v[f].at(0, j) = 1.0;
            } else {
                // (-a2, a1) = r(-sin, cos)
                v[0].at(1, j) = -r / (2.0 * kI);
                v[0].at(-1, j) = r / (2.0 * kI);
                v[1].at(1, j) = 0.5 * r;
                v[1].at(-1, j) = 0.5 * r;
            }
        }
        const Eigen::VectorXcd c = op0.coordinates(v);
        const double full = std::sqrt(d->ell() * disk::inner(*d, v, v).real());
        rep.membership[f] = c.norm() / full;
        rep.rayleigh[f] = std::abs(c.dot(op0.apply_A(c))) / c.squaredNorm() / rep.a_norm;
    }
    return rep;
}

Resolvent::Resolvent(const StokesOperator& op) : op_(op) {
    for (int n = -op.n_z(); n <= op.n_z(); ++n) {
        std::vector<BlockEig> blocks;
        for (const auto& b : op.mode(n).blocks()) blocks.push_back({b.G_values, b.G_vectors});
        eig_.push_back(std::move(blocks));
    }
}

ResolveResult Resolvent::solve(cplx lambda, const StokesOperator::State& g) const {
    ResolveResult out;
    out.v = op_.zero_state();
    for (int n = -op_.n_z(); n <= op_.n_z(); ++n) {
        const auto& mode = op_.mode(n);
        const int k = n + op_.n_z();
        for (size_t i = 0; i < mode.blocks().size(); ++i) {
            const auto& b = mode.blocks()[i];
            if (b.dim() == 0) continue;
            const auto& e = eig_[k][i];
            const Eigen::VectorXcd gb = g[k].segment(mode.offset(i), b.dim());
            Eigen::VectorXcd shifted = e.values.cast<cplx>().array() - lambda;
            const double smin = shifted.cwiseAbs().minCoeff(), smax = shifted.cwiseAbs().maxCoeff();
            if (smin == 0.0) throw Error("spectral", "resolve: lambda is an eigenvalue");
            out.condition = std::max(out.condition, smax / smin);
            const Eigen::VectorXcd vb = e.vectors * ((e.vectors.adjoint() * gb).cwiseQuotient(shifted));
            out.v[k].segment(mode.offset(i), b.dim()) = vb;
            const double gn = gb.norm();
            if (gn > 0.0) out.residual = std::max(out.residual, (b.G * vb - lambda * vb - gb).norm() / gn);
        }
    }
    out.ill_conditioned = out.condition > 1e12;
    return out;
}

VectorField Resolvent::solve(cplx lambda, const VectorField& g) const {
    return op_.field(solve(lambda, op_.coordinates(g)).v);
}

StokesOperator::State random_state(const StokesOperator& op, CounterRng& rng) {
    auto s = op.zero_state();
    for (auto& v : s)
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
    const double nrm = std::sqrt(state_norm_sq(s));
    for (auto& v : s) v /= nrm;
    return s;
}

SweepResult resolvent_sweep(const Resolvent& res, const std::vector<cplx>& grid, double eps, int samples,
                            std::uint64_t seed, double tolerance) {
    if (grid.empty()) throw Error("spectral", "resolvent sweep grid is empty");
    if (samples < 1) throw Error("spectral", "resolvent sweep needs at least one sample per lambda");
    for (const cplx& lam : grid)
        if (std::abs(lam) < eps) throw Error("spectral", "resolvent sweep point inside |lambda| < eps");
    const auto& op = res.op();
    SweepResult out;
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        const cplx lam = grid[gi];
        CounterRng rng(seed, 0x5eed0000ULL + gi);
        ResolventSample s;
        s.lambda = lam;
        s.l2_bound = std::sqrt(2.0) / std::abs(lam);
        for (int k = 0; k < samples; ++k) {
            const auto g = random_state(op, rng);
            const auto r = res.solve(lam, g);
            const double gn = std::sqrt(state_norm_sq(g));
            double h2 = 0.0;
            for (int n = -op.n_z(); n <= op.n_z(); ++n) h2 += op.mode(n).norm_sq_Hkp(r.v[n + op.n_z()], 2);
            s.l2_gain = std::max(s.l2_gain, std::sqrt(state_norm_sq(r.v)) / gn);
            s.hk_gain = std::max(s.hk_gain, std::sqrt(h2) / gn);
        }
        s.bound_ok = s.l2_gain <= s.l2_bound + tolerance;
        out.samples.push_back(s);
    }
    // Group by ray (argument rounded to 1e-9) and fit log-log slopes.
    std::map<long long, std::vector<std::pair<double, double>>> rays;
    for (const auto& s : out.samples)
        rays[std::llround(std::arg(s.lambda) * 1e9)].push_back({std::log(std::abs(s.lambda)), std::log(s.hk_gain)});
    out.growth_exponent = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [key, pts] : rays) {
        (void)key;
        if (pts.size() < 2) continue;
        double mx = 0.0, my = 0.0;
        for (const auto& p : pts) {
            mx += p.first;
            my += p.second;
        }
        mx /= pts.size();
        my /= pts.size();
        double sxy = 0.0, sxx = 0.0;
        for (const auto& p : pts) {
            sxy += (p.first - mx) * (p.second - my);
            sxx += (p.first - mx) * (p.first - mx);
        }
        if (sxx == 0.0) continue;
        const double slope = sxy / sxx;
        out.growth_exponent = std::isnan(out.growth_exponent) ? slope : std::max(out.growth_exponent, slope);
    }
    return out;
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("spectral", "cannot write " + path.string());
    return out;
}

}  // namespace

void write_eigenvalues_csv(const std::filesystem::path& path, const std::vector<SpectralEntry>& entries) {
    auto out = open_csv(path);
    out << "n,re_lambda,im_lambda,residual,in_sector\n";
    for (const auto& e : entries)
        out << e.n << ',' << fmt(e.lambda.real()) << ',' << fmt(e.lambda.imag()) << ',' << fmt(e.residual) << ','
            << (e.in_sector ? "true" : "false") << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<ResolventSample>& samples) {
    auto out = open_csv(path);
    out << "re_lambda,im_lambda,l2_gain,l2_bound,hk_gain,bound_ok\n";
    for (const auto& s : samples)
        out << fmt(s.lambda.real()) << ',' << fmt(s.lambda.imag()) << ',' << fmt(s.l2_gain) << ',' << fmt(s.l2_bound)
            << ',' << fmt(s.hk_gain) << ',' << (s.bound_ok ? "true" : "false") << '\n';
}

}  // namespace jetstokes
