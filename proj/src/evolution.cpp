#include "jetstokes/evolution.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "jetstokes/diskspec.hpp"
#include "jetstokes/helmholtz.hpp"

namespace jetstokes {

Scheme parse_scheme(const std::string& name) {
    if (name == "implicit-euler") return Scheme::ImplicitEuler;
    if (name == "crank-nicolson") return Scheme::CrankNicolson;
    throw Error("evolution", "unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme s) { return s == Scheme::ImplicitEuler ? "implicit-euler" : "crank-nicolson"; }

namespace {

using State = StokesOperator::State;

struct BlockStepper {
    int mode_index;
    int offset;
    int dim;
    bool weak;
    double theta_dt;
    const BlockSpace* block;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;  // strong path only

    Eigen::VectorXcd apply(const Eigen::VectorXcd& c) const {
        if (!weak) return block->A * c;
        return block->G_vectors * block->G_values.cwiseProduct(block->G_vectors.adjoint() * c);
    }
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
        if (!weak) return lu.solve(rhs);
        const Eigen::VectorXd denom = (1.0 + theta_dt * block->G_values.array()).matrix();
        return block->G_vectors * (block->G_vectors.adjoint() * rhs).cwiseQuotient(denom.cast<cplx>());
    }
};

State forcing_state(const StokesOperator& op, const Forcing& f, double t) {
    if (!f) return op.zero_state();
    return op.coordinates(f(t));
}

// (mu/2) sum ||E_ij v||^2 through the factored G
double dissipation(const std::vector<BlockStepper>& blocks, const State& c) {
    double d = 0.0;
    for (const auto& b : blocks) {
        const Eigen::VectorXcd y = b.block->G_vectors.adjoint() * c[b.mode_index].segment(b.offset, b.dim);
        d += y.cwiseAbs2().dot(b.block->G_values);
    }
    return d;
}

}  // namespace

Trajectory evolve(const StokesOperator& op, const EvolutionConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw Error("evolution", "dt must be positive");
    if (!(cfg.t_final >= cfg.dt)) throw Error("evolution", "t_final must be at least dt");
    const long steps = std::lround(cfg.t_final / cfg.dt);
    if (std::abs(steps * cfg.dt - cfg.t_final) > 1e-9 * cfg.t_final)
        throw Error("evolution", "t_final must be an integer multiple of dt");
    const double theta = cfg.scheme == Scheme::ImplicitEuler ? 1.0 : 0.5;

    std::vector<BlockStepper> blocks;
    for (int n = -op.n_z(); n <= op.n_z(); ++n) {
        const auto& mode = op.mode(n);
        for (size_t i = 0; i < mode.blocks().size(); ++i) {
            const auto& b = mode.blocks()[i];
            if (b.dim() == 0) continue;
            BlockStepper s{n + op.n_z(), mode.offset(i), b.dim(), cfg.weak, theta * cfg.dt, &b, {}};
            if (!cfg.weak) s.lu.compute(Eigen::MatrixXcd::Identity(b.dim(), b.dim()) + s.theta_dt * b.A);
            blocks.push_back(std::move(s));
        }
    }

    Trajectory out;
    State c = cfg.initial ? *cfg.initial : op.zero_state();
    if (c.size() != op.zero_state().size()) throw Error("evolution", "initial state has the wrong number of modes");
    State f0 = forcing_state(op, cfg.forcing, 0.0);
    if (cfg.forcing) {
        const double pf0 = std::sqrt(state_norm_sq(f0));
        if (pf0 > cfg.forcing_tolerance) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "forcing violates Pf(0) = 0: ||Pf(0)|| = %.3e", pf0);
            out.energy.warnings.push_back(buf);
        }
    }
    auto record = [&](double t, const State& s, double residual) {
        out.times.push_back(t);
        out.energy.rows.push_back({t, state_norm_sq(s), dissipation(blocks, s), residual});
        if (cfg.keep_states) out.states.push_back(s);
    };
    record(0.0, c, 0.0);
    if (cfg.snapshot_stride > 0) out.snapshots.push_back({0.0, c});

    for (long k = 1; k <= steps; ++k) {
        const double t = k * cfg.dt;
        const State f1 = forcing_state(op, cfg.forcing, t);
        State next = op.zero_state();
        for (const auto& b : blocks) {
            const Eigen::VectorXcd cb = c[b.mode_index].segment(b.offset, b.dim);
            Eigen::VectorXcd rhs;
            if (cfg.scheme == Scheme::ImplicitEuler) {
                rhs = cb + cfg.dt * f1[b.mode_index].segment(b.offset, b.dim);
            } else {
                rhs = cb - (0.5 * cfg.dt) * b.apply(cb) +
                      (0.5 * cfg.dt) * (f0[b.mode_index].segment(b.offset, b.dim) + f1[b.mode_index].segment(b.offset, b.dim));
            }
            const Eigen::VectorXcd x = b.solve(rhs);
            const double rn = rhs.norm();
            if (rn > 0.0)
                out.energy.max_algebraic_residual =
                    std::max(out.energy.max_algebraic_residual, (x + b.theta_dt * b.apply(x) - rhs).norm() / rn);
            next[b.mode_index].segment(b.offset, b.dim) = x;
        }

        // energy identity of the step
        const double n0 = state_norm_sq(c), n1 = state_norm_sq(next);
        double res = 0.0, scale = 0.0;
        if (cfg.scheme == Scheme::ImplicitEuler) {
            State diff = next;
            for (size_t i = 0; i < diff.size(); ++i) diff[i] -= c[i];
            const double jump = state_norm_sq(diff) / cfg.dt;
            const double d1 = dissipation(blocks, next);
            const double work = state_inner(f1, next).real();
            res = (n1 - n0) / cfg.dt + jump + 2.0 * d1 - 2.0 * work;
            scale = (n1 + n0) / cfg.dt + jump + 2.0 * d1 + 2.0 * std::abs(work);
        } else {
            State mid = next, fmid = f1;
            for (size_t i = 0; i < mid.size(); ++i) {
                mid[i] = 0.5 * (mid[i] + c[i]);
                fmid[i] = 0.5 * (fmid[i] + f0[i]);
            }
            const double dm = dissipation(blocks, mid);
            const double work = state_inner(fmid, mid).real();
            res = (n1 - n0) / cfg.dt + 2.0 * dm - 2.0 * work;
            scale = (n1 + n0) / cfg.dt + 2.0 * dm + 2.0 * std::abs(work);
        }
        c = std::move(next);
        f0 = f1;
        record(t, c, scale > 0.0 ? std::abs(res) / scale : 0.0);
        if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) out.snapshots.push_back({t, c});
    }
    return out;
}

ScalarField recover_pressure(const VectorField& v, const VectorField& f) {
    ScalarField q = operator_Q(v);
    q += solve_dirichlet(div(f));
    return q;
}

EstimateReport estimate_report(const StokesOperator& op, const Trajectory& traj, const Forcing& f, double dt) {
    if (traj.states.size() != traj.times.size() || traj.states.size() < 2)
        throw Error("evolution", "estimate_report needs a trajectory with stored states");
    EstimateReport rep;
    rep.dt = dt;
    rep.T = traj.times.back();
    if (!f) return rep;
    double h2 = 0.0, tdiff = 0.0, gq = 0.0, qt = 0.0, ff = 0.0;
    for (size_t k = 1; k < traj.states.size(); ++k) {
        const State& c = traj.states[k];
        for (int n = -op.n_z(); n <= op.n_z(); ++n) h2 += op.mode(n).norm_sq_Hkp(c[n + op.n_z()], 2);
        State diff = c;
        for (size_t i = 0; i < diff.size(); ++i) diff[i] -= traj.states[k - 1][i];
        tdiff += state_norm_sq(diff) / (dt * dt);
        const VectorField fk = f(traj.times[k]);
        const ScalarField q = recover_pressure(op.field(c), fk);
        gq += std::pow(norm_l2(grad(q)), 2);
        const TraceField tq = trace_SF(q);
        qt += inner_trace(tq, tq).real();
        ff += std::pow(norm_l2(fk), 2);
    }
    rep.v_h2 = std::sqrt(dt * h2);
    rep.v_dt = std::sqrt(dt * tdiff);
    rep.grad_q = std::sqrt(dt * gq);
    rep.q_trace = std::sqrt(dt * qt);
    rep.f_norm = std::sqrt(dt * ff);
    rep.ratio = rep.f_norm > 0.0 ? (rep.v_h2 + rep.v_dt + rep.grad_q + rep.q_trace) / rep.f_norm : 0.0;
    return rep;
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void write_energy_csv(const std::filesystem::path& path, const EnergyTrace& trace) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("evolution", "cannot write " + path.string());
    out << "t,l2_norm_sq,dissipation,residual\n";
    for (const auto& r : trace.rows)
        out << fmt(r.t) << ',' << fmt(r.l2_norm_sq) << ',' << fmt(r.dissipation) << ',' << fmt(r.residual) << '\n';
}

void write_estimate_json(const std::filesystem::path& path, const EstimateReport& rep) {
    nlohmann::ordered_json j;
    j["ratio"] = rep.ratio;
    j["surrogate_terms"] = {
        {"kind", "surrogate: L2-in-time of the H2 norm plus L2-in-time of backward differences"},
        {"v_L2_H2", rep.v_h2},
        {"v_time_difference_L2_L2", rep.v_dt},
        {"grad_q_L2_L2", rep.grad_q},
        {"q_trace_L2_L2", rep.q_trace},
        {"f_L2_L2", rep.f_norm},
    };
    j["T"] = rep.T;
    j["dt"] = rep.dt;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("evolution", "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace jetstokes
