#include "lld/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lld/errors.hpp"
#include "lld/galerkin.hpp"

namespace lld {

Eigen::VectorXd SpectralSplit::lift(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const { return proj.Phi * v + z; }

Eigen::VectorXd SpectralSplit::H(const Nonlinearity& f, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
    return proj.Phi.transpose() * nonlinear_load(*op, f, lift(v, z));
}

Eigen::VectorXd SpectralSplit::G(const Nonlinearity& f, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const {
    const Eigen::VectorXd F = nonlinear_load(*op, f, lift(v, z));
    return F - op->M * (proj.Phi * (proj.Phi.transpose() * F));
}

Eigen::VectorXd SpectralSplit::to_fast(const Eigen::VectorXd& u) const { return proj.complement(u); }

SpectralSplit split(const DiscreteOperator& op, int m) {
    SpectralSplit sp;
    sp.op = &op;
    sp.proj = spectral_projection(op, m);
    sp.m = m;
    sp.beta = sp.proj.values[m - 1];
    sp.gamma = sp.proj.next_value;
    sp.M_const = 1.0;
    return sp;
}

GraphFunction GraphFunction::zero(int m, double rho, int npa, Eigen::Index dim) {
    if (m < 1 || m > 3) throw ContractViolation("graph: slow dimension must be 1..3");
    if (npa < 2) throw ContractViolation("graph: at least two nodes per axis");
    GraphFunction g;
    g.m = m;
    g.rho = rho;
    g.npa = npa;
    int total = 1;
    for (int i = 0; i < m; ++i) total *= npa;
    g.values.assign(total, Eigen::VectorXd::Zero(dim));
    return g;
}

Eigen::VectorXd GraphFunction::node(int flat) const {
    Eigen::VectorXd v(m);
    for (int a = 0; a < m; ++a) {
        const int k = flat % npa;
        flat /= npa;
        v[a] = -rho + 2.0 * rho * k / (npa - 1);
    }
    return v;
}

Eigen::VectorXd GraphFunction::eval(const Eigen::VectorXd& v) const {
    int base[3] = {0, 0, 0};
    double w[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < m; ++a) {
        const double c = std::clamp(v[a], -rho, rho);
        const double p = (c + rho) / (2.0 * rho) * (npa - 1);
        const int k = std::min(static_cast<int>(p), npa - 2);
        base[a] = k;
        w[a] = p - k;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(values.front().size());
    for (int corner = 0; corner < (1 << m); ++corner) {
        double weight = 1.0;
        int flat = 0, stride = 1;
        for (int a = 0; a < m; ++a) {
            const int bit = (corner >> a) & 1;
            weight *= bit ? w[a] : 1.0 - w[a];
            flat += (base[a] + bit) * stride;
            stride *= npa;
        }
        if (weight != 0.0) out += weight * values[flat];
    }
    return out;
}

double horizon_for(const SpectralSplit& sp, const Nonlinearity& f, double tol) {
    // D bounds the fast component: sup|f| over [-K, K] in L^2(0,1), smoothed by the fast resolvent.
    const double D = std::max(tol, f.sup_bound() / std::sqrt(sp.gamma));
    return std::log(10.0 * D / tol) / sp.gamma;
}

LpStep lp_iterate(const SpectralSplit& sp, const Nonlinearity& f, const GraphFunction& s, double T_h, const GraphSpec& spec) {
    const DiscreteOperator& op = *sp.op;
    const int m = sp.m;
    if (s.m != m) throw ContractViolation("lp_iterate: graph dimension does not match the split");
    const long steps = std::max(2L, static_cast<long>(std::ceil(T_h / spec.dt - 1e-9)));
    const double h = T_h / steps;
    const Eigen::VectorXd lam = sp.proj.values;
    const Eigen::MatrixXd& Phi = sp.proj.Phi;
    const LdltTridiag euler(lincomb(1.0, op.M, h, op.A));
    const LdltTridiag bdf2(lincomb(1.5, op.M, h, op.A));
    const double escape = spec.escape_factor * s.rho;

    auto slow_rhs = [&](const Eigen::VectorXd& v, Eigen::VectorXd* Fout) {
        const Eigen::VectorXd F = nonlinear_load(op, f, sp.lift(v, s.eval(v)));
        Eigen::VectorXd Hv = Phi.transpose() * F;
        if (Fout) *Fout = F;
        return Eigen::VectorXd(-lam.cwiseProduct(v) + Hv);
    };
    auto fast_part = [&](const Eigen::VectorXd& F) { return Eigen::VectorXd(F - op.M * (Phi * (Phi.transpose() * F))); };

    LpStep out;
    out.graph = s;
    std::vector<Eigen::VectorXd> G(steps + 1);
    for (int node = 0; node < s.size(); ++node) {
        Eigen::VectorXd v = s.node(node);
        Eigen::VectorXd F;
        // Backward slow flow; G[j] is the fast load at time -T_h + j h.
        for (long j = steps; j > 0; --j) {
            const Eigen::VectorXd k1 = slow_rhs(v, &F);
            G[j] = fast_part(F);
            const Eigen::VectorXd k2 = slow_rhs(v - 0.5 * h * k1, nullptr);
            const Eigen::VectorXd k3 = slow_rhs(v - 0.5 * h * k2, nullptr);
            const Eigen::VectorXd k4 = slow_rhs(v - h * k3, nullptr);
            v -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (v.cwiseAbs().maxCoeff() > escape) {
                std::ostringstream os;
                os << "backward slow orbit from node " << node << " left " << spec.escape_factor
                   << "x the box (|v| = " << v.cwiseAbs().maxCoeff() << "); enlarge rho";
                throw BoxEscape(os.str());
            }
        }
        slow_rhs(v, &F);
        G[0] = fast_part(F);
        // Forward fast integral from z(-T_h) = 0; G[0] only enters through z_0.
        Eigen::VectorXd z_prev = Eigen::VectorXd::Zero(op.dim());
        Eigen::VectorXd z = h * G[1];
        euler.solve_in_place(z);
        z -= Phi * (Phi.transpose() * (op.M * z));
        for (long j = 2; j <= steps; ++j) {
            Eigen::VectorXd rhs = op.M * (2.0 * z - 0.5 * z_prev) + h * G[j];
            bdf2.solve_in_place(rhs);
            rhs -= Phi * (Phi.transpose() * (op.M * rhs));
            z_prev = std::move(z);
            z = std::move(rhs);
        }
        const double change = op.energy_nodal(op.embed(z - s.values[node]));
        out.sup_change = std::max(out.sup_change, change);
        out.graph.values[node] = std::move(z);
    }
    double D = 0.0;
    for (const auto& val : out.graph.values) D = std::max(D, op.energy_nodal(op.embed(val)));
    out.graph.D = D;
    return out;
}

GraphResult compute_graph(const SpectralSplit& sp, const Nonlinearity& f, const GraphSpec& spec) {
    GraphResult r;
    r.horizon = spec.horizon > 0.0 ? spec.horizon : horizon_for(sp, f, spec.tol);
    GraphFunction g = GraphFunction::zero(sp.m, spec.rho, spec.nodes_per_axis, sp.op->dim());
    g.Delta = spec.Delta;
    for (int it = 0; it < spec.max_iterations; ++it) {
        LpStep step = lp_iterate(sp, f, g, r.horizon, spec);
        g = std::move(step.graph);
        g.Delta = spec.Delta;
        r.sup_changes.push_back(step.sup_change);
        r.iterations = it + 1;
        const std::size_t n = r.sup_changes.size();
        if (n >= 2 && r.sup_changes[n - 2] > 0.0) {
            const double ratio = r.sup_changes[n - 1] / r.sup_changes[n - 2];
            r.kappa = std::max(r.kappa, ratio);
            if (ratio >= 1.0 && r.sup_changes[n - 1] > spec.tol) {
                std::ostringstream os;
                os << "Lyapunov-Perron iteration does not contract (ratio " << ratio << " at iteration " << n
                   << "); use a larger m or a smaller box";
                throw NoContraction(os.str());
            }
        }
        if (step.sup_change <= spec.tol) break;
        if (it + 1 == spec.max_iterations)
            throw NoContraction("Lyapunov-Perron iteration reached the iteration cap without meeting tol");
    }
    r.graph = std::move(g);
    r.lipschitz = graph_lipschitz(sp, r.graph);
    return r;
}

double graph_lipschitz(const SpectralSplit& sp, const GraphFunction& g) {
    const DiscreteOperator& op = *sp.op;
    double L = 0.0;
    int stride = 1;
    for (int a = 0; a < g.m; ++a) {
        const double dv = 2.0 * g.rho / (g.npa - 1);
        const double denom = dv * std::sqrt(sp.proj.values[a]);
        for (int flat = 0; flat < g.size(); ++flat) {
            const int k = (flat / stride) % g.npa;
            if (k + 1 >= g.npa) continue;
            const double num = op.energy_nodal(op.embed(g.values[flat + stride] - g.values[flat]));
            L = std::max(L, num / denom);
        }
        stride *= g.npa;
    }
    return L;
}

double distance_to_graph(const SpectralSplit& sp, const GraphFunction& g, const Eigen::VectorXd& u) {
    const Eigen::VectorXd v = sp.proj.coords(u);
    const Eigen::VectorXd diff = u - sp.lift(v, g.eval(v));
    return sp.op->energy_nodal(sp.op->embed(diff));
}

double invariance_residual(const SpectralSplit& sp, const Nonlinearity& f, const GraphFunction& g, double t,
                           const FlowConfig& flow) {
    double worst = 0.0;
    for (int flat = 0; flat < g.size(); ++flat) {
        const Eigen::VectorXd v = g.node(flat);
        if (v.cwiseAbs().maxCoeff() > g.rho / 1.05 + 1e-12) continue;
        const Eigen::VectorXd u = step_to(*sp.op, f, sp.lift(v, g.values[flat]), t, flow);
        worst = std::max(worst, distance_to_graph(sp, g, u));
    }
    return worst;
}

Eigen::VectorXd align_signs(const SpectralSplit& e, const SpectralSplit& z) {
    Eigen::VectorXd s(e.m);
    for (int i = 0; i < e.m; ++i) {
        const Eigen::VectorXd b = z.op->embed(z.proj.Phi.col(i));
        const double overlap = e.op->embed(e.proj.Phi.col(i)).dot(e.op->M_full * b);
        if (std::abs(overlap) < 0.5) {
            std::ostringstream os;
            os << "slow basis vector " << i << " has overlap " << overlap << " with its limit; sign is ambiguous";
            throw AlignmentError(os.str());
        }
        s[i] = overlap > 0.0 ? 1.0 : -1.0;
    }
    return s;
}

double graph_diff(const SpectralSplit& e, const GraphFunction& g_eps, const SpectralSplit& z, const GraphFunction& g_0) {
    const Eigen::VectorXd signs = align_signs(e, z);
    double worst = 0.0;
    for (int flat = 0; flat < g_0.size(); ++flat) {
        const Eigen::VectorXd v = g_0.node(flat);
        const Eigen::VectorXd ve = signs.cwiseProduct(v);
        const Eigen::VectorXd ue = e.op->embed(e.lift(ve, g_eps.eval(ve)));
        const Eigen::VectorXd u0 = z.op->embed(z.lift(v, g_0.values[flat]));
        worst = std::max(worst, e.op->energy_nodal(ue - u0));
    }
    return worst;
}

}  // namespace lld
