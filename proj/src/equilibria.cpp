#include "lld/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lld/errors.hpp"
#include "lld/galerkin.hpp"
#include "lld/spectral.hpp"

namespace lld {

namespace {

double residual_norm(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u, Eigen::VectorXd& r,
                     SymTridiag* jac) {
    r = op.A * u - nonlinear_load(op, f, u, jac);
    return dual_energy_norm(op, r);
}

// Dual norm of the entrywise magnitude |A||u| + |F(u)|, scaled to the
// rounding level at which the residual can no longer decrease.
double rounding_floor(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u) {
    const auto& A = op.A;
    const Eigen::Index n = u.size();
    Eigen::VectorXd w = nonlinear_load(op, f, u).cwiseAbs();
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] += std::abs(A.diag[i] * u[i]);
        if (i > 0) w[i] += std::abs(A.off[i - 1] * u[i - 1]);
        if (i + 1 < n) w[i] += std::abs(A.off[i] * u[i + 1]);
    }
    return 64.0 * std::numeric_limits<double>::epsilon() * dual_energy_norm(op, w);
}

}  // namespace

Equilibrium newton(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u_init, double tol) {
    if (tol < 1e-12) throw ContractViolation("newton: tol must be >= 1e-12");
    if (u_init.size() != op.dim()) throw ContractViolation("newton: initial guess dimension mismatch");
    Eigen::VectorXd u = u_init;
    Eigen::VectorXd r;
    SymTridiag Jf;
    double res = residual_norm(op, f, u, r, &Jf);
    int it = 0;
    while (res > tol) {
        if (it == 50) throw NonConvergence("newton: no convergence in 50 iterations (residual " + std::to_string(res) + ")", u);
        const LuTridiag lu(lincomb(1.0, op.A, -1.0, Jf));
        const Eigen::VectorXd step = lu.solve(-r);
        if (!step.allFinite()) throw NonConvergence("newton: singular Jacobian", u);
        double alpha = 1.0;
        Eigen::VectorXd trial, rt;
        SymTridiag Jt;
        double res_t = 0.0;
        int halvings = 0;
        for (;; ++halvings) {
            trial = u + alpha * step;
            res_t = residual_norm(op, f, trial, rt, &Jt);
            if (res_t < res || halvings == 30) break;
            alpha *= 0.5;
        }
        if (!(res_t < res) && res <= 10.0 * std::max(tol, rounding_floor(op, f, u))) break;
        if (!(res_t < res)) throw NonConvergence("newton: line search failed (residual " + std::to_string(res) + ")", u);
        u = std::move(trial);
        r = std::move(rt);
        Jf = std::move(Jt);
        res = res_t;
        ++it;
    }
    Equilibrium eq;
    eq.dofs = u;
    eq.u = GridFunction{op.mesh, op.embed(u), op.kind == OperatorKind::limit ? Space::constrained : Space::full};
    eq.eps = op.eps;
    eq.residual = res;
    eq.iterations = it;
    const HyperbolicityReport h = hyperbolicity(op, f, u);
    eq.morse_index = h.morse_index;
    eq.spectrum_head = h.head;
    eq.margin = h.margin;
    return eq;
}

HyperbolicityReport hyperbolicity(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& dofs, int head) {
    SymTridiag Jf;
    nonlinear_load(op, f, dofs, &Jf);
    const SymTridiag L = lincomb(1.0, op.A, -1.0, Jf);
    HyperbolicityReport rep;
    rep.morse_index = sturm_count(L, op.M, 0.0);
    const int count = static_cast<int>(std::min<Eigen::Index>(op.dim(), std::max(head, rep.morse_index + 1)));
    for (int i = 0; i < count; ++i) rep.head.push_back(pencil_eigenvalue(L, op.M, i));
    rep.margin = std::numeric_limits<double>::infinity();
    for (double v : rep.head) rep.margin = std::min(rep.margin, std::abs(v));
    if (static_cast<int>(rep.head.size()) > head) rep.head.resize(head);
    return rep;
}

std::vector<Equilibrium> find_all(const DiscreteOperator& op, const Nonlinearity& f, const SeedSpec& seeds) {
    const double K = f.cutoff_K();
    const Eigen::VectorXd phi1 = op.dim() > 4 ? pencil_eigenpairs(op.A, op.M, 1, 1)[0].vector
                                              : Eigen::VectorXd(Eigen::VectorXd::Zero(op.dim()));
    // Scale the perturbation to sup-norm 1 so it is a fixed fraction of the constant.
    const Eigen::VectorXd dir = phi1 / std::max(1e-300, op.embed(phi1).cwiseAbs().maxCoeff());
    std::vector<Equilibrium> found;
    auto distance = [&](const Equilibrium& a, const Equilibrium& b) { return op.energy_nodal(a.u.values - b.u.values); };
    for (int k = 0; k < seeds.grid_points; ++k) {
        const double c = seeds.grid_points == 1 ? 0.0 : -K + 2.0 * K * k / (seeds.grid_points - 1);
        for (int s = -1; s <= 1; ++s) {
            const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(op.dim(), c) + s * seeds.perturbation * dir;
            Equilibrium eq;
            try {
                eq = newton(op, f, u0);
            } catch (const NonConvergence&) {
                continue;
            }
            bool dup = false;
            for (const auto& e : found) dup = dup || distance(e, eq) <= seeds.dedup_distance;
            if (!dup) found.push_back(std::move(eq));
        }
    }
    std::sort(found.begin(), found.end(), [](const Equilibrium& a, const Equilibrium& b) {
        return a.u.values.sum() < b.u.values.sum();
    });
    for (const auto& e : found) {
        if (!(e.margin > seeds.margin)) {
            std::ostringstream os;
            os << "equilibrium with u(0)=" << e.u.values[0] << " is not hyperbolic (margin " << e.margin << ")";
            throw HyperbolicityFailure(os.str());
        }
    }
    return found;
}

std::vector<Equilibrium> find_all_limit(const DiscreteOperator& limit_op, const Nonlinearity& f, const SeedSpec& seeds) {
    return find_all(limit_op, f, seeds);
}

double default_delta(const DiscreteOperator& limit_op, const std::vector<Equilibrium>& set) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            d = std::min(d, limit_op.energy_nodal(set[i].u.values - set[j].u.values));
    return 0.5 * d;
}

double equilibrium_distance(const DiscreteOperator& eps_op, const DiscreteOperator&, const Equilibrium& ue,
                            const Equilibrium& u0) {
    return eps_op.energy_nodal(ue.u.values - u0.u.values);
}

Equilibrium continue_to_eps(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const Nonlinearity& f,
                            const Equilibrium& u0, double delta) {
    if (!(u0.margin > kHyperbolicMargin)) throw HyperbolicityFailure("continue_to_eps: start is not hyperbolic");
    if (eps_op.mesh != limit_op.mesh) throw ContractViolation("continue_to_eps: operators must share a mesh");
    Equilibrium ue = newton(eps_op, f, u0.u.values);
    const double d = equilibrium_distance(eps_op, limit_op, ue, u0);
    if (d > delta) {
        std::ostringstream os;
        os << "continued equilibrium left the delta ball (distance " << d << " > delta " << delta << ") at eps=" << eps_op.eps;
        throw UniquenessViolation(os.str());
    }
    return ue;
}

}  // namespace lld
