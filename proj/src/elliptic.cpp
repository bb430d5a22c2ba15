#include "lld/elliptic.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lld/errors.hpp"

namespace lld {

namespace {

const LdltTridiag& factor_for(const DiscreteOperator& op, double mu, LdltTridiag& storage) {
    if (mu == 0.0) return op.A_factor();
    storage = LdltTridiag(lincomb(1.0, op.A, mu, op.M));
    return storage;
}

}  // namespace

Eigen::VectorXd solve_dofs(const DiscreteOperator& op, const Eigen::VectorXd& load, double mu) {
    if (load.size() != op.dim()) throw ContractViolation("solve: load dimension mismatch");
    LdltTridiag storage;
    const LdltTridiag& f = factor_for(op, mu, storage);
    if (!f.ok()) throw SingularOperator("factorization of the elliptic operator failed");
    return f.solve(load);
}

EllipticSolution solve(const DiscreteOperator& op, const GridFunction& g, double mu) {
    if (g.values.size() != op.nodes()) throw ContractViolation("solve: load dimension mismatch");
    const Eigen::VectorXd load = op.restrict_load(op.M_full * g.values);
    LdltTridiag storage;
    const LdltTridiag& f = factor_for(op, mu, storage);
    if (!f.ok()) throw SingularOperator("factorization of the elliptic operator failed");
    Eigen::VectorXd d = f.solve(load);
    const SymTridiag T = mu == 0.0 ? op.A : lincomb(1.0, op.A, mu, op.M);
    // One step of iterative refinement keeps the residual at rounding level.
    d += f.solve(load - T * d);
    // normwise backward error; ||T d - b|| / ||b|| is swamped by rounding in T d when T has 1/eps entries
    double tn = 0.0;
    for (Eigen::Index i = 0; i < T.size(); ++i) {
        double row = std::abs(T.diag[i]);
        if (i > 0) row += std::abs(T.off[i - 1]);
        if (i + 1 < T.size()) row += std::abs(T.off[i]);
        tn = std::max(tn, row);
    }
    const double scale = tn * d.lpNorm<Eigen::Infinity>() + load.lpNorm<Eigen::Infinity>();
    const double res = scale > 0.0 ? (T * d - load).lpNorm<Eigen::Infinity>() / scale : 0.0;
    EllipticSolution s;
    s.dofs = d;
    s.u = GridFunction{op.mesh, op.embed(d), op.kind == OperatorKind::limit ? Space::constrained : Space::full};
    s.residual = res;
    s.kind = op.kind;
    return s;
}

double solution_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const GridFunction& g) {
    const Mesh& m = *eps_op.mesh;
    if (m.has_geometry) {
        const double g0 = g.values[m.i_x1];
        for (Eigen::Index i = m.i_x1; i <= m.i_x2; ++i)
            if (std::abs(g.values[i] - g0) > 1e-12)
                throw PreconditionViolation("load is not constant on Omega_0");
    }
    const EllipticSolution ue = solve(eps_op, g);
    const EllipticSolution u0 = solve(limit_op, g);
    return eps_op.energy_nodal(ue.u.values - u0.u.values);
}

namespace {

// Energy form of `op` on nodal vectors, sum_e k_e (du_e)^2 + u^T R u.
SymTridiag nodal_energy(const DiscreteOperator& op) {
    SymTridiag E = op.R_full;
    for (Eigen::Index e = 0; e < op.k_elem.size(); ++e) {
        E.diag[e] += op.k_elem[e];
        E.diag[e + 1] += op.k_elem[e];
        E.off[e] -= op.k_elem[e];
    }
    return E;
}

// Nodal solution of `op` for a nodal load vector.
Eigen::VectorXd solve_nodal(const DiscreteOperator& op, const LdltTridiag& f, const Eigen::VectorXd& load) {
    return op.embed(f.solve(op.restrict_load(load)));
}

// D g for a dof vector g of the constrained space (nodal result).
Eigen::VectorXd apply_D(const DiscreteOperator& e, const DiscreteOperator& z, const LdltTridiag& fe,
                        const LdltTridiag& f0, const Eigen::VectorXd& g) {
    const Eigen::VectorXd Bg = z.embed(g);
    const Eigen::VectorXd ue = solve_nodal(e, fe, e.M_full * Bg);
    const Eigen::VectorXd u0 = f0.solve(z.M * g);
    return ue - z.embed(u0);
}

// D^T y for a nodal y (dof result).
Eigen::VectorXd apply_Dt(const DiscreteOperator& e, const DiscreteOperator& z, const LdltTridiag& fe,
                         const LdltTridiag& f0, const Eigen::VectorXd& y) {
    const Eigen::VectorXd a = z.restrict_load(e.M_full * solve_nodal(e, fe, y));
    const Eigen::VectorXd b = z.M * f0.solve(z.restrict_load(y));
    return a - b;
}

}  // namespace

OperatorNormResult shifted_diff_norm(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, double mu) {
    if (mu < 0.0) throw ContractViolation("shifted_diff_norm: mu must be >= 0");
    if (eps_op.mesh != limit_op.mesh) throw ContractViolation("operators must share a mesh");
    LdltTridiag se, s0;
    const LdltTridiag& fe = factor_for(eps_op, mu, se);
    const LdltTridiag& f0 = factor_for(limit_op, mu, s0);
    if (!fe.ok() || !f0.ok()) throw SingularOperator("factorization failed");
    const LdltTridiag m0(limit_op.M);
    const Eigen::Index n = limit_op.dim();
    const SymTridiag E = nodal_energy(eps_op);

    // Lanczos for T = M0^{-1} D^T E D, self-adjoint in the M0 inner product.
    auto apply_T = [&](const Eigen::VectorXd& q) {
        const Eigen::VectorXd d = apply_D(eps_op, limit_op, fe, f0, q);
        const Eigen::VectorXd Ed = E * d;
        return m0.solve(apply_Dt(eps_op, limit_op, fe, f0, Ed));
    };
    const int max_it = static_cast<int>(std::min<Eigen::Index>(n, 80));
    std::vector<Eigen::VectorXd> Q;
    std::vector<double> alpha, beta;
    Eigen::VectorXd q = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] += 0.1 * std::cos(1.7 * i);
    q /= std::sqrt(q.dot(limit_op.M * q));
    double prev = -1.0;
    double theta = 0.0;
    int it = 0;
    for (; it < max_it; ++it) {
        Q.push_back(q);
        Eigen::VectorXd w = apply_T(q);
        const double a = q.dot(limit_op.M * w);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : Q) w -= v.dot(limit_op.M * w) * v;
        const double b = std::sqrt(std::max(0.0, w.dot(limit_op.M * w)));
        Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(alpha.size(), alpha.size());
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            Tm(i, i) = alpha[i];
            if (i + 1 < alpha.size()) Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
        }
        theta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Tm, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
        if (prev >= 0.0 && std::abs(theta - prev) <= 1e-14 * std::max(theta, 1e-300)) break;
        if (!(b > 1e-14 * std::max(std::abs(theta), 1e-300))) break;
        prev = theta;
        beta.push_back(b);
        q = w / b;
    }
    if (it == max_it && max_it < n) {
        if (std::abs(theta - prev) > 1e-10 * std::max(theta, 1e-300))
            throw NumericalFailure("operator-norm Lanczos did not converge after " + std::to_string(it) + " iterations");
    }
    return {std::sqrt(std::max(0.0, theta)), it + 1};
}

double solution_op_diff_norm(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op) {
    return shifted_diff_norm(eps_op, limit_op, 0.0).value;
}

double shifted_diff_norm_dense(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, double mu) {
    const Eigen::Index N = eps_op.nodes();
    if (N > 2000) throw ContractViolation("dense operator norm limited to small meshes");
    auto basis = [N](const DiscreteOperator& op) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, op.dim());
        for (Eigen::Index j = 0; j < op.dim(); ++j) B.col(j) = op.embed(Eigen::VectorXd::Unit(op.dim(), j));
        return B;
    };
    const Eigen::MatrixXd Be = basis(eps_op), B = basis(limit_op);
    const Eigen::MatrixXd Ae = eps_op.A.dense() + mu * eps_op.M.dense();
    const Eigen::MatrixXd A0 = limit_op.A.dense() + mu * limit_op.M.dense();
    const Eigen::MatrixXd Mf = eps_op.M_full.dense();
    const Eigen::MatrixXd M0 = limit_op.M.dense();
    const Eigen::MatrixXd D = Be * Ae.ldlt().solve(Be.transpose() * Mf * B) - B * A0.ldlt().solve(M0);
    const Eigen::MatrixXd G = D.transpose() * nodal_energy(eps_op).dense() * D;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(G, M0, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

std::vector<GridFunction> test_loads(std::shared_ptr<const Mesh> mesh, int count) {
    const Mesh& m = *mesh;
    const Eigen::Index N = m.nodes();
    // L^2 norm through the P1 mass matrix.
    SymTridiag Mm(N);
    for (Eigen::Index e = 0; e + 1 < N; ++e) {
        const double h = m.h(e);
        Mm.diag[e] += h / 3.0;
        Mm.diag[e + 1] += h / 3.0;
        Mm.off[e] = h / 6.0;
    }
    std::vector<GridFunction> out;
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd g(N);
        for (Eigen::Index i = 0; i < N; ++i) g[i] = std::cos(k * std::numbers::pi * m.x[i]);
        if (m.has_geometry) {
            const double avg = omega0_average(m, g);
            for (Eigen::Index i = m.i_x1; i <= m.i_x2; ++i) g[i] = avg;
        }
        g /= std::sqrt(Mm.quad(g));
        out.push_back(GridFunction{mesh, g, Space::full});
    }
    return out;
}

}  // namespace lld
