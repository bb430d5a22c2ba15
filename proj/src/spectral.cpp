#include "lld/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "lld/errors.hpp"

namespace lld {

namespace {

double m_dot(const SymTridiag& M, const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(M * b); }

void m_orthonormalize(const SymTridiag& M, std::vector<Eigenpair>& pairs, std::size_t begin) {
    for (std::size_t j = begin; j < pairs.size(); ++j) {
        Eigen::VectorXd& v = pairs[j].vector;
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < j; ++i) v -= m_dot(M, pairs[i].vector, v) * pairs[i].vector;
        v /= std::sqrt(m_dot(M, v, v));
    }
}

}  // namespace

std::vector<Eigenpair> pencil_eigenpairs(const SymTridiag& K, const SymTridiag& M, int count, int first) {
    const Eigen::Index n = K.size();
    if (first < 0 || count < 0 || first + count > n) throw ContractViolation("pencil_eigenpairs: index range");
    std::vector<Eigenpair> out;
    out.reserve(count);
    double lo0, hi0;
    pencil_bounds(K, M, lo0, hi0);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double eps = std::numeric_limits<double>::epsilon();

    for (int j = first; j < first + count; ++j) {
        double lo = lo0, hi = hi0;
        if (!out.empty()) lo = std::max(lo0, out.back().value - 1e-12 * std::max(1.0, std::abs(out.back().value)));
        for (int it = 0; it < 300; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (hi - lo <= 4.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
            if (sturm_count(K, M, mid) > j)
                hi = mid;
            else
                lo = mid;
        }
        const double lam = 0.5 * (lo + hi);

        const double scale = std::max(1.0, std::abs(lam));
        const double shift = lam + 64.0 * eps * scale;
        const LuTridiag lu(lincomb(1.0, K, -shift, M));
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) x[i] = unif(rng);
        // Previously found vectors in the same cluster are projected out.
        auto deflate = [&](Eigen::VectorXd& v) {
            for (const Eigenpair& p : out)
                if (std::abs(p.value - lam) <= 1e-6 * scale) v -= m_dot(M, p.vector, v) * p.vector;
        };
        for (int it = 0; it < 4; ++it) {
            deflate(x);
            x = lu.solve(M * x);
            deflate(x);
            const double nrm = std::sqrt(m_dot(M, x, x));
            if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalFailure("inverse iteration broke down at index " + std::to_string(j));
            x /= nrm;
        }
        const Eigen::VectorXd r = K * x - lam * (M * x);
        const double res = r.norm() / std::max(1.0, (K * x).norm());
        if (!(res < 1e-6)) {
            std::ostringstream os;
            os << "eigenpair " << j << " did not converge: relative residual " << res;
            throw NumericalFailure(os.str());
        }
        out.push_back(Eigenpair{j, lam, std::move(x), 0.0});
    }
    m_orthonormalize(M, out, 0);
    return out;
}

std::vector<Eigenpair> eigenpairs(const DiscreteOperator& op, int k) {
    if (4 * k > op.dim()) throw ContractViolation("eigenpairs: k exceeds dim/4");
    auto pairs = pencil_eigenpairs(op.A, op.M, k);
    for (auto& p : pairs) p.eps = op.eps;
    return pairs;
}

std::vector<double> eigenvalues(const DiscreteOperator& op, int k) {
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) v[i] = pencil_eigenvalue(op.A, op.M, i);
    return v;
}

std::vector<GapRow> gap_profile(const DiscreteOperator& op, int k, double l) {
    if (k < 5) throw ContractViolation("gap_profile: k must be at least 5");
    const auto lam = eigenvalues(op, k + 2);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    std::vector<GapRow> rows;
    for (int i = 5; i <= k; ++i) {
        const double gap = lam[i + 1] - lam[i];
        rows.push_back({i, gap, gap / ((2.0 * i + 1.0) * pi2 / (l * l))});
    }
    return rows;
}

double eigenvalue_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, int i) {
    auto check = [i](const std::vector<double>& v, const char* which) {
        const double left = i > 0 ? v[i] - v[i - 1] : std::numeric_limits<double>::infinity();
        const double right = v[i + 1] - v[i];
        if (std::min(left, right) <= 1e-6) {
            std::ostringstream os;
            os << "eigenvalue " << i << " of the " << which
               << " operator is not simple (gap " << std::min(left, right) << "); use a cluster distance";
            throw AmbiguityError(os.str());
        }
    };
    const auto a = eigenvalues(eps_op, i + 2);
    const auto b = eigenvalues(limit_op, i + 2);
    check(a, "perturbed");
    check(b, "limit");
    return std::abs(a[i] - b[i]);
}

Eigen::VectorXd Projection::coords(const Eigen::VectorXd& v) const { return Phi.transpose() * (M * v); }

Eigen::VectorXd Projection::apply(const Eigen::VectorXd& v) const { return Phi * coords(v); }

Eigen::VectorXd Projection::complement(const Eigen::VectorXd& v) const { return v - apply(v); }

Projection spectral_projection(const DiscreteOperator& op, int m) {
    if (m < 1 || m + 1 > op.dim()) throw ContractViolation("spectral_projection: bad rank");
    const int extra = static_cast<int>(std::min<Eigen::Index>(op.dim(), m + 3));
    const auto vals = eigenvalues(op, extra);
    if (!(vals[m - 1] < vals[m] - 1e-8)) {
        std::ostringstream os;
        os << "no spectral gap at m=" << m << "; nearby gaps:";
        for (int i = std::max(0, m - 3); i + 1 < extra; ++i) os << " [" << i << "] " << vals[i + 1] - vals[i];
        throw CutSelectionError(os.str());
    }
    const auto pairs = pencil_eigenpairs(op.A, op.M, m);
    Projection q;
    q.m = m;
    q.Phi.resize(op.dim(), m);
    q.values.resize(m);
    for (int i = 0; i < m; ++i) {
        q.Phi.col(i) = pairs[i].vector;
        q.values[i] = pairs[i].value;
    }
    q.next_value = vals[m];
    q.M = op.M;
    return q;
}

double subspace_sine(const DiscreteOperator& eps_op, const Projection& q_eps, const DiscreteOperator& limit_op,
                     const Projection& q_0) {
    const int m = q_eps.m;
    Eigen::MatrixXd B0(eps_op.nodes(), q_0.m);
    for (int j = 0; j < q_0.m; ++j) B0.col(j) = limit_op.embed(q_0.Phi.col(j));
    Eigen::MatrixXd C(m, q_0.m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < q_0.m; ++j) C(i, j) = q_eps.Phi.col(i).dot(eps_op.M_full * Eigen::VectorXd(B0.col(j)));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const double smin = svd.singularValues().minCoeff();
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

double projection_diff(const DiscreteOperator& eps_op, const Projection& q_eps, const DiscreteOperator& limit_op,
                       const Projection& q_0, const Eigen::VectorXd& v) {
    const Eigen::VectorXd pe = q_eps.apply(v);
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(v.size());
    const Eigen::VectorXd Mv = eps_op.M_full * v;
    for (int j = 0; j < q_0.m; ++j) {
        const Eigen::VectorXd b = limit_op.embed(q_0.Phi.col(j));
        p0 += b.dot(Mv) * b;
    }
    return eps_op.energy_nodal(pe - p0);
}

}  // namespace lld
