#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lld/fem.hpp"
#include "lld/model.hpp"

namespace lldtest {

inline constexpr double kPi = std::numbers::pi;

// u_t - u_xx + q u on a uniform mesh.
inline lld::DiscreteOperator constant_op(int n, double p = 1.0, double q = 1.0) {
    auto mesh = std::make_shared<const lld::Mesh>(lld::uniform_mesh(n));
    return lld::assemble_coefficients(mesh, [p](double) { return p; }, [q](double) { return q; });
}

inline lld::ProblemConfig constant_config(double q, double p0 = 1.0) {
    lld::ProblemConfig c;
    c.lambda = q;
    c.c = lld::Coefficient::constant(0.0);
    c.m0 = std::min(q, p0) / 2;
    c.profile.p0 = lld::Coefficient::constant(p0);
    return c;
}

// Ascending eigenvalues of the dense pencil (K, M).
inline Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    return es.eigenvalues();
}

inline Eigen::VectorXd nodal(const lld::Mesh& mesh, double (*fn)(double)) {
    Eigen::VectorXd v(mesh.nodes());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = fn(mesh.x[i]);
    return v;
}

template <class F>
Eigen::VectorXd nodal(const lld::Mesh& mesh, F fn) {
    Eigen::VectorXd v(mesh.nodes());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = fn(mesh.x[i]);
    return v;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    Eigen::VectorXd v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace lldtest
