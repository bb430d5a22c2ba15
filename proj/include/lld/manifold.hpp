#pragma once

#include <vector>

#include <Eigen/Core>

#include "lld/fem.hpp"
#include "lld/nonlinearity.hpp"
#include "lld/semigroup.hpp"
#include "lld/spectral.hpp"

namespace lld {

/// X = Y + Z with Y spanned by the first m eigenvectors.
struct SpectralSplit {
    const DiscreteOperator* op = nullptr;
    Projection proj;
    int m = 0;
    double beta = 0.0;     // largest slow eigenvalue, lambda_{m-1}
    double gamma = 0.0;    // fast decay, lambda_m
    double M_const = 1.0;  // modal semigroup bound in the energy norm

    /// Slow coordinates of the load, Phi^T F(Phi v + z).
    Eigen::VectorXd H(const Nonlinearity& f, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const;
    /// Fast part of the load, F - M Phi Phi^T F.
    Eigen::VectorXd G(const Nonlinearity& f, const Eigen::VectorXd& v, const Eigen::VectorXd& z) const;
    /// Phi v + z
    Eigen::VectorXd lift(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const;
    /// Remove the Y component (M-orthogonal).
    Eigen::VectorXd to_fast(const Eigen::VectorXd& u) const;
};

SpectralSplit split(const DiscreteOperator& op, int m);

struct GraphSpec {
    double rho = 1.0;          // box half-width in slow coordinates
    int nodes_per_axis = 33;
    double dt = 2e-3;          // step of the slow RK4 and fast BDF2 integrations
    double escape_factor = 2.0;
    double tol = 1e-6;
    int max_iterations = 60;
    double horizon = 0.0;      // 0: ln(10 D / tol) / gamma
    double Delta = 1.0;        // Lipschitz budget
};

/// Fast component s(v) on a tensor grid of [-rho, rho]^m, multilinear in
/// between; outside the box the argument is clamped to the box.
struct GraphFunction {
    int m = 1;
    double rho = 1.0;
    int npa = 2;
    std::vector<Eigen::VectorXd> values;  // dof coordinates, flat index axis 0 fastest
    double D = 0.0;
    double Delta = 1.0;

    int size() const { return static_cast<int>(values.size()); }
    Eigen::VectorXd node(int flat) const;
    Eigen::VectorXd eval(const Eigen::VectorXd& v) const;

    static GraphFunction zero(int m, double rho, int npa, Eigen::Index dim);
};

struct LpStep {
    GraphFunction graph;
    double sup_change = 0.0;
};

/// One Lyapunov-Perron sweep: per node, backward RK4 of v' = -Lambda v + H
/// over [-T_h, 0], then the fast equation M z' + A z = G integrated forward by
/// BDF2 from z(-T_h) = 0 (the truncated variation-of-constants integral).
LpStep lp_iterate(const SpectralSplit& sp, const Nonlinearity& f, const GraphFunction& s, double T_h, const GraphSpec& spec);

struct GraphResult {
    GraphFunction graph;
    double kappa = 0.0;  // max ratio of successive sup changes
    int iterations = 0;
    double horizon = 0.0;
    std::vector<double> sup_changes;
    double lipschitz = 0.0;
};

double horizon_for(const SpectralSplit& sp, const Nonlinearity& f, double tol);

/// Iterates from s = 0 until the sup change drops below tol; NoContraction if
/// a ratio of successive changes reaches 1.
GraphResult compute_graph(const SpectralSplit& sp, const Nonlinearity& f, const GraphSpec& spec);

/// Empirical Lipschitz constant of the graph over neighbouring grid nodes,
/// energy norm over energy norm.
double graph_lipschitz(const SpectralSplit& sp, const GraphFunction& g);

/// ||u - Phi v - s(v)|| with v the slow coordinates of u (dofs of sp.op).
double distance_to_graph(const SpectralSplit& sp, const GraphFunction& g, const Eigen::VectorXd& u);

/// Flow each grid point (v, s(v)) with |v| <= rho/ (1.05) for time t and
/// report the largest distance to the graph.
double invariance_residual(const SpectralSplit& sp, const Nonlinearity& f, const GraphFunction& g, double t,
                           const FlowConfig& flow);

/// Signs s_i with s_i phi_i^eps ~ B phi_i^0; AlignmentError if an overlap is below 0.5.
Eigen::VectorXd align_signs(const SpectralSplit& eps_split, const SpectralSplit& limit_split);

/// sup over the limit grid of ||(Phi_eps S v + s_eps(S v)) - B(Phi_0 v + s_0(v))||_eps.
double graph_diff(const SpectralSplit& eps_split, const GraphFunction& g_eps, const SpectralSplit& limit_split,
                  const GraphFunction& g_0);

}  // namespace lld
