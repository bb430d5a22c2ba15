#pragma once

#include <vector>

#include <Eigen/Core>

#include "lld/fem.hpp"

namespace lld {

struct Eigenpair {
    int index = 0;
    double value = 0.0;
    Eigen::VectorXd vector;  // dof coordinates, M-normalized
    double eps = 0.0;
};

/// Eigenpairs first..first+count-1 (ascending) of the pencil (K, M):
/// Sturm bisection for the values, inverse iteration for the vectors.
std::vector<Eigenpair> pencil_eigenpairs(const SymTridiag& K, const SymTridiag& M, int count, int first = 0);

/// First k eigenpairs of (A, M). Requires k <= dim/4.
std::vector<Eigenpair> eigenpairs(const DiscreteOperator& op, int k);

/// First k eigenvalues only.
std::vector<double> eigenvalues(const DiscreteOperator& op, int k);

struct GapRow {
    int i;
    double gap;
    double model_ratio;  // gap / ((2i+1) pi^2 / l^2)
};

/// Gaps lambda_{i+1} - lambda_i for i = 5..k with ratios to the
/// constant-coefficient model with Sturm length l.
std::vector<GapRow> gap_profile(const DiscreteOperator& op, int k, double l);

/// |lambda_i^eps - lambda_i^0|; AmbiguityError when either eigenvalue is
/// within 1e-6 of a neighbour.
double eigenvalue_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, int i);

/// M-orthogonal spectral projection onto the first m eigenvectors.
struct Projection {
    int m = 0;
    Eigen::MatrixXd Phi;     // dof coordinates, M-orthonormal columns
    Eigen::VectorXd values;  // lambda_0..lambda_{m-1}
    double next_value = 0.0; // lambda_m
    SymTridiag M;

    Eigen::VectorXd coords(const Eigen::VectorXd& v) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::VectorXd complement(const Eigen::VectorXd& v) const;
};

/// Requires lambda_{m-1} < lambda_m - 1e-8, otherwise CutSelectionError.
Projection spectral_projection(const DiscreteOperator& op, int m);

/// Sine of the largest principal angle between span(Phi_eps) and
/// span(B Phi_0), measured in the nodal L^2 (mass) inner product.
double subspace_sine(const DiscreteOperator& eps_op, const Projection& q_eps, const DiscreteOperator& limit_op,
                     const Projection& q_0);

/// ||(Q_eps - Q_0) v|| in the energy norm of eps_op, for a nodal vector v.
double projection_diff(const DiscreteOperator& eps_op, const Projection& q_eps, const DiscreteOperator& limit_op,
                       const Projection& q_0, const Eigen::VectorXd& v_nodal);

}  // namespace lld
