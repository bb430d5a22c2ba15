#pragma once

#include <Eigen/Core>

#include "lld/fem.hpp"

namespace lld {

struct EllipticSolution {
    GridFunction u;   // nodal values (embedded for the limit operator)
    Eigen::VectorXd dofs;
    double residual = 0.0;  // normwise backward error of the algebraic system
    OperatorKind kind = OperatorKind::perturbed;
};

/// Galerkin solution of (mu M + A) u = M g. For the limit operator the load
/// is B^T M g, i.e. g is L^2-projected onto the constrained test space.
EllipticSolution solve(const DiscreteOperator& op, const GridFunction& g, double mu = 0.0);

/// Solve (mu M + A) d = load for a dof-coordinate load vector.
Eigen::VectorXd solve_dofs(const DiscreteOperator& op, const Eigen::VectorXd& load, double mu = 0.0);

/// ||u^eps - B u^0|| in the eps energy norm. g must be constant on Omega_0.
double solution_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const GridFunction& g);

struct OperatorNormResult {
    double value = 0.0;
    int iterations = 0;
};

/// Norm of g -> (mu+A_eps)^{-1} g - (mu+A_0)^{-1} g from the constrained L^2
/// unit ball into the eps energy space: sqrt of the largest eigenvalue of
/// D^T (S+R) D against the constrained mass, by M-inner-product Lanczos.
OperatorNormResult shifted_diff_norm(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, double mu);
double solution_op_diff_norm(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op);

/// Dense evaluation of the same operator norm (small meshes only).
double shifted_diff_norm_dense(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, double mu);

/// Deterministic unit-L^2 loads constant on Omega_0: the constant and
/// cos(k pi x) for k = 1..count-1, each made constant on Omega_0 by its average.
std::vector<GridFunction> test_loads(std::shared_ptr<const Mesh> mesh, int count);

}  // namespace lld
