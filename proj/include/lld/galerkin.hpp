#pragma once

#include <Eigen/Core>

#include "lld/fem.hpp"
#include "lld/nonlinearity.hpp"

namespace lld {

/// Galerkin load F_i = int f(u_h) phi_i (3-point Gauss per element), in dof
/// coordinates of op. If jac is non-null it receives the weighted mass
/// int f'(u_h) phi_i phi_j, also in dof coordinates.
Eigen::VectorXd nonlinear_load(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& dofs,
                               SymTridiag* jac = nullptr);

/// Dual energy norm sqrt(r^T A^{-1} r) of a dof-coordinate residual.
double dual_energy_norm(const DiscreteOperator& op, const Eigen::VectorXd& r);

}  // namespace lld
