#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lld/fem.hpp"
#include "lld/nonlinearity.hpp"

namespace lld {

inline constexpr double kHyperbolicMargin = 1e-3;

struct HyperbolicityReport {
    std::vector<double> head;  // first eigenvalues of A - f'(u_*)
    double margin = 0.0;       // min |eigenvalue|
    int morse_index = 0;
};

struct Equilibrium {
    GridFunction u;          // nodal values
    Eigen::VectorXd dofs;    // coordinates of the operator it solves
    double eps = 0.0;
    int morse_index = 0;
    std::vector<double> spectrum_head;
    double margin = 0.0;
    double residual = 0.0;   // dual energy norm of A u - F(u)
    int iterations = 0;
};

/// Newton on A u - F(u) = 0 with Jacobian A - M_{f'}; backtracking on the
/// residual. Throws NonConvergence (carrying the last iterate) after 50 steps.
Equilibrium newton(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u_init, double tol = 1e-10);

HyperbolicityReport hyperbolicity(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& dofs,
                                  int head = 6);

struct SeedSpec {
    int grid_points = 17;
    double perturbation = 0.1;
    double dedup_distance = 1e-6;
    double margin = kHyperbolicMargin;
};

/// All equilibria reachable from constant seeds on [-K, K] and their
/// +-perturbation along phi_1. Sorted by the value at x = 0.
std::vector<Equilibrium> find_all_limit(const DiscreteOperator& limit_op, const Nonlinearity& f, const SeedSpec& seeds = {});
/// Same search for any operator (used for consistency checks).
std::vector<Equilibrium> find_all(const DiscreteOperator& op, const Nonlinearity& f, const SeedSpec& seeds = {});

/// Half the minimal pairwise energy distance (infinite for a single equilibrium).
double default_delta(const DiscreteOperator& limit_op, const std::vector<Equilibrium>& set);

/// Newton for the perturbed operator from the embedded limit equilibrium;
/// UniquenessViolation if the result leaves the delta ball.
Equilibrium continue_to_eps(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const Nonlinearity& f,
                            const Equilibrium& u0, double delta);

/// Distance in the eps energy norm between a perturbed equilibrium and an embedded limit one.
double equilibrium_distance(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const Equilibrium& ue,
                            const Equilibrium& u0);

}  // namespace lld
