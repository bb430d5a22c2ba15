#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "lld/fem.hpp"
#include "lld/nonlinearity.hpp"

namespace lld {

enum class Scheme { implicit_euler, imex_cn };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct FlowConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::implicit_euler;
    double t_final = 1.0;
    double tolerance = 0.0;  // > 0 enables step-doubling acceptance
};

/// Called after each accepted step with (t, state in dof coordinates).
using StepObserver = std::function<void(double, const Eigen::VectorXd&)>;

/// Fixed-step integrator exposing its state between steps.
class Integrator {
public:
    Integrator(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, const FlowConfig& flow);
    ~Integrator();
    Integrator(const Integrator&) = delete;
    Integrator& operator=(const Integrator&) = delete;

    void step();
    const Eigen::VectorXd& state() const;
    double time() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Approximates T(t) u0 for u_t + A u = f(u). The linear part is implicit and
/// f explicit: implicit Euler (first order) or Crank-Nicolson with AB2 for f.
/// With a tolerance, each step is compared against two half steps and halved
/// until accepted; more than 20 halvings raise StiffnessError.
Eigen::VectorXd step_to(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, double t,
                        const FlowConfig& flow, const StepObserver& observer = {});

GridFunction step_to(const DiscreteOperator& op, const Nonlinearity& f, const GridFunction& u0, double t,
                     const FlowConfig& flow);

/// Dense e^{-tA} u0 through the Cholesky-symmetrized generator (dim <= 512).
Eigen::VectorXd expm_oracle(const DiscreteOperator& op, const Eigen::VectorXd& u0, double t);

/// ||T_eps(1) B w0 - B T_0(1) w0|| in the eps energy norm; w0 in limit dofs.
double time_one_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const Nonlinearity& f,
                     const Eigen::VectorXd& w0, const FlowConfig& flow, double t = 1.0);

/// Largest sup-norm along the trajectory from u0 sampled every step.
double trajectory_sup(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, double t,
                      const FlowConfig& flow);

}  // namespace lld
