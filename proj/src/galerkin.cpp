#include "lld/galerkin.hpp"

#include <cmath>
#include <span>

#include "lld/kernels.hpp"

namespace lld {

namespace {
std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
}  // namespace

Eigen::VectorXd nonlinear_load(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& dofs,
                               SymTridiag* jac) {
    const auto& kt = kernels::active();
    const Eigen::VectorXd u = op.embed(dofs);
    const Eigen::Index N = u.size();
    const Eigen::Index ne = N - 1;
    Eigen::VectorXd ug(3 * ne), fg(3 * ne), dg(3 * ne);
    kt.gauss_values(view(u), view(ug));
    f.evaluate(view(ug), view(fg), view(dg));
    Eigen::VectorXd load(N);
    kt.gauss_load(view(fg), view(op.h_elem), view(load));
    if (jac) {
        SymTridiag J(N);
        kt.gauss_weighted_mass(view(dg), view(op.h_elem), view(J.diag), view(J.off));
        *jac = op.collapse(J);
    }
    return op.restrict_load(load);
}

double dual_energy_norm(const DiscreteOperator& op, const Eigen::VectorXd& r) {
    return std::sqrt(std::max(0.0, r.dot(op.A_factor().solve(r))));
}

}  // namespace lld
