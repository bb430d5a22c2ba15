#include "lld/semigroup.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lld/errors.hpp"
#include "lld/galerkin.hpp"

namespace lld {

std::string to_string(Scheme s) { return s == Scheme::implicit_euler ? "implicit-euler" : "imex-cn"; }

Scheme scheme_from_string(const std::string& name) {
    if (name == "implicit-euler") return Scheme::implicit_euler;
    if (name == "imex-cn") return Scheme::imex_cn;
    throw ConfigError("unknown scheme '" + name + "'");
}

namespace {

class Stepper {
public:
    Stepper(const DiscreteOperator& op, const Nonlinearity& f, Scheme scheme)
        : op_(op), f_(f), scheme_(scheme), zero_f_(f.is_zero()) {}

    void set_dt(double dt) {
        if (dt == dt_) return;
        dt_ = dt;
        const double theta = scheme_ == Scheme::implicit_euler ? 1.0 : 0.5;
        lhs_ = LdltTridiag(lincomb(1.0, op_.M, theta * dt, op_.A));
        if (!lhs_.ok()) throw StiffnessError("time-step matrix not positive definite");
    }

    Eigen::VectorXd load(const Eigen::VectorXd& u) const {
        return zero_f_ ? Eigen::VectorXd(Eigen::VectorXd::Zero(u.size())) : nonlinear_load(op_, f_, u);
    }

    // One step; F_prev is the load at the previous step (imex-cn), or empty.
    Eigen::VectorXd step(const Eigen::VectorXd& u, const Eigen::VectorXd& Fu, const Eigen::VectorXd* F_prev) const {
        Eigen::VectorXd rhs = op_.M * u;
        if (scheme_ == Scheme::implicit_euler) {
            rhs += dt_ * Fu;
        } else {
            rhs -= 0.5 * dt_ * (op_.A * u);
            if (F_prev)
                rhs += dt_ * (1.5 * Fu - 0.5 * *F_prev);
            else
                rhs += dt_ * Fu;
        }
        lhs_.solve_in_place(rhs);
        return rhs;
    }

private:
    const DiscreteOperator& op_;
    const Nonlinearity& f_;
    Scheme scheme_;
    bool zero_f_;
    double dt_ = -1.0;
    LdltTridiag lhs_;
};

}  // namespace

struct Integrator::Impl {
    Stepper st;
    Eigen::VectorXd u, F, F_prev;
    double dt;
    double t = 0.0;
    long k = 0;
    Impl(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, const FlowConfig& flow)
        : st(op, f, flow.scheme), u(u0), dt(flow.dt) {
        st.set_dt(dt);
        F = st.load(u);
    }
};

Integrator::Integrator(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, const FlowConfig& flow)
    : impl_(std::make_unique<Impl>(op, f, u0, flow)) {
    if (u0.size() != op.dim()) throw ContractViolation("Integrator: dimension mismatch");
}

Integrator::~Integrator() = default;

void Integrator::step() {
    Impl& s = *impl_;
    Eigen::VectorXd next = s.st.step(s.u, s.F, s.k > 0 ? &s.F_prev : nullptr);
    s.F_prev = std::move(s.F);
    s.u = std::move(next);
    s.F = s.st.load(s.u);
    ++s.k;
    s.t = s.k * s.dt;
}

const Eigen::VectorXd& Integrator::state() const { return impl_->u; }

double Integrator::time() const { return impl_->t; }

Eigen::VectorXd step_to(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, double t,
                        const FlowConfig& flow, const StepObserver& observer) {
    if (t < 0.0) throw ContractViolation("step_to: t must be >= 0");
    if (!(flow.dt > 0.0)) throw ContractViolation("step_to: dt must be positive");
    if (u0.size() != op.dim()) throw ContractViolation("step_to: dimension mismatch");
    Eigen::VectorXd u = u0;
    if (t == 0.0) return u;
    Stepper st(op, f, flow.scheme);

    if (flow.tolerance <= 0.0) {
        const long steps = std::max(1L, static_cast<long>(std::ceil(t / flow.dt - 1e-9)));
        const double dt = t / steps;
        st.set_dt(dt);
        Eigen::VectorXd F = st.load(u), F_prev;
        for (long k = 0; k < steps; ++k) {
            Eigen::VectorXd next = st.step(u, F, k > 0 ? &F_prev : nullptr);
            F_prev = std::move(F);
            u = std::move(next);
            F = st.load(u);
            if (observer) observer((k + 1) * dt, u);
        }
        return u;
    }

    // Step doubling; the multistep history restarts after every rejection.
    double time = 0.0;
    double dt = flow.dt;
    Eigen::VectorXd F = st.load(u), F_prev;
    bool have_prev = false;
    while (time < t * (1.0 - 1e-14)) {
        const double h_try = std::min(dt, t - time);
        int halvings = 0;
        double h = h_try;
        for (;;) {
            st.set_dt(h);
            const Eigen::VectorXd full = st.step(u, F, have_prev ? &F_prev : nullptr);
            st.set_dt(0.5 * h);
            const Eigen::VectorXd half1 = st.step(u, F, nullptr);
            const Eigen::VectorXd half2 = st.step(half1, st.load(half1), &F);
            const double err = (full - half2).cwiseAbs().maxCoeff();
            if (err <= flow.tolerance) {
                st.set_dt(h);
                F_prev = F;
                u = full;
                F = st.load(u);
                have_prev = true;
                time += h;
                if (observer) observer(time, u);
                break;
            }
            if (++halvings > 20) throw StiffnessError("step rejected after 20 halvings at t=" + std::to_string(time));
            h *= 0.5;
            have_prev = false;
        }
    }
    return u;
}

GridFunction step_to(const DiscreteOperator& op, const Nonlinearity& f, const GridFunction& u0, double t,
                     const FlowConfig& flow) {
    const Eigen::VectorXd d = step_to(op, f, op.to_dofs(u0.values), t, flow);
    return GridFunction{op.mesh, op.embed(d), u0.space};
}

Eigen::VectorXd expm_oracle(const DiscreteOperator& op, const Eigen::VectorXd& u0, double t) {
    if (op.dim() > 513) throw ContractViolation("expm_oracle: dimension above the dense guard (n <= 512)");
    if (t == 0.0) return u0;
    const Eigen::MatrixXd M = op.M.dense();
    const Eigen::MatrixXd A = op.A.dense();
    const Eigen::LLT<Eigen::MatrixXd> llt(M);
    const Eigen::MatrixXd L = llt.matrixL();
    // C = L^{-1} A L^{-T}; e^{-tM^{-1}A} = L^{-T} e^{-tC} L^T.
    const Eigen::MatrixXd Linv_A = L.triangularView<Eigen::Lower>().solve(A);
    const Eigen::MatrixXd C = L.triangularView<Eigen::Lower>().solve(Linv_A.transpose()).transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (C + C.transpose()));
    const Eigen::VectorXd y = L.transpose() * u0;
    const Eigen::VectorXd z = es.eigenvectors() * ((-t * es.eigenvalues().array()).exp().matrix().cwiseProduct(es.eigenvectors().transpose() * y));
    return L.transpose().triangularView<Eigen::Upper>().solve(z);
}

double time_one_diff(const DiscreteOperator& eps_op, const DiscreteOperator& limit_op, const Nonlinearity& f,
                     const Eigen::VectorXd& w0, const FlowConfig& flow, double t) {
    const Eigen::VectorXd we = step_to(eps_op, f, limit_op.embed(w0), t, flow);
    const Eigen::VectorXd w0t = step_to(limit_op, f, w0, t, flow);
    return eps_op.energy_nodal(we - limit_op.embed(w0t));
}

double trajectory_sup(const DiscreteOperator& op, const Nonlinearity& f, const Eigen::VectorXd& u0, double t,
                      const FlowConfig& flow) {
    double m = op.embed(u0).cwiseAbs().maxCoeff();
    step_to(op, f, u0, t, flow, [&](double, const Eigen::VectorXd& u) { m = std::max(m, u.cwiseAbs().maxCoeff()); });
    return m;
}

}  // namespace lld
