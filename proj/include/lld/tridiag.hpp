#pragma once

#include <Eigen/Core>

namespace lld {

/// Symmetric tridiagonal matrix tri(off, diag, off).
struct SymTridiag {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    SymTridiag() = default;
    explicit SymTridiag(Eigen::Index n) : diag(Eigen::VectorXd::Zero(n)), off(Eigen::VectorXd::Zero(n > 0 ? n - 1 : 0)) {}

    Eigen::Index size() const { return diag.size(); }

    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    double quad(const Eigen::VectorXd& x) const;
    double bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    Eigen::MatrixXd dense() const;
};

/// a*A + b*B
SymTridiag lincomb(double a, const SymTridiag& A, double b, const SymTridiag& B);

/// LDL^T factorization without pivoting; only for positive definite input.
class LdltTridiag {
public:
    LdltTridiag() = default;
    explicit LdltTridiag(const SymTridiag& T);

    bool ok() const { return ok_; }
    Eigen::Index size() const { return d_.size(); }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    void solve_in_place(Eigen::VectorXd& b) const;

private:
    Eigen::VectorXd d_;
    Eigen::VectorXd l_;
    bool ok_ = false;
};

/// Gaussian elimination with partial pivoting for an indefinite tridiagonal.
class LuTridiag {
public:
    LuTridiag() = default;
    explicit LuTridiag(const SymTridiag& T);

    bool singular() const { return singular_; }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
    Eigen::VectorXd dl_, d_, du_, du2_;
    Eigen::VectorXi swapped_;
    double pert_ = 0.0;
    bool singular_ = false;
};

/// Number of eigenvalues of the pencil (K, M) strictly below sigma.
/// M must be positive definite.
int sturm_count(const SymTridiag& K, const SymTridiag& M, double sigma);

}  // namespace lld

namespace lld {

/// Eigenvalue number `index` (ascending, from 0) of the pencil (K, M) by
/// Sturm bisection. Relative accuracy close to machine precision.
double pencil_eigenvalue(const SymTridiag& K, const SymTridiag& M, int index);

/// Interval [lo, hi] containing the whole spectrum of (K, M).
void pencil_bounds(const SymTridiag& K, const SymTridiag& M, double& lo, double& hi);

}  // namespace lld
