#include "lld/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "lld/kernels.hpp"

namespace lld {

namespace {
std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
}  // namespace

Eigen::VectorXd SymTridiag::operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    kernels::active().tridiag_matvec(view(diag), view(off), view(x),
                                     {y.data(), static_cast<std::size_t>(y.size())});
    return y;
}

double SymTridiag::quad(const Eigen::VectorXd& x) const {
    return kernels::active().tridiag_quadform(view(diag), view(off), view(x));
}

double SymTridiag::bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot((*this) * y);
}

Eigen::MatrixXd SymTridiag::dense() const {
    const Eigen::Index n = size();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) D(i, i) = diag[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) D(i, i + 1) = D(i + 1, i) = off[i];
    return D;
}

SymTridiag lincomb(double a, const SymTridiag& A, double b, const SymTridiag& B) {
    SymTridiag T;
    T.diag = a * A.diag + b * B.diag;
    T.off = a * A.off + b * B.off;
    return T;
}

LdltTridiag::LdltTridiag(const SymTridiag& T) {
    const Eigen::Index n = T.size();
    d_.resize(n);
    l_.resize(n > 0 ? n - 1 : 0);
    ok_ = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        double di = T.diag[i];
        if (i > 0) di -= l_[i - 1] * T.off[i - 1];
        if (!(di > 0.0) || !std::isfinite(di)) {
            ok_ = false;
            return;
        }
        d_[i] = di;
        if (i + 1 < n) l_[i] = T.off[i] / di;
    }
}

Eigen::VectorXd LdltTridiag::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = b;
    solve_in_place(x);
    return x;
}

void LdltTridiag::solve_in_place(Eigen::VectorXd& x) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
    for (Eigen::Index i = 0; i < n; ++i) x[i] /= d_[i];
    for (Eigen::Index i = n - 1; i-- > 0;) x[i] -= l_[i] * x[i + 1];
}

// Same elimination as LAPACK dgttrf.
LuTridiag::LuTridiag(const SymTridiag& T) {
    const Eigen::Index n = T.size();
    d_ = T.diag;
    dl_ = T.off;
    du_ = T.off;
    du2_ = Eigen::VectorXd::Zero(n > 1 ? n - 2 : 0);
    swapped_ = Eigen::VectorXi::Zero(n);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(T.diag[i]));
    for (Eigen::Index i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(T.off[i]));
    pert_ = std::max(scale, std::numeric_limits<double>::min()) * std::numeric_limits<double>::epsilon();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(d_[i]) >= std::abs(dl_[i])) {
            if (d_[i] == 0.0) {
                singular_ = true;
                continue;
            }
            const double fact = dl_[i] / d_[i];
            dl_[i] = fact;
            d_[i + 1] -= fact * du_[i];
        } else {
            const double fact = d_[i] / dl_[i];
            d_[i] = dl_[i];
            dl_[i] = fact;
            const double temp = du_[i];
            du_[i] = d_[i + 1];
            d_[i + 1] = temp - fact * d_[i + 1];
            if (i + 2 < n) {
                du2_[i] = du_[i + 1];
                du_[i + 1] = -fact * du_[i + 1];
            }
            swapped_[i] = 1;
        }
    }
    if (n > 0 && d_[n - 1] == 0.0) singular_ = true;
}

Eigen::VectorXd LuTridiag::solve(const Eigen::VectorXd& b) const {
    const Eigen::Index n = d_.size();
    Eigen::VectorXd x = b;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (swapped_[i]) {
            const double temp = x[i];
            x[i] = x[i + 1];
            x[i + 1] = temp - dl_[i] * x[i];
        } else {
            x[i + 1] -= dl_[i] * x[i];
        }
    }
    // Tiny pivots are perturbed to eps*||T|| so inverse iteration stays finite.
    auto pivot = [&](Eigen::Index i) {
        const double p = d_[i];
        if (std::abs(p) >= pert_) return p;
        return p < 0.0 ? -pert_ : pert_;
    };
    x[n - 1] /= pivot(n - 1);
    if (n > 1) x[n - 2] = (x[n - 2] - du_[n - 2] * x[n - 1]) / pivot(n - 2);
    for (Eigen::Index i = n - 2; i-- > 0;)
        x[i] = (x[i] - du_[i] * x[i + 1] - du2_[i] * x[i + 2]) / pivot(i);
    return x;
}

int sturm_count(const SymTridiag& K, const SymTridiag& M, double sigma) {
    const Eigen::Index n = K.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int count = 0;
    double d = 0.0;
    double prev_off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double di = K.diag[i] - sigma * M.diag[i];
        if (i > 0) di -= prev_off * prev_off / d;
        if (di == 0.0) di = -tiny;
        if (di < 0.0) ++count;
        d = di;
        if (i + 1 < n) prev_off = K.off[i] - sigma * M.off[i];
    }
    return count;
}

}  // namespace lld

namespace lld {

void pencil_bounds(const SymTridiag& K, const SymTridiag& M, double& lo, double& hi) {
    const Eigen::Index n = K.size();
    double scale = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = std::abs(K.diag[i]);
        if (i > 0) row += std::abs(K.off[i - 1]);
        if (i + 1 < n) row += std::abs(K.off[i]);
        double mrow = M.diag[i];
        if (i > 0) mrow -= std::abs(M.off[i - 1]);
        if (i + 1 < n) mrow -= std::abs(M.off[i]);
        // P1 mass rows are only weakly dominant; fall back to a third of the diagonal.
        mrow = std::max(mrow, M.diag[i] / 3.0);
        scale = std::max(scale, row / mrow);
    }
    lo = -scale;
    hi = scale;
    while (sturm_count(K, M, lo) > 0) lo *= 2.0;
    while (sturm_count(K, M, hi) < n) hi *= 2.0;
}

double pencil_eigenvalue(const SymTridiag& K, const SymTridiag& M, int index) {
    double lo, hi;
    pencil_bounds(K, M, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(K, M, mid) > index)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace lld
