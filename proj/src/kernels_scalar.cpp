#include "lld/kernels.hpp"

namespace lld::kernels::detail {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i)
        y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
    y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

double tridiag_quadform(std::span<const double> diag, std::span<const double> off,
                        std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) s += diag[i] * x[i] * x[i];
    double t = 0.0;
    for (std::size_t i = 0; i < off.size(); ++i) t += off[i] * x[i] * x[i + 1];
    return s + 2.0 * t;
}

void gauss_values(std::span<const double> nodal, std::span<double> out) {
    const std::size_t ne = nodal.size() - 1;
    for (int q = 0; q < 3; ++q) {
        const double w1 = kGaussNode[q];
        const double w0 = 1.0 - w1;
        double* o = out.data() + q * ne;
        for (std::size_t e = 0; e < ne; ++e) o[e] = w0 * nodal[e] + w1 * nodal[e + 1];
    }
}

void poly_eval(std::span<const double> c, std::span<const double> x, std::span<double> v,
               std::span<double> d) {
    const std::size_t deg = c.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double p = c[deg];
        double dp = 0.0;
        for (std::size_t k = deg; k-- > 0;) {
            dp = dp * x[i] + p;
            p = p * x[i] + c[k];
        }
        v[i] = p;
        d[i] = dp;
    }
}

void gauss_load(std::span<const double> g, std::span<const double> h, std::span<double> load) {
    const std::size_t ne = h.size();
    for (std::size_t i = 0; i <= ne; ++i) load[i] = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
        double left = 0.0, right = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double wg = kGaussWeight[q] * g[q * ne + e];
            left += wg * (1.0 - kGaussNode[q]);
            right += wg * kGaussNode[q];
        }
        load[e] += h[e] * left;
        load[e + 1] += h[e] * right;
    }
}

void gauss_weighted_mass(std::span<const double> g, std::span<const double> h,
                         std::span<double> diag, std::span<double> off) {
    const std::size_t ne = h.size();
    for (std::size_t i = 0; i <= ne; ++i) diag[i] = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
        double a = 0.0, b = 0.0, c = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double s = kGaussNode[q];
            const double wg = kGaussWeight[q] * g[q * ne + e];
            a += wg * (1.0 - s) * (1.0 - s);
            b += wg * (1.0 - s) * s;
            c += wg * s * s;
        }
        diag[e] += h[e] * a;
        diag[e + 1] += h[e] * c;
        off[e] = h[e] * b;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar",        &dot,      &axpy,       &tridiag_matvec,
                                   &tridiag_quadform, &gauss_values, &poly_eval, &gauss_load,
                                   &gauss_weighted_mass};
    return table;
}

}  // namespace lld::kernels::detail
