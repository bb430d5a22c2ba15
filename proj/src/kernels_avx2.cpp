// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include "lld/kernels.hpp"

#include <immintrin.h>

namespace lld::kernels::detail {

const KernelTable& scalar_table();

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), s1);
        s2 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 8), _mm256_loadu_pd(pb + i + 8), s2);
        s3 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 12), _mm256_loadu_pd(pb + i + 12), s3);
    }
    for (; i + 4 <= n; i += 4)
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), s0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
    for (; i < n; ++i) s += pa[i] * pb[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i),
                                                       _mm256_loadu_pd(y.data() + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void tridiag_matvec(std::span<const double> diag, std::span<const double> off,
                    std::span<const double> x, std::span<double> y) {
    const std::size_t n = diag.size();
    if (n < 3) {
        scalar_table().tridiag_matvec(diag, off, x, y);
        return;
    }
    const double* d = diag.data();
    const double* o = off.data();
    const double* px = x.data();
    double* py = y.data();
    py[0] = d[0] * px[0] + o[0] * px[1];
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(px + i));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(o + i - 1), _mm256_loadu_pd(px + i - 1), acc);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(o + i), _mm256_loadu_pd(px + i + 1), acc);
        _mm256_storeu_pd(py + i, acc);
    }
    for (; i + 1 < n; ++i) py[i] = o[i - 1] * px[i - 1] + d[i] * px[i] + o[i] * px[i + 1];
    py[n - 1] = o[n - 2] * px[n - 2] + d[n - 1] * px[n - 1];
}

double tridiag_quadform(std::span<const double> diag, std::span<const double> off,
                        std::span<const double> x) {
    const std::size_t n = diag.size();
    const double* d = diag.data();
    const double* o = off.data();
    const double* px = x.data();
    __m256d sd = _mm256_setzero_pd();
    __m256d so = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(px + i);
        sd = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(d + i), xv), xv, sd);
    }
    double s = hsum(sd);
    for (; i < n; ++i) s += d[i] * px[i] * px[i];
    const std::size_t m = off.size();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
        const __m256d a = _mm256_loadu_pd(px + j);
        const __m256d b = _mm256_loadu_pd(px + j + 1);
        so = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(o + j), a), b, so);
    }
    double t = hsum(so);
    for (; j < m; ++j) t += o[j] * px[j] * px[j + 1];
    return s + 2.0 * t;
}

void gauss_values(std::span<const double> nodal, std::span<double> out) {
    const std::size_t ne = nodal.size() - 1;
    const double* u = nodal.data();
    for (int q = 0; q < 3; ++q) {
        const double w1 = kGaussNode[q];
        const double w0 = 1.0 - w1;
        const __m256d v0 = _mm256_set1_pd(w0);
        const __m256d v1 = _mm256_set1_pd(w1);
        double* o = out.data() + q * ne;
        std::size_t e = 0;
        for (; e + 4 <= ne; e += 4) {
            const __m256d a = _mm256_loadu_pd(u + e);
            const __m256d b = _mm256_loadu_pd(u + e + 1);
            _mm256_storeu_pd(o + e, _mm256_fmadd_pd(v0, a, _mm256_mul_pd(v1, b)));
        }
        for (; e < ne; ++e) o[e] = w0 * u[e] + w1 * u[e + 1];
    }
}

void poly_eval(std::span<const double> c, std::span<const double> x, std::span<double> v,
               std::span<double> d) {
    const std::size_t deg = c.size() - 1;
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        __m256d p = _mm256_set1_pd(c[deg]);
        __m256d dp = _mm256_setzero_pd();
        for (std::size_t k = deg; k-- > 0;) {
            dp = _mm256_fmadd_pd(dp, xv, p);
            p = _mm256_fmadd_pd(p, xv, _mm256_set1_pd(c[k]));
        }
        _mm256_storeu_pd(v.data() + i, p);
        _mm256_storeu_pd(d.data() + i, dp);
    }
    if (i < n)
        scalar_table().poly_eval(c, x.subspan(i), v.subspan(i), d.subspan(i));
}

// Per-element moments: left = sum_q w_q (1-s_q) g_q, right = sum_q w_q s_q g_q.
inline void element_moments(const double* g, std::size_t ne, std::size_t e, __m256d& left,
                            __m256d& right) {
    left = _mm256_setzero_pd();
    right = _mm256_setzero_pd();
    for (int q = 0; q < 3; ++q) {
        const __m256d gq = _mm256_loadu_pd(g + q * ne + e);
        left = _mm256_fmadd_pd(_mm256_set1_pd(kGaussWeight[q] * (1.0 - kGaussNode[q])), gq, left);
        right = _mm256_fmadd_pd(_mm256_set1_pd(kGaussWeight[q] * kGaussNode[q]), gq, right);
    }
}

void gauss_load(std::span<const double> gv, std::span<const double> hv, std::span<double> load) {
    const std::size_t ne = hv.size();
    if (ne < 8) {
        scalar_table().gauss_load(gv, hv, load);
        return;
    }
    const double* g = gv.data();
    const double* h = hv.data();
    auto left_of = [&](std::size_t e) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += kGaussWeight[q] * (1.0 - kGaussNode[q]) * g[q * ne + e];
        return h[e] * s;
    };
    auto right_of = [&](std::size_t e) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += kGaussWeight[q] * kGaussNode[q] * g[q * ne + e];
        return h[e] * s;
    };
    load[0] = left_of(0);
    std::size_t i = 1;
    // load[i] = h[i] * left_i + h[i-1] * right_{i-1}
    for (; i + 4 <= ne; i += 4) {
        __m256d l, r, lp, rp;
        element_moments(g, ne, i, l, r);
        element_moments(g, ne, i - 1, lp, rp);
        const __m256d acc = _mm256_fmadd_pd(_mm256_loadu_pd(h + i), l,
                                            _mm256_mul_pd(_mm256_loadu_pd(h + i - 1), rp));
        _mm256_storeu_pd(load.data() + i, acc);
    }
    for (; i < ne; ++i) load[i] = left_of(i) + right_of(i - 1);
    load[ne] = right_of(ne - 1);
}

void gauss_weighted_mass(std::span<const double> gv, std::span<const double> hv,
                         std::span<double> diag, std::span<double> off) {
    const std::size_t ne = hv.size();
    if (ne < 8) {
        scalar_table().gauss_weighted_mass(gv, hv, diag, off);
        return;
    }
    const double* g = gv.data();
    const double* h = hv.data();
    double ca[3], cb[3], cc[3];
    for (int q = 0; q < 3; ++q) {
        const double s = kGaussNode[q];
        ca[q] = kGaussWeight[q] * (1.0 - s) * (1.0 - s);
        cb[q] = kGaussWeight[q] * (1.0 - s) * s;
        cc[q] = kGaussWeight[q] * s * s;
    }
    auto moment = [&](const double* coef, std::size_t e) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += coef[q] * g[q * ne + e];
        return h[e] * s;
    };
    auto vmoment = [&](const double* coef, std::size_t e) {
        __m256d s = _mm256_setzero_pd();
        for (int q = 0; q < 3; ++q)
            s = _mm256_fmadd_pd(_mm256_set1_pd(coef[q]), _mm256_loadu_pd(g + q * ne + e), s);
        return _mm256_mul_pd(_mm256_loadu_pd(h + e), s);
    };
    diag[0] = moment(ca, 0);
    std::size_t i = 1;
    for (; i + 4 <= ne; i += 4)
        _mm256_storeu_pd(diag.data() + i, _mm256_add_pd(vmoment(ca, i), vmoment(cc, i - 1)));
    for (; i < ne; ++i) diag[i] = moment(ca, i) + moment(cc, i - 1);
    diag[ne] = moment(cc, ne - 1);
    std::size_t e = 0;
    for (; e + 4 <= ne; e += 4) _mm256_storeu_pd(off.data() + e, vmoment(cb, e));
    for (; e < ne; ++e) off[e] = moment(cb, e);
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2",          &dot,      &axpy,       &tridiag_matvec,
                                   &tridiag_quadform, &gauss_values, &poly_eval, &gauss_load,
                                   &gauss_weighted_mass};
    return table;
}

}  // namespace lld::kernels::detail
