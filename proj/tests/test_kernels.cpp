#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "lld/kernels.hpp"

namespace k = lld::kernels;

namespace {

std::vector<double> rnd(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 67, 1000, 1025};

}  // namespace

TEST_CASE("scalar kernels match direct formulas", "[kernels]") {
    std::mt19937_64 rng(7);
    const auto& s = k::scalar();
    for (std::size_t n : {1ul, 5ul, 33ul}) {
        auto a = rnd(rng, n), b = rnd(rng, n);
        double ref = 0;
        for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
        CHECK(s.dot(a, b) == Catch::Approx(ref).margin(1e-14));

        auto diag = rnd(rng, n), off = rnd(rng, n - 1);
        std::vector<double> y(n);
        s.tridiag_matvec(diag, off, a, y);
        double q = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = diag[i] * a[i];
            if (i > 0) r += off[i - 1] * a[i - 1];
            if (i + 1 < n) r += off[i] * a[i + 1];
            CHECK(y[i] == Catch::Approx(r).margin(1e-14));
            q += a[i] * r;
        }
        CHECK(s.tridiag_quadform(diag, off, a) == Catch::Approx(q).margin(1e-13));
    }
}

TEST_CASE("gauss kernels integrate polynomials exactly", "[kernels]") {
    // nodal u = x on a nonuniform mesh; int u phi_i and int u phi_i phi_j have closed forms
    std::mt19937_64 rng(11);
    const auto& s = k::scalar();
    const std::size_t ne = 13;
    std::vector<double> x(ne + 1), h(ne);
    x[0] = 0;
    auto steps = rnd(rng, ne, 0.5, 1.5);
    for (std::size_t e = 0; e < ne; ++e) x[e + 1] = x[e] + steps[e];
    for (std::size_t e = 0; e < ne; ++e) h[e] = x[e + 1] - x[e];
    std::vector<double> gv(3 * ne);
    s.gauss_values(x, gv);
    for (std::size_t e = 0; e < ne; ++e)
        for (int q = 0; q < 3; ++q) CHECK(gv[q * ne + e] == Catch::Approx(x[e] + k::kGaussNode[q] * h[e]));

    std::vector<double> load(ne + 1, 0.0);
    s.gauss_load(gv, h, load);
    for (std::size_t i = 0; i <= ne; ++i) {
        // int x phi_i over element [a,b] with phi_i rising: h (a + 2b) / 6
        double ref = 0;
        if (i > 0) ref += h[i - 1] * (x[i - 1] + 2 * x[i]) / 6;
        if (i < ne) ref += h[i] * (2 * x[i] + x[i + 1]) / 6;
        CHECK(load[i] == Catch::Approx(ref).epsilon(1e-13));
    }

    std::vector<double> d(ne + 1, 0.0), o(ne, 0.0);
    s.gauss_weighted_mass(gv, h, d, o);
    for (std::size_t e = 0; e < ne; ++e) {
        // int x phi_a phi_b on [a,b]: h (a + b) / 12
        CHECK(o[e] == Catch::Approx(h[e] * (x[e] + x[e + 1]) / 12).epsilon(1e-13));
    }
    double ref0 = h[0] * (3 * x[0] + x[1]) / 12;
    CHECK(d[0] == Catch::Approx(ref0).epsilon(1e-13));
}

TEST_CASE("poly_eval matches Horner by hand", "[kernels]") {
    const std::vector<double> c{1.0, -2.0, 0.5, 3.0};
    const std::vector<double> x{-2.0, -0.5, 0.0, 0.25, 1.0, 2.0, 3.5, 4.0, 5.0};
    std::vector<double> v(x.size()), dv(x.size());
    k::scalar().poly_eval(c, x, v, dv);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i];
        CHECK(v[i] == Catch::Approx(1 - 2 * t + 0.5 * t * t + 3 * t * t * t));
        CHECK(dv[i] == Catch::Approx(-2 + t + 9 * t * t));
    }
}

TEST_CASE("avx2 kernels agree with scalar reference", "[kernels][simd]") {
    const auto* v = k::avx2();
    if (!v) SKIP("AVX2 unavailable");
    const auto& s = k::scalar();
    std::mt19937_64 rng(2024);
    for (std::size_t n : kSizes) {
        CAPTURE(n);
        auto a = rnd(rng, n), b = rnd(rng, n);
        const double ds = s.dot(a, b), dv = v->dot(a, b);
        CHECK(std::abs(ds - dv) <= 1e-13 * (1.0 + n));

        auto y1 = rnd(rng, n), y2 = y1;
        s.axpy(0.37, a, y1);
        v->axpy(0.37, a, y2);
        CHECK(max_abs_diff(y1, y2) <= 1e-15);

        if (n >= 1) {
            auto diag = rnd(rng, n), off = rnd(rng, n - 1);
            std::vector<double> m1(n), m2(n);
            s.tridiag_matvec(diag, off, a, m1);
            v->tridiag_matvec(diag, off, a, m2);
            CHECK(max_abs_diff(m1, m2) <= 1e-14);
            CHECK(std::abs(s.tridiag_quadform(diag, off, a) - v->tridiag_quadform(diag, off, a)) <= 1e-13 * (1.0 + n));
        }

        const std::vector<double> c{0.0, 1.0, 0.0, -1.0};
        std::vector<double> p1(n), p2(n), q1(n), q2(n);
        s.poly_eval(c, a, p1, q1);
        v->poly_eval(c, a, p2, q2);
        CHECK(max_abs_diff(p1, p2) <= 1e-15);
        CHECK(max_abs_diff(q1, q2) <= 1e-15);

        if (n >= 2) {
            const std::size_t ne = n - 1;
            auto h = rnd(rng, ne, 1e-3, 2e-3);
            std::vector<double> g1(3 * ne), g2(3 * ne);
            s.gauss_values(a, g1);
            v->gauss_values(a, g2);
            CHECK(max_abs_diff(g1, g2) <= 1e-15);
            std::vector<double> l1(n, 0.0), l2(n, 0.0);
            s.gauss_load(g1, h, l1);
            v->gauss_load(g1, h, l2);
            CHECK(max_abs_diff(l1, l2) <= 1e-17);
            std::vector<double> d1(n, 0.0), d2(n, 0.0), o1(ne, 0.0), o2(ne, 0.0);
            s.gauss_weighted_mass(g1, h, d1, o1);
            v->gauss_weighted_mass(g1, h, d2, o2);
            CHECK(max_abs_diff(d1, d2) <= 1e-17);
            CHECK(max_abs_diff(o1, o2) <= 1e-17);
        }
    }
}

TEST_CASE("active table is one of the two implementations", "[kernels]") {
    const auto& a = k::active();
    CHECK((a.name == "scalar" || a.name == "avx2"));
}
