#pragma once

// Data-parallel inner loops of the solver. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant; the variant is selected
// once at startup from CPUID (override with LLD_SIMD=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace lld::kernels {

/// Three-point Gauss rule on the reference element [0,1].
inline constexpr double kGaussNode[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
inline constexpr double kGaussWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct KernelTable {
    std::string_view name;

    double (*dot)(std::span<const double> a, std::span<const double> b);

    // y += alpha * x
    void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);

    // y = T x for the symmetric tridiagonal T = tri(off, diag, off).
    void (*tridiag_matvec)(std::span<const double> diag, std::span<const double> off,
                           std::span<const double> x, std::span<double> y);

    // x^T T x
    double (*tridiag_quadform)(std::span<const double> diag, std::span<const double> off,
                               std::span<const double> x);

    // Values of a P1 function at the Gauss points of each element.
    // out has 3 * ne entries laid out point-major: out[q * ne + e].
    void (*gauss_values)(std::span<const double> nodal, std::span<double> out);

    // Horner evaluation of p(x) = sum c_k x^k and p'(x) for every entry of x.
    void (*poly_eval)(std::span<const double> coeffs, std::span<const double> x,
                      std::span<double> value, std::span<double> deriv);

    // Load vector F_i = int g phi_i from point-major Gauss values of g.
    void (*gauss_load)(std::span<const double> gvals, std::span<const double> h,
                       std::span<double> load);

    // Weighted mass tri(off, diag, off) with entries int g phi_i phi_j.
    void (*gauss_weighted_mass)(std::span<const double> gvals, std::span<const double> h,
                                std::span<double> diag, std::span<double> off);
};

/// Table chosen for this process.
const KernelTable& active();

/// Portable reference kernels.
const KernelTable& scalar();

/// AVX2 kernels, or nullptr when the CPU or build lacks them.
const KernelTable* avx2();

}  // namespace lld::kernels
