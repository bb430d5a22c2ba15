#pragma once

#include <span>
#include <string>
#include <vector>

namespace lld {

enum class NonlinFamily { cubic, tanh_saturated, custom };

/// Reaction term f with a smooth cutoff. Inside [-K/2, K/2] f is the raw
/// formula; outside, the argument is squashed by a C^2 tanh map into (-K, K),
/// so the result is bounded and globally Lipschitz.
///
///   cubic           f(u) = a u - b u^3          params [a, b]
///   tanh-saturated  f(u) = a tanh(u) - b u      params [a, b]
///   custom          f(u) = sum_k c_k u^k        params [c0, c1, ...]
class Nonlinearity {
public:
    Nonlinearity();
    Nonlinearity(NonlinFamily family, std::vector<double> params, double cutoff_K);

    static Nonlinearity zero(double cutoff_K = 4.0);
    static Nonlinearity parse_family(const std::string& name, std::vector<double> params, double cutoff_K);

    NonlinFamily family() const { return family_; }
    std::string family_name() const;
    const std::vector<double>& params() const { return params_; }
    double cutoff_K() const { return K_; }
    bool is_zero() const;

    double raw(double u) const;
    double raw_prime(double u) const;

    double operator()(double u) const;
    double prime(double u) const;

    /// value[i] = f(u[i]), deriv[i] = f'(u[i]).
    void evaluate(std::span<const double> u, std::span<double> value, std::span<double> deriv) const;

    /// Sampled sup |f| and sup |f'| over the real line.
    double sup_bound() const;
    double lipschitz_bound() const;

private:
    double squash(double u, double& ds) const;

    NonlinFamily family_;
    std::vector<double> params_;
    std::vector<double> poly_;
    double K_;
};

}  // namespace lld
