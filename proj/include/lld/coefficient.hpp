#pragma once

#include <string>
#include <vector>

namespace lld {

/// Smooth scalar coefficient on [0,1], parsed from "const:<v>" or "poly:[a0,a1,...]".
class Coefficient {
public:
    Coefficient() : coeffs_{0.0} {}
    static Coefficient constant(double v);
    static Coefficient polynomial(std::vector<double> coeffs);
    static Coefficient parse(const std::string& spec);

    double operator()(double x) const;
    double derivative(double x) const;

    bool is_constant() const;
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::string spec() const;

    /// Exact average over [a, b].
    double average(double a, double b) const;

private:
    std::vector<double> coeffs_;
};

}  // namespace lld
