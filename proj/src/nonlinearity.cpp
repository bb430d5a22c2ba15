#include "lld/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "lld/errors.hpp"
#include "lld/kernels.hpp"

namespace lld {

Nonlinearity::Nonlinearity() : Nonlinearity(NonlinFamily::custom, {0.0}, 4.0) {}

Nonlinearity::Nonlinearity(NonlinFamily family, std::vector<double> params, double cutoff_K)
    : family_(family), params_(std::move(params)), K_(cutoff_K) {
    if (!(K_ > 0.0)) throw ConfigError("f.cutoff_K must be positive");
    switch (family_) {
    case NonlinFamily::cubic:
        if (params_.size() != 2) throw ConfigError("cubic nonlinearity takes params [a, b]");
        poly_ = {0.0, params_[0], 0.0, -params_[1]};
        break;
    case NonlinFamily::tanh_saturated:
        if (params_.size() != 2) throw ConfigError("tanh-saturated nonlinearity takes params [a, b]");
        break;
    case NonlinFamily::custom:
        if (params_.empty()) throw ConfigError("custom nonlinearity needs polynomial coefficients");
        poly_ = params_;
        break;
    }
}

Nonlinearity Nonlinearity::zero(double cutoff_K) { return Nonlinearity(NonlinFamily::custom, {0.0}, cutoff_K); }

Nonlinearity Nonlinearity::parse_family(const std::string& name, std::vector<double> params, double cutoff_K) {
    if (name == "cubic") return Nonlinearity(NonlinFamily::cubic, std::move(params), cutoff_K);
    if (name == "tanh-saturated") return Nonlinearity(NonlinFamily::tanh_saturated, std::move(params), cutoff_K);
    if (name == "custom") return Nonlinearity(NonlinFamily::custom, std::move(params), cutoff_K);
    if (name == "zero") return zero(cutoff_K);
    throw ConfigError("f.family: unknown family '" + name + "'");
}

std::string Nonlinearity::family_name() const {
    switch (family_) {
    case NonlinFamily::cubic: return "cubic";
    case NonlinFamily::tanh_saturated: return "tanh-saturated";
    case NonlinFamily::custom: return "custom";
    }
    return "custom";
}

bool Nonlinearity::is_zero() const {
    if (family_ == NonlinFamily::tanh_saturated) return params_[0] == 0.0 && params_[1] == 0.0;
    return std::all_of(poly_.begin(), poly_.end(), [](double c) { return c == 0.0; });
}

double Nonlinearity::raw(double u) const {
    if (family_ == NonlinFamily::tanh_saturated) return params_[0] * std::tanh(u) - params_[1] * u;
    double p = poly_.back();
    for (std::size_t k = poly_.size() - 1; k-- > 0;) p = p * u + poly_[k];
    return p;
}

double Nonlinearity::raw_prime(double u) const {
    if (family_ == NonlinFamily::tanh_saturated) {
        const double t = std::tanh(u);
        return params_[0] * (1.0 - t * t) - params_[1];
    }
    double dp = 0.0;
    double p = poly_.back();
    for (std::size_t k = poly_.size() - 1; k-- > 0;) {
        dp = dp * u + p;
        p = p * u + poly_[k];
    }
    return dp;
}

double Nonlinearity::squash(double u, double& ds) const {
    const double h = 0.5 * K_;
    if (std::abs(u) <= h) {
        ds = 1.0;
        return u;
    }
    const double t = std::tanh((std::abs(u) - h) / h);
    ds = 1.0 - t * t;
    return std::copysign(h + h * t, u);
}

double Nonlinearity::operator()(double u) const {
    double ds;
    return raw(squash(u, ds));
}

double Nonlinearity::prime(double u) const {
    double ds;
    const double s = squash(u, ds);
    return raw_prime(s) * ds;
}

void Nonlinearity::evaluate(std::span<const double> u, std::span<double> value, std::span<double> deriv) const {
    const std::size_t n = u.size();
    if (family_ == NonlinFamily::tanh_saturated) {
        for (std::size_t i = 0; i < n; ++i) {
            double ds;
            const double s = squash(u[i], ds);
            value[i] = raw(s);
            deriv[i] = raw_prime(s) * ds;
        }
        return;
    }
    const double h = 0.5 * K_;
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) inside = inside && std::abs(u[i]) <= h;
    if (inside) {
        kernels::active().poly_eval(poly_, u, value, deriv);
        return;
    }
    std::vector<double> s(n), ds(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = squash(u[i], ds[i]);
    kernels::active().poly_eval(poly_, s, value, deriv);
    for (std::size_t i = 0; i < n; ++i) deriv[i] *= ds[i];
}

double Nonlinearity::sup_bound() const {
    double m = 0.0;
    const int samples = 4001;
    for (int i = 0; i < samples; ++i) {
        const double u = -K_ + 2.0 * K_ * i / (samples - 1);
        m = std::max(m, std::abs(raw(u)));
    }
    return m;
}

double Nonlinearity::lipschitz_bound() const {
    double m = 0.0;
    const int samples = 4001;
    for (int i = 0; i < samples; ++i) {
        const double u = -2.0 * K_ + 4.0 * K_ * i / (samples - 1);
        m = std::max(m, std::abs(prime(u)));
    }
    return m;
}

}  // namespace lld
