#include "lld/coefficient.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "lld/errors.hpp"

namespace lld {

Coefficient Coefficient::constant(double v) { return polynomial({v}); }

Coefficient Coefficient::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw ConfigError("polynomial coefficient needs at least one term");
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    Coefficient c;
    c.coeffs_ = std::move(coeffs);
    return c;
}

Coefficient Coefficient::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("coefficient '" + spec + "': expected const:<v> or poly:[...]");
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    try {
        if (kind == "const") {
            std::size_t used = 0;
            const double v = std::stod(body, &used);
            if (body.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(body);
            return constant(v);
        }
        if (kind == "poly") {
            const auto arr = nlohmann::json::parse(body);
            if (!arr.is_array()) throw std::invalid_argument(body);
            return polynomial(arr.get<std::vector<double>>());
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("coefficient '" + spec + "': malformed value");
    }
    throw ConfigError("coefficient '" + spec + "': unknown kind '" + kind + "'");
}

double Coefficient::operator()(double x) const {
    double p = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) p = p * x + coeffs_[k];
    return p;
}

double Coefficient::derivative(double x) const {
    double dp = 0.0;
    double p = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
        dp = dp * x + p;
        p = p * x + coeffs_[k];
    }
    return dp;
}

bool Coefficient::is_constant() const { return coeffs_.size() == 1; }

std::string Coefficient::spec() const {
    std::ostringstream os;
    os.precision(17);
    if (is_constant()) {
        os << "const:" << coeffs_[0];
        return os.str();
    }
    os << "poly:[";
    for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
    os << "]";
    return os.str();
}

double Coefficient::average(double a, double b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        const double e = static_cast<double>(k + 1);
        s += coeffs_[k] * (std::pow(b, e) - std::pow(a, e)) / e;
    }
    return s / (b - a);
}

}  // namespace lld
