#include "lld/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lld/errors.hpp"

namespace lld {

std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::ramp: return "ramp";
    case ProfileKind::smooth_ramp: return "smooth-ramp";
    case ProfileKind::offset_ramp: return "offset-ramp";
    case ProfileKind::custom_table: return "custom-table";
    }
    return "ramp";
}

ProfileKind profile_kind_from_string(const std::string& name) {
    if (name == "ramp") return ProfileKind::ramp;
    if (name == "smooth-ramp") return ProfileKind::smooth_ramp;
    if (name == "offset-ramp") return ProfileKind::offset_ramp;
    if (name == "custom-table") return ProfileKind::custom_table;
    throw ConfigError("profile.kind: unknown kind '" + name + "'");
}

DiffusionProfile::DiffusionProfile(ProfileSpec spec, double x1, double x2, double eps)
    : spec_(std::move(spec)), x1_(x1), x2_(x2), eps_(eps) {
    if (spec_.kind == ProfileKind::custom_table) {
        const auto& t = spec_.table;
        if (t.size() < 2) throw ConfigError("profile.table needs at least two entries");
        if (std::abs(t.front()) > 1e-12 || std::abs(t.back() - 1.0) > 1e-12)
            throw ConfigError("profile.table must start at 0 and end at 1");
        for (double g : t)
            if (g < 0.0 || g > 1.0) throw ConfigError("profile.table entries must lie in [0,1]");
    }
}

double DiffusionProfile::shape(double s) const {
    switch (spec_.kind) {
    case ProfileKind::smooth_ramp: return s * s * (3.0 - 2.0 * s);
    case ProfileKind::custom_table: {
        const auto& t = spec_.table;
        const double pos = s * static_cast<double>(t.size() - 1);
        const std::size_t k = std::min(static_cast<std::size_t>(pos), t.size() - 2);
        const double w = pos - static_cast<double>(k);
        return (1.0 - w) * t[k] + w * t[k + 1];
    }
    default: return s;
    }
}

double DiffusionProfile::omega1_value(double x) const {
    double v = spec_.p0(x);
    if (spec_.kind == ProfileKind::offset_ramp) v += std::pow(eps_, spec_.alpha);
    return v;
}

double DiffusionProfile::operator()(double x) const {
    if (x <= x1_ || x >= x2_) return omega1_value(x);
    const double top = 1.0 / eps_;
    if (x < x1_ + eps_) {
        const double a = omega1_value(x1_);
        return a + (top - a) * shape((x - x1_) / eps_);
    }
    if (x > x2_ - eps_) {
        const double b = omega1_value(x2_);
        return b + (top - b) * shape((x2_ - x) / eps_);
    }
    return top;
}

std::vector<double> DiffusionProfile::breakpoints() const { return {x1_, x1_ + eps_, x2_ - eps_, x2_}; }

DiffusionProfile make_profile(const ProblemConfig& config, ProfileKind kind, double eps, const Coefficient& p0) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive (got " + std::to_string(eps) + ")");
    if (eps > config.eps0) throw ConfigError("eps exceeds eps0 (" + std::to_string(eps) + " > " + std::to_string(config.eps0) + ")");
    const double bound = std::min({config.x1, 1.0 - config.x2, 0.5 * (config.x2 - config.x1)});
    if (!(eps < bound))
        throw ConfigError("eps must be below min(x1, 1-x2, (x2-x1)/2) = " + std::to_string(bound));
    ProfileSpec spec = config.profile;
    spec.kind = kind;
    spec.p0 = p0;
    return DiffusionProfile(std::move(spec), config.x1, config.x2, eps);
}

DiffusionProfile make_profile(const ProblemConfig& config, double eps) {
    return make_profile(config, config.profile.kind, eps, config.profile.p0);
}

double p_dist(const DiffusionProfile& profile, int samples) {
    // Omega_1 = [0, x1] U [x2, 1]; points split in proportion to length.
    const double len1 = profile.x1();
    const double len2 = 1.0 - profile.x2();
    const int n1 = std::max(2, static_cast<int>(std::lround(samples * len1 / (len1 + len2))));
    const int n2 = std::max(2, samples - n1);
    double worst = 0.0;
    for (int i = 0; i < n1; ++i) {
        const double x = len1 * i / (n1 - 1);
        worst = std::max(worst, std::abs(profile(x) - profile.p0(x)));
    }
    for (int i = 0; i < n2; ++i) {
        const double x = profile.x2() + len2 * i / (n2 - 1);
        worst = std::max(worst, std::abs(profile(x) - profile.p0(x)));
    }
    return worst;
}

TauValue tau_of(double p_dist_value, double eps) {
    const double t = std::sqrt(p_dist_value + eps);
    if (t >= 1.0) return {t, t, true};
    return {t, t * std::abs(std::log(t)), false};
}

TauValue tau(const DiffusionProfile& profile) { return tau_of(p_dist(profile), profile.eps()); }

std::vector<Violation> check_config(const ProblemConfig& config) {
    std::vector<Violation> out;
    const double nan = std::nan("");
    if (!(config.m0 > 0.0)) out.push_back({"m0 > 0", nan, config.m0});
    if (!(0.0 < config.x1 && config.x1 < config.x2 && config.x2 < 1.0))
        out.push_back({"0 < x1 < x2 < 1", nan, config.x2 - config.x1});
    if (!(config.eps0 > 0.0 && config.eps0 < 1.0)) out.push_back({"0 < eps0 < 1", nan, config.eps0});
    double worst_x = 0.0, worst = 1e300;
    for (int i = 0; i < kSupGrid; ++i) {
        const double x = static_cast<double>(i) / (kSupGrid - 1);
        const double v = config.q(x);
        if (v < worst) {
            worst = v;
            worst_x = x;
        }
    }
    if (!(worst >= config.m0) || !(worst > 0.0)) out.push_back({"lambda + c(x) >= m0 > 0", worst_x, worst});
    const double K = config.f.cutoff_K();
    const double rp = config.f.raw(K) / K;
    const double rm = config.f.raw(-K) / (-K);
    if (!(rp < 0.0)) out.push_back({"f(K)/K < 0 (dissipativity)", K, rp});
    if (!(rm < 0.0)) out.push_back({"f(-K)/(-K) < 0 (dissipativity)", -K, rm});
    return out;
}

std::vector<Violation> check_admissible(const DiffusionProfile& profile, const ProblemConfig& config) {
    return check_admissible(profile, [&](double x) { return profile(x); }, config);
}

std::vector<Violation> check_admissible(const DiffusionProfile& profile, const std::function<double(double)>& p_eps,
                                        const ProblemConfig& config) {
    std::vector<Violation> out = check_config(config);
    const double eps = profile.eps();
    double floor_worst = 1e300, floor_x = 0.0;
    double m0_worst = 1e300, m0_x = 0.0;
    double p0_worst = 1e300, p0_x = 0.0;
    for (int i = 0; i < kSupGrid; ++i) {
        const double x = static_cast<double>(i) / (kSupGrid - 1);
        const double p = p_eps(x);
        if (x >= profile.x1() + eps && x <= profile.x2() - eps && p < floor_worst) {
            floor_worst = p;
            floor_x = x;
        }
        if (p < m0_worst) {
            m0_worst = p;
            m0_x = x;
        }
        if ((x <= profile.x1() || x >= profile.x2()) && profile.p0(x) < p0_worst) {
            p0_worst = profile.p0(x);
            p0_x = x;
        }
    }
    // The core may fall between grid points for tiny eps; sample its midpoint too.
    const double mid = 0.5 * (profile.x1() + profile.x2());
    if (p_eps(mid) < floor_worst) {
        floor_worst = p_eps(mid);
        floor_x = mid;
    }
    if (floor_worst < 1.0 / eps * (1.0 - 1e-12)) out.push_back({"p_eps >= 1/eps on [x1+eps, x2-eps]", floor_x, floor_worst});
    if (m0_worst < config.m0) out.push_back({"p_eps >= m0 on [0,1]", m0_x, m0_worst});
    if (p0_worst < config.m0) out.push_back({"p0 >= m0 on Omega_1", p0_x, p0_worst});
    return out;
}

double sturm_length(const DiffusionProfile& profile) {
    const int panels = kSupGrid;
    const double h = 1.0 / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = i * h;
        s += (1.0 / std::sqrt(profile(a)) + 4.0 / std::sqrt(profile(a + 0.5 * h)) + 1.0 / std::sqrt(profile(a + h))) * h / 6.0;
    }
    return s;
}

}  // namespace lld
