#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lld/coefficient.hpp"
#include "lld/nonlinearity.hpp"

namespace lld {

enum class ProfileKind { ramp, smooth_ramp, offset_ramp, custom_table };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct ProfileSpec {
    ProfileKind kind = ProfileKind::ramp;
    Coefficient p0 = Coefficient::constant(1.0);
    double alpha = 1.0;              // offset-ramp: p0 + eps^alpha on Omega_1
    std::vector<double> table;       // custom-table: layer shape g on [0,1], g(0)=0, g(1)=1
};

struct ProblemConfig {
    double lambda = 0.1;
    Coefficient c = Coefficient::polynomial({0.0, 1.0});
    double m0 = 0.1;
    double x1 = 0.3;
    double x2 = 0.7;
    double eps0 = 0.1;
    Nonlinearity f = Nonlinearity(NonlinFamily::cubic, {1.0, 1.0}, 4.0);
    ProfileSpec profile;

    double q(double x) const { return lambda + c(x); }
    /// Average of c over Omega_0 = (x1, x2).
    double c_omega0() const { return c.average(x1, x2); }
};

/// p_eps: p0 on Omega_1 (plus eps^alpha for offset-ramp), 1/eps on the core
/// [x1+eps, x2-eps], blended across [x1, x1+eps] and [x2-eps, x2].
class DiffusionProfile {
public:
    DiffusionProfile(ProfileSpec spec, double x1, double x2, double eps);

    ProfileKind kind() const { return spec_.kind; }
    double eps() const { return eps_; }
    double x1() const { return x1_; }
    double x2() const { return x2_; }
    double core_floor() const { return 1.0 / eps_; }
    const ProfileSpec& spec() const { return spec_; }

    double operator()(double x) const;
    double p0(double x) const { return spec_.p0(x); }

    /// Breakpoints of p_eps inside (0,1): x1, x1+eps, x2-eps, x2.
    std::vector<double> breakpoints() const;

    /// Layer Omega_eps = [x1-eps, x1] U [x2, x2+eps] used by the extension operator.
    double layer_left() const { return x1_ - eps_; }
    double layer_right() const { return x2_ + eps_; }

private:
    double shape(double s) const;
    double omega1_value(double x) const;

    ProfileSpec spec_;
    double x1_, x2_, eps_;
};

DiffusionProfile make_profile(const ProblemConfig& config, ProfileKind kind, double eps, const Coefficient& p0);
DiffusionProfile make_profile(const ProblemConfig& config, double eps);

/// Number of points of the deterministic sup-norm grid.
inline constexpr int kSupGrid = 10000;

/// sup over a uniform grid of Omega_1 of |p_eps - p0|.
double p_dist(const DiffusionProfile& profile, int samples = kSupGrid);

struct TauValue {
    double tau;
    double tau_log;
    bool log_disabled;  // tau >= 1: tau_log reported as tau
};

TauValue tau_of(double p_dist_value, double eps);
TauValue tau(const DiffusionProfile& profile);

struct Violation {
    std::string inequality;
    double x;      // worst grid point (NaN when not spatial)
    double value;  // offending value
};

std::vector<Violation> check_config(const ProblemConfig& config);
std::vector<Violation> check_admissible(const DiffusionProfile& profile, const ProblemConfig& config);
/// Same checks for an arbitrary diffusion function on the geometry of `profile`.
std::vector<Violation> check_admissible(const DiffusionProfile& profile, const std::function<double(double)>& p_eps,
                                        const ProblemConfig& config);

/// l = int_0^1 p^{-1/2}, composite Simpson on 10^4 panels.
double sturm_length(const DiffusionProfile& profile);

}  // namespace lld
