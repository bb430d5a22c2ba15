#include "lld/ratefit.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lld/errors.hpp"

namespace lld {

std::string to_string(RateModel m) { return m == RateModel::tau ? "tau" : "tau_log"; }

RateFit fit_rate(const std::vector<RateRow>& rows, RateModel model) {
    RateFit fit;
    fit.model = model;
    if (!rows.empty()) fit.quantity = rows.front().quantity;
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        const double a = model == RateModel::tau ? r.tau : r.tau_log;
        if (r.value > 0.0 && a > 0.0 && std::isfinite(r.value)) {
            xs.push_back(std::log(a));
            ys.push_back(std::log(r.value));
        } else {
            fit.excluded_eps.push_back(r.eps);
        }
    }
    if (xs.size() < 4) {
        std::ostringstream os;
        os << "fit for '" << fit.quantity << "' needs 4 positive rows, have " << xs.size() << "; excluded eps:";
        for (double e : fit.excluded_eps) os << ' ' << e;
        throw FitRejected(os.str());
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw FitRejected("fit for '" + fit.quantity + "': abscissa values are all equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.used = static_cast<int>(xs.size());
    return fit;
}

std::vector<RateRow> select(const std::vector<RateRow>& rows, const std::string& quantity) {
    std::vector<RateRow> out;
    for (const auto& r : rows)
        if (r.quantity == quantity) out.push_back(r);
    return out;
}

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os.precision(12);
    os << "eps,tau,tau_log,p_dist,quantity,value,mesh_n,dt\n";
    for (const auto& r : rows)
        os << r.eps << ',' << r.tau << ',' << r.tau_log << ',' << r.p_dist << ',' << r.quantity << ',' << r.value << ','
           << r.mesh_n << ',' << r.dt << '\n';
}

}  // namespace lld
