#include "lld/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Core>

#include "json.hpp"
#include "lld/elliptic.hpp"
#include "lld/errors.hpp"
#include "lld/kernels.hpp"
#include "lld/manifold.hpp"
#include "lld/semigroup.hpp"
#include "lld/spectral.hpp"

namespace lld {

using json = nlohmann::ordered_json;

const std::vector<std::string> kSubcommands{"check",          "spectrum",        "elliptic-rate",
                                            "eigen-rate",     "equilibria-rate", "semigroup-rate",
                                            "manifold-rate",  "attractor-rate",  "all"};

bool ExperimentResult::pass() const {
    for (const auto& f : fits)
        if (f.enforced && !f.pass) return false;
    for (const auto& c : checks)
        if (c.enforced && !c.pass) return false;
    return true;
}

void ExperimentResult::merge(ExperimentResult other) {
    for (auto& s : other.subcommands) subcommands.push_back(std::move(s));
    for (auto& r : other.rows) rows.push_back(std::move(r));
    for (auto& f : other.fits) fits.push_back(std::move(f));
    for (auto& c : other.checks) checks.push_back(std::move(c));
}

namespace {

// Runs fn(0..n-1) on up to `threads` workers. The first exception by index is rethrown.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    std::size_t workers = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", eps);
    return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os << j.dump(2) << '\n';
}

void write_graph_csv(const std::string& path, const SpectralSplit& sp, const GraphFunction& g) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path);
    os.precision(12);
    for (int a = 0; a < g.m; ++a) os << (a ? "," : "") << 'v' << a;
    const auto& x = sp.op->mesh->x;
    for (std::size_t i = 0; i < x.size(); ++i) os << ",x=" << x[i];
    os << '\n';
    for (int k = 0; k < g.size(); ++k) {
        const Eigen::VectorXd v = g.node(k);
        const Eigen::VectorXd z = sp.op->embed(g.values[k]);
        for (int a = 0; a < g.m; ++a) os << (a ? "," : "") << v[a];
        for (Eigen::Index i = 0; i < z.size(); ++i) os << ',' << z[i];
        os << '\n';
    }
}

// Box half-width: the slow coordinates of all equilibria, with margin.
double box_radius(const SpectralSplit& sp, const std::vector<Equilibrium>& E) {
    double r = 0.0;
    for (const auto& e : E) r = std::max(r, sp.proj.coords(e.dofs).cwiseAbs().maxCoeff());
    return std::max(1.05 * r, 0.1);
}

// Exponential attraction of a random trajectory to the graph: the fitted
// decay rate of its distance, in the window where the distance exceeds the
// graph tolerance.
double attraction_rate(const SpectralSplit& sp, const Nonlinearity& f, const GraphFunction& g, const FlowConfig& flow,
                       std::uint64_t seed, double floor) {
    const auto& op = *sp.op;
    const auto pairs = eigenpairs(op, std::min<int>(6, static_cast<int>(op.dim() / 4)));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(op.dim());
    for (const auto& p : pairs) u0 += U(rng) * p.vector;
    Integrator it(op, f, u0, flow);
    std::vector<double> ts, ls;
    const int stride = std::max(1, static_cast<int>(std::lround(0.05 / flow.dt)));
    for (int s = 1; it.time() < 2.0 - 1e-12; ++s) {
        it.step();
        if (s % stride) continue;
        const double d = distance_to_graph(sp, g, it.state());
        if (d <= floor) break;
        ts.push_back(it.time());
        ls.push_back(std::log(d));
    }
    if (ts.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    return -(n * stl - st * sl) / (n * stt - st * st);
}

json row_json(const RateRow& r) {
    return {{"eps", r.eps},           {"tau", r.tau},     {"tau_log", r.tau_log}, {"p_dist", r.p_dist},
            {"quantity", r.quantity}, {"value", r.value}, {"mesh_n", r.mesh_n},   {"dt", r.dt}};
}

json fit_json(const FitRecord& f) {
    return {{"quantity", f.fit.quantity}, {"model", to_string(f.fit.model)}, {"slope", f.fit.slope},
            {"intercept", f.fit.intercept}, {"r2", f.fit.r2}, {"used", f.fit.used},
            {"excluded_eps", f.fit.excluded_eps}, {"threshold", f.threshold}, {"pass", f.pass},
            {"enforced", f.enforced}};
}

json check_json(const Check& c) {
    return {{"name", c.name},         {"value", c.value},       {"limit", c.limit},
            {"pass", c.pass},         {"enforced", c.enforced}, {"detail", c.detail}};
}

}  // namespace

Experiments::Experiments(RunConfig config, RunOptions options) : rc_(std::move(config)), opt_(std::move(options)) {
    if (opt_.eps_list) rc_.numerics.eps_list = *opt_.eps_list;
    if (opt_.seed) rc_.numerics.seed = *opt_.seed;
    if (opt_.dump) rc_.numerics.dump = *opt_.dump;
    eps_ = rc_.numerics.eps_list;
    if (eps_.empty()) throw ConfigError("numerics.eps_list: empty");
    n_ell_ = opt_.mesh_n.value_or(rc_.numerics.mesh_n_elliptic);
    n_dyn_ = opt_.mesh_n.value_or(rc_.numerics.mesh_n_dynamics);
    scheme_from_string(rc_.numerics.scheme);
    cells_.resize(eps_.size());
    for (std::size_t k = 0; k < eps_.size(); ++k) cells_[k].eps = eps_[k];
    std::filesystem::create_directories(opt_.out_dir);
}

std::string Experiments::path(const std::string& name) const {
    return (std::filesystem::path(opt_.out_dir) / name).string();
}

FlowConfig Experiments::flow() const {
    FlowConfig fc;
    fc.dt = rc_.numerics.dt;
    fc.scheme = scheme_from_string(rc_.numerics.scheme);
    return fc;
}

SampleSpec Experiments::sample_spec() const {
    SampleSpec s;
    s.delta_launch = rc_.numerics.delta_launch;
    s.snapshots = rc_.numerics.snapshots;
    s.flow = flow();
    return s;
}

RateRow Experiments::row(const OperatorPair& p, const std::string& quantity, double value, double dt) const {
    RateRow r;
    r.eps = p.profile.eps();
    r.tau = p.tau.tau;
    r.tau_log = p.tau.tau_log;
    r.p_dist = p.p_dist;
    r.quantity = quantity;
    r.value = value;
    r.mesh_n = p.mesh->n;
    r.dt = dt;
    return r;
}

FitRecord Experiments::fit(const std::vector<RateRow>& rows, const std::string& quantity, RateModel model,
                           bool enforced) const {
    FitRecord rec;
    rec.fit = fit_rate(select(rows, quantity), model);
    rec.fit.quantity = quantity;
    rec.threshold = rc_.acceptance.min_slope;
    rec.pass = rec.fit.slope >= rec.threshold;
    rec.enforced = enforced;
    return rec;
}

DynamicsCell& Experiments::cell(std::size_t k) {
    auto& c = cells_[k];
    if (!c.pair) c.pair = std::make_unique<OperatorPair>(make_pair(rc_.problem, c.eps, n_dyn_));
    return c;
}

void Experiments::ensure_equilibria(std::size_t k) {
    auto& c = cell(k);
    if (!c.E0.empty()) return;
    const auto& f = rc_.problem.f;
    auto E0 = find_all_limit(c.pair->limit_op, f);
    c.delta = default_delta(c.pair->limit_op, E0);
    std::vector<Equilibrium> Ee;
    for (const auto& e : E0) Ee.push_back(continue_to_eps(c.pair->eps_op, c.pair->limit_op, f, e, c.delta));
    c.Eeps = std::move(Ee);
    c.E0 = std::move(E0);
}

void Experiments::ensure_clouds(std::size_t k) {
    ensure_equilibria(k);
    auto& c = cells_[k];
    if (c.cloud0) return;
    const auto spec = sample_spec();
    c.cloud0 = sample_attractor(c.pair->limit_op, rc_.problem.f, c.E0, spec);
    c.cloud_eps = sample_attractor(c.pair->eps_op, rc_.problem.f, c.Eeps, spec);
}

ExperimentResult Experiments::check() {
    ExperimentResult res;
    res.subcommands.push_back("check");
    json out = json::array();
    auto add = [&out](double eps, const std::vector<Violation>& vs) {
        for (const auto& v : vs)
            out.push_back({{"eps", eps}, {"inequality", v.inequality}, {"x", v.x}, {"value", v.value}});
    };
    add(0.0, check_config(rc_.problem));
    for (double eps : eps_) add(eps, check_admissible(make_profile(rc_.problem, eps), rc_.problem));
    write_json(path("violations.json"), out);
    res.checks.push_back({"admissible", static_cast<double>(out.size()), 0.0, out.empty(), true,
                          out.empty() ? "" : "see violations.json"});
    return res;
}

ExperimentResult Experiments::spectrum() {
    ExperimentResult res;
    res.subcommands.push_back("spectrum");
    const int k = rc_.numerics.eig_k;
    std::vector<std::vector<double>> le(eps_.size()), l0(eps_.size());
    std::vector<double> taus(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t c) {
        const auto p = make_pair(rc_.problem, eps_[c], n_ell_);
        le[c] = eigenvalues(p.eps_op, k);
        l0[c] = eigenvalues(p.limit_op, k);
        taus[c] = p.tau.tau;
    });
    {
        std::ofstream os(path("spectrum.csv"));
        os.precision(12);
        os << "eps,i,lambda_eps,lambda_0,diff,tau\n";
        for (std::size_t c = 0; c < eps_.size(); ++c)
            for (int i = 0; i < k; ++i)
                os << eps_[c] << ',' << i << ',' << le[c][i] << ',' << l0[c][i] << ','
                   << std::abs(le[c][i] - l0[c][i]) << ',' << taus[c] << '\n';
    }
    const double ge = rc_.numerics.gap_eps;
    const auto profile = make_profile(rc_.problem, ge);
    const auto mesh = std::make_shared<const Mesh>(build_mesh(rc_.problem, profile, n_ell_));
    const auto op = assemble(mesh, rc_.problem, profile, OperatorKind::perturbed);
    const auto gaps = gap_profile(op, k, sturm_length(profile));
    std::ofstream os(path("gaps.csv"));
    os.precision(12);
    os << "i,gap,model_ratio\n";
    double worst = 0.0;
    int decreasing = 0;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
        const auto& g = gaps[j];
        os << g.i << ',' << g.gap << ',' << g.model_ratio << '\n';
        if (g.i >= rc_.acceptance.gap_ratio_from) worst = std::max(worst, std::abs(g.model_ratio - 1.0));
        if (j > 0 && g.gap < gaps[j - 1].gap) ++decreasing;
    }
    res.checks.push_back({"gap_ratio", worst, rc_.acceptance.gap_ratio_tol, worst <= rc_.acceptance.gap_ratio_tol,
                          rc_.acceptance.enforce_gap_ratio, "max |ratio - 1| for i >= gap_ratio_from at eps=" + eps_tag(ge)});
    res.checks.push_back({"gaps_increasing", static_cast<double>(decreasing), 0.0, decreasing == 0, false,
                          "number of i >= 5 with gap_i < gap_{i-1}"});
    return res;
}

ExperimentResult Experiments::elliptic_rate() {
    ExperimentResult res;
    res.subcommands.push_back("elliptic-rate");
    const auto& mus = rc_.numerics.mus;
    std::vector<std::vector<RateRow>> cellrows(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t c) {
        const auto p = make_pair(rc_.problem, eps_[c], n_ell_);
        double sd = 0.0;
        for (const auto& g : test_loads(p.mesh, rc_.numerics.loads)) sd = std::max(sd, solution_diff(p.eps_op, p.limit_op, g));
        auto& out = cellrows[c];
        out.push_back(row(p, "solution_diff", sd));
        out.push_back(row(p, "op_norm_diff", solution_op_diff_norm(p.eps_op, p.limit_op)));
        for (double mu : mus) {
            char name[48];
            std::snprintf(name, sizeof name, "shifted_norm_mu%g", mu);
            out.push_back(row(p, name, shifted_diff_norm(p.eps_op, p.limit_op, mu).value));
        }
    });
    for (auto& v : cellrows) res.rows.insert(res.rows.end(), v.begin(), v.end());
    write_rate_csv(path("elliptic_rate.csv"), res.rows);
    res.fits.push_back(fit(res.rows, "solution_diff", RateModel::tau));
    res.fits.push_back(fit(res.rows, "op_norm_diff", RateModel::tau));
    for (double mu : mus) {
        char name[48];
        std::snprintf(name, sizeof name, "shifted_norm_mu%g", mu);
        res.fits.push_back(fit(res.rows, name, RateModel::tau));
    }
    return res;
}

ExperimentResult Experiments::eigen_rate() {
    ExperimentResult res;
    res.subcommands.push_back("eigen-rate");
    const int m = rc_.numerics.m;
    std::vector<std::vector<RateRow>> cellrows(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t c) {
        const auto p = make_pair(rc_.problem, eps_[c], n_ell_);
        auto& out = cellrows[c];
        for (int i = 0; i < 3; ++i) out.push_back(row(p, "eigen_diff_" + std::to_string(i), eigenvalue_diff(p.eps_op, p.limit_op, i)));
        const auto qe = spectral_projection(p.eps_op, m);
        const auto q0 = spectral_projection(p.limit_op, m);
        Eigen::VectorXd v(p.mesh->nodes());
        for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = std::cos(std::numbers::pi * p.mesh->x[j]);
        out.push_back(row(p, "projection_diff", projection_diff(p.eps_op, qe, p.limit_op, q0, v)));
    });
    for (auto& v : cellrows) res.rows.insert(res.rows.end(), v.begin(), v.end());
    write_rate_csv(path("eigen_rate.csv"), res.rows);
    for (int i = 0; i < 3; ++i) res.fits.push_back(fit(res.rows, "eigen_diff_" + std::to_string(i), RateModel::tau));
    res.fits.push_back(fit(res.rows, "projection_diff", RateModel::tau));
    return res;
}

ExperimentResult Experiments::equilibria_rate() {
    ExperimentResult res;
    res.subcommands.push_back("equilibria-rate");
    std::vector<int> counts(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t k) {
        ensure_equilibria(k);
        counts[k] = static_cast<int>(find_all(cells_[k].pair->eps_op, rc_.problem.f).size());
    });
    json records = json::array();
    double min_margin = std::numeric_limits<double>::infinity();
    bool same = true;
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        const auto& c = cells_[k];
        double d = 0.0;
        for (std::size_t j = 0; j < c.E0.size(); ++j) {
            d = std::max(d, equilibrium_distance(c.pair->eps_op, c.pair->limit_op, c.Eeps[j], c.E0[j]));
            min_margin = std::min({min_margin, c.E0[j].margin, c.Eeps[j].margin});
        }
        res.rows.push_back(row(*c.pair, "equilibria_dist", d));
        for (const auto* set : {&c.E0, &c.Eeps})
            for (const auto& e : *set)
                records.push_back({{"eps", e.eps}, {"values", to_std(e.u.values)}, {"morse_index", e.morse_index},
                                   {"margin", e.margin}, {"residual", e.residual}});
        same = same && counts[k] == static_cast<int>(c.E0.size()) && c.E0.size() == cells_[0].E0.size();
    }
    write_rate_csv(path("equilibria_rate.csv"), res.rows);
    write_json(path("equilibria.json"), records);
    res.fits.push_back(fit(res.rows, "equilibria_dist", RateModel::tau));
    std::string counts_s;
    for (int n : counts) counts_s += (counts_s.empty() ? "" : ",") + std::to_string(n);
    res.checks.push_back({"equilibria_count_constant", static_cast<double>(cells_[0].E0.size()), 0.0, same, true,
                          "perturbed counts " + counts_s});
    res.checks.push_back({"hyperbolicity_margin", min_margin, kHyperbolicMargin, min_margin > kHyperbolicMargin, true,
                          "smallest |eigenvalue| of the linearizations"});
    return res;
}

ExperimentResult Experiments::semigroup_rate() {
    ExperimentResult res;
    res.subcommands.push_back("semigroup-rate");
    const auto fc = flow();
    const int stride = std::max(1, rc_.numerics.semigroup_stride);
    std::vector<double> diffs(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t k) {
        ensure_clouds(k);
        const auto& c = cells_[k];
        const auto& lim = c.pair->limit_op;
        double d = 0.0;
        for (std::size_t j = 0; j < c.cloud0->points.size(); j += stride)
            d = std::max(d, time_one_diff(c.pair->eps_op, lim, rc_.problem.f, lim.to_dofs(c.cloud0->points[j].u), fc));
        for (const auto& e : c.E0) d = std::max(d, time_one_diff(c.pair->eps_op, lim, rc_.problem.f, e.dofs, fc));
        diffs[k] = d;
    });
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        const auto& p = *cells_[k].pair;
        res.rows.push_back(row(p, "time_one_diff", diffs[k], fc.dt));
        const double r = diffs[k] / p.tau.tau_log;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    write_rate_csv(path("semigroup_rate.csv"), res.rows);
    res.fits.push_back(fit(res.rows, "time_one_diff", RateModel::tau_log, false));
    const double spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
    res.checks.push_back({"time_one_ratio_spread", spread, rc_.acceptance.ratio_spread,
                          spread <= rc_.acceptance.ratio_spread, true, "max/min of time_one_diff / tau_log"});
    return res;
}

ExperimentResult Experiments::manifold_rate() {
    ExperimentResult res;
    res.subcommands.push_back("manifold-rate");
    const auto& f = rc_.problem.f;
    const auto fc = flow();
    struct Out {
        double gd = 0, kappa = 0, kappa0 = 0, inv = 0, cont = 0, lip = 0, fixed = 0, rate = 0, gamma = 0;
    };
    std::vector<Out> outs(eps_.size());
    std::vector<std::optional<std::pair<SpectralSplit, GraphFunction>>> dumps(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t k) {
        ensure_clouds(k);
        const auto& c = cells_[k];
        const auto sp0 = split(c.pair->limit_op, rc_.numerics.m);
        const auto spe = split(c.pair->eps_op, rc_.numerics.m);
        GraphSpec gs;
        gs.rho = box_radius(sp0, c.E0);
        gs.nodes_per_axis = rc_.numerics.graph_nodes;
        gs.dt = rc_.numerics.graph_dt;
        gs.tol = rc_.numerics.graph_tol;
        const auto g0 = compute_graph(sp0, f, gs);
        const auto ge = compute_graph(spe, f, gs);
        auto& o = outs[k];
        o.gd = graph_diff(spe, ge.graph, sp0, g0.graph);
        o.kappa = ge.kappa;
        o.kappa0 = g0.kappa;
        o.inv = invariance_residual(spe, f, ge.graph, 0.5, fc);
        for (const auto& p : c.cloud_eps->points) o.cont = std::max(o.cont, distance_to_graph(spe, ge.graph, p.u));
        o.lip = ge.lipschitz;
        o.fixed = lp_iterate(spe, f, ge.graph, ge.horizon, gs).sup_change;
        o.rate = attraction_rate(spe, f, ge.graph, fc, rc_.numerics.seed + k, 10 * gs.tol);
        o.gamma = spe.gamma;
        if (rc_.numerics.dump) dumps[k].emplace(spe, ge.graph);
    });
    double kappa = 0, inv = 0, cont = 0, lip = 0, fixed = 0, rate = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        const auto& o = outs[k];
        res.rows.push_back(row(*cells_[k].pair, "graph_diff", o.gd, rc_.numerics.graph_dt));
        kappa = std::max({kappa, o.kappa, o.kappa0});
        inv = std::max(inv, o.inv);
        cont = std::max(cont, o.cont);
        lip = std::max(lip, o.lip);
        fixed = std::max(fixed, o.fixed);
        rate = std::min(rate, o.rate);
        if (dumps[k]) write_graph_csv(path("graph_eps" + eps_tag(eps_[k]) + ".csv"), dumps[k]->first, dumps[k]->second);
    }
    write_rate_csv(path("manifold_rate.csv"), res.rows);
    res.fits.push_back(fit(res.rows, "graph_diff", RateModel::tau_log));
    const GraphSpec defaults;
    res.checks.push_back({"contraction", kappa, 1.0, kappa < 1.0, true, "largest ratio of successive sup changes"});
    res.checks.push_back({"invariance", inv, rc_.acceptance.invariance, inv <= rc_.acceptance.invariance, true,
                          "graph points flowed for t=0.5"});
    res.checks.push_back({"containment", cont, rc_.acceptance.containment, cont <= rc_.acceptance.containment, true,
                          "attractor cloud distance to the graph"});
    res.checks.push_back({"lipschitz", lip, defaults.Delta, lip <= defaults.Delta, true, "empirical grid Lipschitz constant"});
    res.checks.push_back({"fixed_point", fixed, 2 * rc_.numerics.graph_tol, fixed <= 2 * rc_.numerics.graph_tol, true,
                          "sup change of one extra sweep"});
    res.checks.push_back({"attraction_rate", rate, 0.0, rate > 0.0, false,
                          "fitted decay rate of a random trajectory's distance to the graph"});
    return res;
}

ExperimentResult Experiments::attractor_rate() {
    ExperimentResult res;
    res.subcommands.push_back("attractor-rate");
    std::vector<double> dh(eps_.size()), dh1(eps_.size());
    parallel_for(eps_.size(), rc_.numerics.threads, [&](std::size_t k) {
        ensure_clouds(k);
        const auto& c = cells_[k];
        dh[k] = hausdorff(*c.cloud_eps, *c.cloud0, c.pair->eps_op);
        const auto h1 = assemble_h1(c.pair->mesh);
        dh1[k] = hausdorff(*c.cloud_eps, *c.cloud0, h1);
    });
    for (std::size_t k = 0; k < eps_.size(); ++k) {
        const auto& c = cells_[k];
        if (c.E0.size() != cells_[0].E0.size() || c.cloud0->heteroclinics != cells_[0].cloud0->heteroclinics)
            throw StructuralChange("equilibria or heteroclinic count changes across the sweep at eps=" + eps_tag(c.eps) +
                                   "; reduce the largest eps");
        res.rows.push_back(row(*c.pair, "d_H", dh[k], rc_.numerics.dt));
        res.rows.push_back(row(*c.pair, "d_H_h1", dh1[k], rc_.numerics.dt));
        if (rc_.numerics.dump) {
            write_cloud_csv(path("cloud0_eps" + eps_tag(c.eps) + ".csv"), *c.pair->mesh, *c.cloud0);
            write_cloud_csv(path("cloud_eps" + eps_tag(c.eps) + ".csv"), *c.pair->mesh, *c.cloud_eps);
        }
    }
    write_rate_csv(path("attractor_rate.csv"), res.rows);
    res.fits.push_back(fit(res.rows, "d_H", RateModel::tau_log));
    res.fits.push_back(fit(res.rows, "d_H_h1", RateModel::tau_log, false));
    json summary = json::array();
    for (const auto& r : select(res.rows, "d_H"))
        summary.push_back({{"eps", r.eps}, {"tau", r.tau}, {"d_H", r.value}});
    const auto& fh = res.fits.front().fit;
    write_json(path("attractor_summary.json"),
               {{"rows", summary}, {"slope_fit", {{"slope", fh.slope}, {"intercept", fh.intercept}, {"r2", fh.r2}}}});
    return res;
}

ExperimentResult Experiments::all() {
    ExperimentResult res = check();
    res.merge(spectrum());
    res.merge(elliptic_rate());
    res.merge(eigen_rate());
    res.merge(equilibria_rate());
    res.merge(semigroup_rate());
    res.merge(manifold_rate());
    res.merge(attractor_rate());
    return res;
}

ExperimentResult Experiments::run(const std::string& sub) {
    if (sub == "check") return check();
    if (sub == "spectrum") return spectrum();
    if (sub == "elliptic-rate") return elliptic_rate();
    if (sub == "eigen-rate") return eigen_rate();
    if (sub == "equilibria-rate") return equilibria_rate();
    if (sub == "semigroup-rate") return semigroup_rate();
    if (sub == "manifold-rate") return manifold_rate();
    if (sub == "attractor-rate") return attractor_rate();
    if (sub == "all") return all();
    throw ConfigError("unknown subcommand '" + sub + "'");
}

int run_command(const std::string& subcommand, const std::string& config_path, const RunOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    json manifest;
    manifest["config_sha"] = nullptr;
    manifest["subcommand"] = subcommand;
    manifest["versions"] = {{"artifact", "1.0.0"},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                          "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"compiler", __VERSION__},
                            {"kernels", std::string(kernels::active().name)}};
    manifest["rows"] = json::array();
    manifest["fits"] = json::array();
    manifest["checks"] = json::array();
    int code = 0;
    json error = nullptr;
    try {
        std::filesystem::create_directories(options.out_dir);
        RunConfig rc = load_config(config_path);
        manifest["config_sha"] = rc.sha256;
        Experiments ex(std::move(rc), options);
        manifest["seed"] = ex.config().numerics.seed;
        manifest["eps_list"] = ex.eps_list();
        const auto res = ex.run(subcommand);
        for (const auto& r : res.rows) manifest["rows"].push_back(row_json(r));
        for (const auto& f : res.fits) manifest["fits"].push_back(fit_json(f));
        for (const auto& c : res.checks) manifest["checks"].push_back(check_json(c));
        code = res.pass() ? 0 : 1;
    } catch (const ConfigError& e) {
        code = 2;
        error = {{"module", e.module()}, {"message", e.what()}};
    } catch (const Error& e) {
        code = 3;
        error = {{"module", e.module()}, {"message", e.what()}};
    } catch (const std::exception& e) {
        code = 3;
        error = {{"module", "core"}, {"message", e.what()}};
    }
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["pass"] = code == 0;
    manifest["exit_code"] = code;
    manifest["error"] = error;
    try {
        std::filesystem::create_directories(options.out_dir);
        write_json((std::filesystem::path(options.out_dir) / "manifest.json").string(), manifest);
    } catch (const std::exception&) {
        if (code == 0) code = 3;
    }
    if (!error.is_null())
        std::fprintf(stderr, "%s: [%s] %s\n", subcommand.c_str(), error["module"].get<std::string>().c_str(),
                     error["message"].get<std::string>().c_str());
    return code;
}

}  // namespace lld
