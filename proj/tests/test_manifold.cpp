#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lld/config_io.hpp"
#include "lld/equilibria.hpp"
#include "lld/errors.hpp"
#include "lld/galerkin.hpp"
#include "lld/manifold.hpp"
#include "support.hpp"

using namespace lld;
using lldtest::kPi;

namespace {

Nonlinearity cubic(double a = 1.0, double b = 1.0) { return Nonlinearity(NonlinFamily::cubic, {a, b}, 4.0); }

double radius_for(const SpectralSplit& sp, const std::vector<Equilibrium>& E) {
    double r = 0.0;
    for (const auto& e : E) r = std::max(r, sp.proj.coords(e.dofs).cwiseAbs().maxCoeff());
    return std::max(1.05 * r, 0.1);
}

double orthogonality(const SpectralSplit& sp, const GraphFunction& g) {
    double worst = 0.0;
    for (const auto& val : g.values) worst = std::max(worst, sp.proj.coords(val).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace

TEST_CASE("split of constant coefficients", "[manifold]") {
    const auto op = lldtest::constant_op(256, 1.0, 0.5);
    const auto sp = split(op, 1);
    CHECK(sp.beta == Catch::Approx(0.5).epsilon(1e-10));
    CHECK(sp.gamma == Catch::Approx(0.5 + kPi * kPi).epsilon(1e-3));
    // gap table
    double prev = 0.0;
    for (int m = 1; m <= 3; ++m) {
        const auto s = split(op, m);
        CHECK(s.gamma > s.beta);
        INFO("m=" << m << " gamma/beta=" << s.gamma / s.beta);
        if (m > 1) CHECK(s.gamma - s.beta > prev);
        prev = s.gamma - s.beta;
    }
}

TEST_CASE("H and G reconstruct the Galerkin load", "[manifold]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 128);
    const auto sp = split(pr.eps_op, 2);
    const auto f = cubic();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd v = lldtest::random_vector(rng, 2);
        const Eigen::VectorXd z = sp.to_fast(lldtest::random_vector(rng, pr.eps_op.dim(), 0.5));
        const Eigen::VectorXd F = nonlinear_load(pr.eps_op, f, sp.lift(v, z));
        const Eigen::VectorXd rebuilt = pr.eps_op.M * (sp.proj.Phi * sp.H(f, v, z)) + sp.G(f, v, z);
        CHECK((rebuilt - F).norm() <= 1e-12 * F.norm());
        CHECK((sp.proj.Phi.transpose() * sp.G(f, v, z)).norm() <= 1e-10);
        CHECK(sp.proj.coords(z).norm() <= 1e-12);
    }
}

TEST_CASE("zero reaction gives the zero graph", "[manifold]") {
    const auto op = lldtest::constant_op(128, 1.0, 0.5);
    const auto sp = split(op, 1);
    GraphSpec gs;
    gs.nodes_per_axis = 9;
    const auto g0 = GraphFunction::zero(1, 1.0, 9, op.dim());
    const auto step = lp_iterate(sp, Nonlinearity::zero(), g0, 1.0, gs);
    CHECK(step.sup_change == 0.0);
    const auto r = compute_graph(sp, Nonlinearity::zero(), gs);
    CHECK(r.iterations == 1);
    for (const auto& v : r.graph.values) CHECK(v.norm() == 0.0);
}

TEST_CASE("linear reaction keeps the splitting invariant", "[manifold]") {
    // f(u) = 0.3 u is diagonal in the eigenbasis, so G(v, 0) = 0
    const auto op = lldtest::constant_op(128, 1.0, 0.5);
    const auto sp = split(op, 1);
    const Nonlinearity f(NonlinFamily::custom, {0.0, 0.3}, 40.0);
    GraphSpec gs;
    gs.rho = 1.0;
    gs.nodes_per_axis = 9;
    const auto r = compute_graph(sp, f, gs);
    for (const auto& v : r.graph.values) CHECK(op.energy_nodal(v) <= 1e-10);
}

TEST_CASE("cubic graph on constant coefficients", "[manifold]") {
    const auto op = lldtest::constant_op(128, 1.0, 0.5);
    const auto f = cubic();
    const auto sp = split(op, 1);
    GraphSpec gs;
    gs.rho = radius_for(sp, find_all(op, f));
    gs.nodes_per_axis = 17;
    const auto r = compute_graph(sp, f, gs);
    INFO("kappa=" << r.kappa << " iterations=" << r.iterations);
    CHECK(r.kappa < 1.0);
    CHECK(r.sup_changes.back() <= gs.tol);
    // spatially constant data stay constant, so the graph vanishes
    for (const auto& v : r.graph.values) CHECK(op.energy_nodal(v) <= 1e-8);
}

TEST_CASE("graph of the default configuration", "[manifold]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 192);
    const auto& op = pr.eps_op;
    const auto f = cubic();
    const auto sp = split(op, 1);
    GraphSpec gs;
    gs.rho = radius_for(sp, find_all(op, f));
    gs.nodes_per_axis = 17;
    const auto r = compute_graph(sp, f, gs);
    INFO("kappa=" << r.kappa << " iterations=" << r.iterations << " D=" << r.graph.D);

    CHECK(r.kappa < 1.0);
    CHECK(r.graph.D > 0.0);
    CHECK(r.lipschitz <= gs.Delta);
    CHECK(orthogonality(sp, r.graph) <= 1e-9);

    double sup = 0.0;
    for (const auto& v : r.graph.values) sup = std::max(sup, op.energy_nodal(op.embed(v)));
    CHECK(sup <= r.graph.D * (1 + 1e-12));

    const auto extra = lp_iterate(sp, f, r.graph, r.horizon, gs);
    CHECK(extra.sup_change <= 2 * gs.tol);

    FlowConfig fc;
    fc.dt = 1e-3;
    CHECK(invariance_residual(sp, f, r.graph, 0.5, fc) <= 5e-3);

    // equilibria lie on the graph
    for (const auto& e : find_all(op, f)) CHECK(distance_to_graph(sp, r.graph, e.dofs) <= 1e-3);
}

TEST_CASE("exponential attraction to the graph", "[manifold]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 128);
    const auto& op = pr.eps_op;
    const auto f = cubic();
    const auto sp = split(op, 1);
    GraphSpec gs;
    gs.rho = radius_for(sp, find_all(op, f));
    gs.nodes_per_axis = 17;
    const auto r = compute_graph(sp, f, gs);

    std::mt19937_64 rng(11);
    Eigen::VectorXd u = sp.lift(Eigen::VectorXd::Constant(1, 0.2), Eigen::VectorXd::Zero(op.dim()));
    const auto more = spectral_projection(op, 5);
    u += 0.3 * more.Phi * lldtest::random_vector(rng, 5);
    FlowConfig fc;
    fc.dt = 1e-3;
    std::vector<double> t, logd;
    for (int k = 1; k <= 6; ++k) {
        u = step_to(op, f, u, 0.05, fc);
        t.push_back(0.05 * k);
        logd.push_back(std::log(distance_to_graph(sp, r.graph, u)));
    }
    const double rate = -(logd.back() - logd.front()) / (t.back() - t.front());
    INFO("rate=" << rate << " gamma=" << sp.gamma);
    CHECK(rate >= sp.gamma - f.lipschitz_bound());
    CHECK(rate > 0.0);
}

TEST_CASE("graph_diff of identical operators", "[manifold]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 128);
    const auto f = cubic();
    const auto sp = split(pr.limit_op, 1);
    GraphSpec gs;
    gs.rho = radius_for(sp, find_all_limit(pr.limit_op, f));
    gs.nodes_per_axis = 9;
    const auto r = compute_graph(sp, f, gs);
    CHECK(graph_diff(sp, r.graph, sp, r.graph) == 0.0);
}

TEST_CASE("graph_diff under grid refinement", "[manifold]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.1, 192);
    const auto f = cubic();
    const auto s0 = split(pr.limit_op, 1);
    const auto se = split(pr.eps_op, 1);
    GraphSpec gs;
    gs.rho = radius_for(s0, find_all_limit(pr.limit_op, f));
    double diff[2];
    for (int k = 0; k < 2; ++k) {
        gs.nodes_per_axis = k == 0 ? 17 : 33;
        const auto g0 = compute_graph(s0, f, gs);
        const auto ge = compute_graph(se, f, gs);
        diff[k] = graph_diff(se, ge.graph, s0, g0.graph);
    }
    INFO("coarse=" << diff[0] << " fine=" << diff[1]);
    CHECK(diff[0] > 0.0);
    CHECK(std::abs(diff[1] - diff[0]) <= 0.1 * diff[1]);
}

TEST_CASE("graph contract violations", "[manifold]") {
    CHECK_THROWS_AS(GraphFunction::zero(4, 1.0, 9, 10), ContractViolation);
    CHECK_THROWS_AS(GraphFunction::zero(1, 1.0, 1, 10), ContractViolation);
    const auto op = lldtest::constant_op(64, 1.0, 0.5);
    const auto sp = split(op, 1);
    GraphSpec gs;
    const auto g2 = GraphFunction::zero(2, 1.0, 3, op.dim());
    CHECK_THROWS_AS(lp_iterate(sp, cubic(), g2, 1.0, gs), ContractViolation);
}

TEST_CASE("backward orbits that leave the box", "[manifold]") {
    // f = -3u: backward slow orbits grow like e^{3.5 t}
    const auto op = lldtest::constant_op(64, 1.0, 0.5);
    const auto sp = split(op, 1);
    const Nonlinearity f(NonlinFamily::custom, {0.0, -3.0}, 40.0);
    GraphSpec gs;
    gs.rho = 0.5;
    gs.nodes_per_axis = 5;
    const auto g = GraphFunction::zero(1, gs.rho, 5, op.dim());
    CHECK_THROWS_AS(lp_iterate(sp, f, g, 2.0, gs), BoxEscape);
}
