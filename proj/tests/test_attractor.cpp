#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "lld/attractor.hpp"
#include "lld/equilibria.hpp"
#include "lld/errors.hpp"
#include "support.hpp"

using namespace lld;

namespace {

Nonlinearity cubic() { return Nonlinearity(NonlinFamily::cubic, {1.0, 1.0}, 4.0); }

std::vector<Eigen::VectorXd> random_cloud(std::mt19937_64& rng, int count, Eigen::Index n) {
    std::vector<Eigen::VectorXd> c;
    for (int i = 0; i < count; ++i) c.push_back(lldtest::random_vector(rng, n));
    return c;
}

}  // namespace

TEST_CASE("single stable equilibrium", "[attractor]") {
    const auto op = lldtest::constant_op(64, 1.0, 2.0);
    const auto f = cubic();
    const auto eqs = find_all(op, f);
    REQUIRE(eqs.size() == 1);
    const auto s = sample_attractor(op, f, eqs);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0].equilibrium);
    CHECK(s.points[0].u.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(s.heteroclinics == 0);
}

TEST_CASE("heteroclinics of the bistable constant problem", "[attractor]") {
    const auto op = lldtest::constant_op(64, 1.0, 0.5);
    const auto f = cubic();
    const auto eqs = find_all(op, f);
    REQUIRE(eqs.size() == 3);
    SampleSpec spec;
    spec.flow.dt = 1e-2;
    const auto s = sample_attractor(op, f, eqs, spec);
    CHECK(s.heteroclinics == 2);
    CHECK(s.max_sup <= f.cutoff_K());
    const double root = std::sqrt(0.5);
    double lo = 0, hi = 0;
    for (const auto& p : s.points) {
        CHECK(p.u.cwiseAbs().maxCoeff() <= f.cutoff_K());
        // constant data stay constant
        CHECK(p.u.maxCoeff() - p.u.minCoeff() <= 1e-8);
        lo = std::min(lo, p.u.minCoeff());
        hi = std::max(hi, p.u.maxCoeff());
    }
    CHECK(hi == Catch::Approx(root).epsilon(1e-4));
    CHECK(lo == Catch::Approx(-root).epsilon(1e-4));
    // the cloud spans the segment: gaps along it are small
    std::vector<double> vals;
    for (const auto& p : s.points) vals.push_back(p.u[0]);
    std::sort(vals.begin(), vals.end());
    for (std::size_t i = 1; i < vals.size(); ++i) CHECK(vals[i] - vals[i - 1] <= 0.05);
}

TEST_CASE("hausdorff distance basics", "[attractor]") {
    const auto op = lldtest::constant_op(32, 1.0, 0.5);
    std::mt19937_64 rng(5);
    const auto A = random_cloud(rng, 20, op.dim());
    CHECK(hausdorff(A, A, op) == 0.0);

    const std::vector<Eigen::VectorXd> B(A.begin(), A.begin() + 7);
    CHECK(directed_hausdorff(B, A, op) == 0.0);
    CHECK(directed_hausdorff(A, B, op) > 0.0);
    CHECK(hausdorff(A, B, op) == Catch::Approx(directed_hausdorff(A, B, op)).epsilon(1e-15));
    CHECK(hausdorff(A, B, op) == hausdorff(B, A, op));
}

TEST_CASE("two-point clouds by hand", "[attractor]") {
    // ||c 1||^2 = c^2 * q for u_xx + q u on (0, 1)
    const double q = 0.5, c = 0.3;
    const auto op = lldtest::constant_op(32, 1.0, q);
    const std::vector<Eigen::VectorXd> A{Eigen::VectorXd::Zero(op.dim())};
    const std::vector<Eigen::VectorXd> B{Eigen::VectorXd::Constant(op.dim(), c)};
    CHECK(directed_hausdorff(A, B, op) == Catch::Approx(c * std::sqrt(q)).epsilon(1e-12));
    CHECK(hausdorff(A, B, op) == Catch::Approx(2 * c * std::sqrt(q)).epsilon(1e-12));
}

TEST_CASE("hausdorff triangle inequality", "[attractor]") {
    const auto op = lldtest::constant_op(32, 1.0, 0.5);
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = random_cloud(rng, 8, op.dim());
        const auto B = random_cloud(rng, 12, op.dim());
        const auto C = random_cloud(rng, 5, op.dim());
        CHECK(hausdorff(A, C, op) <= hausdorff(A, B, op) + hausdorff(B, C, op) + 1e-12);
    }
}

TEST_CASE("default configuration cloud", "[attractor]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 128);
    const auto& op = pr.eps_op;
    const auto f = cubic();
    const auto eqs = find_all(op, f);
    SampleSpec spec;
    spec.flow.dt = 2e-3;
    spec.snapshots = 100;
    const auto coarse = sample_attractor(op, f, eqs, spec);
    spec.snapshots = 200;
    const auto fine = sample_attractor(op, f, eqs, spec);

    CHECK(coarse.heteroclinics > 0);
    int n_eq = 0;
    for (const auto& p : fine.points) n_eq += p.equilibrium;
    CHECK(n_eq == static_cast<int>(eqs.size()));
    CHECK(fine.max_sup <= f.cutoff_K());

    const double refine = hausdorff(coarse, fine, op);
    INFO("refinement change " << refine);
    CHECK(refine < 5e-3);

    // forward invariance: flowing sample points for t = 1 stays near the cloud
    const auto cloud = cloud_vectors(fine);
    FlowConfig fc;
    fc.dt = 2e-3;
    double worst = 0.0;
    for (std::size_t i = 0; i < fine.points.size(); i += 25) {
        const Eigen::VectorXd u = step_to(op, f, op.to_dofs(fine.points[i].u), 1.0, fc);
        worst = std::max(worst, directed_hausdorff({op.embed(u)}, cloud, op));
    }
    INFO("invariance " << worst);
    CHECK(worst <= 2e-2);
}

TEST_CASE("non-hyperbolic equilibria are rejected", "[attractor]") {
    const auto op = lldtest::constant_op(32, 1.0, 0.5);
    auto eqs = find_all(op, cubic());
    eqs[0].margin = 0.0;
    CHECK_THROWS_AS(sample_attractor(op, cubic(), eqs), HyperbolicityFailure);
}
