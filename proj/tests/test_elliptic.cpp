#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lld/elliptic.hpp"
#include "lld/errors.hpp"
#include "support.hpp"

using namespace lld;
using lldtest::kPi;

namespace {

// Random smooth load, constant (its average) on Omega_0, unit L^2 norm.
GridFunction random_load(std::mt19937_64& rng, const std::shared_ptr<const Mesh>& mesh, const DiscreteOperator& op) {
    const Eigen::VectorXd a = lldtest::random_vector(rng, 6);
    Eigen::VectorXd g = lldtest::nodal(*mesh, [&](double x) {
        double s = 0;
        for (int k = 0; k < 6; ++k) s += a[k] * std::cos(k * kPi * x);
        return s;
    });
    const double avg = omega0_average(*mesh, g);
    for (Eigen::Index i = mesh->i_x1; i <= mesh->i_x2; ++i) g[i] = avg;
    g /= std::sqrt(op.M_full.quad(g));
    return {mesh, g};
}

}  // namespace

TEST_CASE("trivial solves", "[elliptic]") {
    const auto op = lldtest::constant_op(128, 1.0, 2.5);
    const auto s = solve(op, GridFunction{op.mesh, Eigen::VectorXd::Constant(op.dim(), 2.5)});
    CHECK((s.u.values.array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK(s.residual <= 1e-10);
    const auto z = solve(op, GridFunction{op.mesh, Eigen::VectorXd::Zero(op.dim())});
    CHECK(z.u.values.norm() == 0.0);
}

TEST_CASE("solve is linear", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.01, 512);
    std::mt19937_64 rng(3);
    for (const auto* op : {&pr.eps_op, &pr.limit_op}) {
        const auto g1 = random_load(rng, pr.mesh, *op), g2 = random_load(rng, pr.mesh, *op);
        const auto u = solve(*op, GridFunction{pr.mesh, 2.0 * g1.values - 3.0 * g2.values});
        const auto u1 = solve(*op, g1), u2 = solve(*op, g2);
        const Eigen::VectorXd d = u.u.values - (2.0 * u1.u.values - 3.0 * u2.u.values);
        CHECK(d.cwiseAbs().maxCoeff() <= 1e-10 * u.u.values.cwiseAbs().maxCoeff());
        CHECK(u.residual <= 1e-10);
    }
}

TEST_CASE("constant data gives identical solutions", "[elliptic]") {
    auto cfg = lldtest::constant_config(1.5);
    const auto pr = make_pair(cfg, 0.05, 256);
    GridFunction g{pr.mesh, Eigen::VectorXd::Ones(pr.mesh->nodes())};
    CHECK(solution_diff(pr.eps_op, pr.limit_op, g) <= 1e-11);
}

TEST_CASE("loads must be constant on Omega_0", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 256);
    GridFunction g{pr.mesh, lldtest::nodal(*pr.mesh, [](double x) { return x; })};
    CHECK_THROWS_AS(solution_diff(pr.eps_op, pr.limit_op, g), PreconditionViolation);
}

TEST_CASE("solution difference decreases and is mesh-converged", "[elliptic]") {
    ProblemConfig cfg;
    auto value = [&](double eps, int n) {
        const auto pr = make_pair(cfg, eps, n);
        return solution_diff(pr.eps_op, pr.limit_op, test_loads(pr.mesh, 2)[1]);
    };
    const double a = value(0.1, 2048), b = value(0.01, 2048);
    CHECK(b < a);
    const double fine = value(0.01, 8192);
    CHECK(std::abs(b - fine) <= 0.05 * fine);
}

TEST_CASE("operator norm bounds every admissible load", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.02, 512);
    const double norm = solution_op_diff_norm(pr.eps_op, pr.limit_op);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        const auto g = random_load(rng, pr.mesh, pr.eps_op);
        CHECK(solution_diff(pr.eps_op, pr.limit_op, g) <= norm * (1 + 1e-9));
    }
    CHECK(shifted_diff_norm(pr.eps_op, pr.limit_op, 0.0).value == Catch::Approx(norm).epsilon(1e-12));
}

TEST_CASE("Lanczos agrees with the dense oracle", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 256);
    for (double mu : {0.0, 1.0, 10.0}) {
        const double dense = shifted_diff_norm_dense(pr.eps_op, pr.limit_op, mu);
        CHECK(shifted_diff_norm(pr.eps_op, pr.limit_op, mu).value == Catch::Approx(dense).epsilon(1e-8));
    }
}

TEST_CASE("identical operators have zero difference", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 256);
    for (double mu : {0.0, 1.0, 10.0}) CHECK(shifted_diff_norm(pr.limit_op, pr.limit_op, mu).value <= 1e-12);
}

TEST_CASE("shift damps the difference", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 1024);
    const double base = solution_op_diff_norm(pr.eps_op, pr.limit_op);
    CHECK(shifted_diff_norm(pr.eps_op, pr.limit_op, 10.0).value <= 1.5 * base);
}

TEST_CASE("test loads are normalized and admissible", "[elliptic]") {
    ProblemConfig cfg;
    const auto pr = make_pair(cfg, 0.05, 256);
    for (const auto& g : test_loads(pr.mesh, 4)) {
        CHECK(pr.eps_op.M_full.quad(g.values) == Catch::Approx(1.0).epsilon(1e-12));
        CHECK_NOTHROW(solution_diff(pr.eps_op, pr.limit_op, g));
    }
}
