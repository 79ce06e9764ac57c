#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgdas/problem.hpp"

using namespace hgdas;

namespace {

GeneratorConfig base_config() {
    GeneratorConfig cfg;
    cfg.m = 75;
    cfg.n = 150;
    cfg.nonzero_ratio = 0.08;
    cfg.noise_variance = 0.1;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("signal sparsity matches the Bernoulli ratio") {
    GeneratorConfig cfg = base_config();
    cfg.n = 100000;
    GaussianStream rng(1);
    const Eigen::VectorXd x = generate_signal(cfg, rng);
    const double frac = static_cast<double>((x.array() != 0.0).count()) / cfg.n;
    CHECK(std::abs(frac - 0.08) <= 0.005);
}

TEST_CASE("vanishing ratio gives the zero vector") {
    GeneratorConfig cfg = base_config();
    cfg.nonzero_ratio = 1e-12;
    GaussianStream rng(3);
    CHECK(generate_signal(cfg, rng).isZero(0.0));
}

TEST_CASE("invalid ratio rejected") {
    GeneratorConfig cfg = base_config();
    cfg.nonzero_ratio = 1.5;
    GaussianStream rng(1);
    CHECK_THROWS_AS(generate_signal(cfg, rng), std::invalid_argument);
    cfg.nonzero_ratio = 0.0;
    CHECK_THROWS_AS(generate_signal(cfg, rng), std::invalid_argument);
}

TEST_CASE("rho = 0 correlated matrix reduces to iid") {
    GeneratorConfig cfg = base_config();
    cfg.matrix_kind = MatrixKind::correlated_gaussian;
    cfg.rho = 0.0;
    GaussianStream rng_a(7), rng_b(7);
    const Eigen::MatrixXd a = generate_matrix(cfg, rng_a);
    cfg.matrix_kind = MatrixKind::iid_gaussian;
    const Eigen::MatrixXd b = generate_matrix(cfg, rng_b);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("column covariance converges to Toeplitz rho^|j-l|") {
    GeneratorConfig cfg = base_config();
    cfg.m = 100;  // 100 x 149 lag-1 pairs >= 1e4 samples
    cfg.matrix_kind = MatrixKind::correlated_gaussian;
    cfg.rho = 0.5;
    GaussianStream rng(11);
    const Eigen::MatrixXd a = generate_matrix(cfg, rng);
    double lag1 = 0.0, lag2 = 0.0, var = 0.0;
    int n1 = 0, n2 = 0, nv = 0;
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.n; ++j) {
            var += a(i, j) * a(i, j);
            ++nv;
            if (j + 1 < cfg.n) { lag1 += a(i, j) * a(i, j + 1); ++n1; }
            if (j + 2 < cfg.n) { lag2 += a(i, j) * a(i, j + 2); ++n2; }
        }
    }
    CHECK(std::abs(var / nv - 1.0) <= 0.02);
    CHECK(std::abs(lag1 / n1 - 0.5) <= 0.02);
    CHECK(std::abs(lag2 / n2 - 0.25) <= 0.02);
}

TEST_CASE("rho >= 1 rejected") {
    GeneratorConfig cfg = base_config();
    cfg.matrix_kind = MatrixKind::correlated_gaussian;
    cfg.rho = 1.0;
    GaussianStream rng(1);
    CHECK_THROWS_AS(generate_matrix(cfg, rng), std::invalid_argument);
}

TEST_CASE("seeded generation is bit-identical on repeat") {
    GeneratorConfig cfg = base_config();
    GaussianStream r1(99), r2(99);
    const Eigen::MatrixXd a1 = generate_matrix(cfg, r1);
    const Eigen::MatrixXd a2 = generate_matrix(cfg, r2);
    CHECK((a1 - a2).cwiseAbs().maxCoeff() == 0.0);

    const ProblemInstance p1 = build_instance(cfg, 10.0);
    const ProblemInstance p2 = build_instance(cfg, 10.0);
    CHECK((p1.A - p2.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p1.y - p2.y).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p1.x_star - p2.x_star).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noiseless instance satisfies y = A x_star exactly") {
    GeneratorConfig cfg = base_config();
    cfg.noise_variance = 0.0;
    const ProblemInstance prob = build_instance(cfg, 10.0);
    CHECK((prob.y - prob.A * prob.x_star).norm() == 0.0);
}

TEST_CASE("benchmark-scale instance is well formed") {
    const ProblemInstance prob = build_instance(base_config(), 10.0);
    CHECK(prob.m() == 75);
    CHECK(prob.n() == 150);
    CHECK(prob.lambda == 10.0);
    CHECK(prob.y.allFinite());
}

TEST_CASE("invalid lambda rejected") {
    CHECK_THROWS_AS(build_instance(base_config(), 0.0), std::invalid_argument);
}
