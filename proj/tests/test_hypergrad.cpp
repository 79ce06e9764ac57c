#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "hgdas/gradcheck.hpp"

using namespace hgdas;

namespace {

ProblemInstance make_instance(std::uint64_t seed, int m = 40, int n = 80) {
    GeneratorConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.nonzero_ratio = 0.1;
    cfg.noise_variance = 0.1;
    cfg.seed = seed;
    return build_instance(cfg, 5.0);
}

StructuralParams random_params(const ProblemInstance& prob, GaussianStream& rng,
                               bool fista = false) {
    StructuralParams params;
    params.beta_r = {rng.gaussian(), rng.gaussian()};
    params.beta_x = {rng.gaussian(), rng.gaussian()};
    if (fista) params.beta_z = Eigen::Vector2d{rng.gaussian(), rng.gaussian()};
    params.gamma = 1.0 / spectral_norm_sq(prob.A);
    return params;
}

SolverState random_pre_state(const ProblemInstance& prob, GaussianStream& rng,
                             bool fista = false) {
    SolverState state;
    state.x_t.resize(prob.n());
    for (int i = 0; i < prob.n(); ++i) state.x_t[i] = 0.5 * rng.gaussian();
    if (fista) {
        Eigen::VectorXd z = state.x_t;
        for (int i = 0; i < prob.n(); ++i) z[i] += 0.2 * rng.gaussian();
        state.z_t = z;
        state.s_t = 2.5;
    }
    return state;
}

}  // namespace

TEST_CASE("closed forms match the finite-difference oracle (ista)") {
    const auto res = run_gradcheck(Variant::ista, 7, 30, 40, 80, 5.0, 50.0);
    for (const auto& [name, err] : res.max_rel_error) {
        INFO(name);
        CHECK(err <= 1e-4);
    }
    for (const auto& [name, err] : res.max_small_abs_error) {
        INFO(name);
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("closed forms match the finite-difference oracle (fista)") {
    const auto res = run_gradcheck(Variant::fista, 11, 30, 40, 80, 5.0, 50.0);
    for (const auto& [name, err] : res.max_rel_error) {
        INFO(name);
        CHECK(err <= 1e-4);
    }
    for (const auto& [name, err] : res.max_small_abs_error) {
        INFO(name);
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("beta hypergradient pairs negate exactly") {
    GaussianStream rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const ProblemInstance prob = make_instance(300 + rep);
        const StructuralParams params = random_params(prob, rng, true);
        const SolverState pre = random_pre_state(prob, rng, true);
        const SolverState state = as_fista_step(pre, params, prob, StepMode::soft, 50.0);
        const HypergradSet set = hypergrad_all_fista(state, params, prob, 50.0);
        CHECK(set.d_beta_r[1] == -set.d_beta_r[0]);
        CHECK(set.d_beta_x[1] == -set.d_beta_x[0]);
        CHECK((*set.d_beta_z)[1] == -(*set.d_beta_z)[0]);
    }
}

TEST_CASE("saturated softmax kills the beta_r hypergradient") {
    GaussianStream rng(4);
    const ProblemInstance prob = make_instance(77);
    StructuralParams params = random_params(prob, rng);
    params.beta_r = {20.0, -20.0};
    const SolverState pre = random_pre_state(prob, rng);
    const SolverState state = as_ista_step(pre, params, prob, StepMode::soft, 50.0);
    const Eigen::Vector2d d = hypergrad_beta_r_ista(state, params, prob, 50.0);
    CHECK(std::abs(d[0]) <= 1e-10);
}

TEST_CASE("beta_z hypergradient is zero at s_t = 1") {
    GaussianStream rng(5);
    const ProblemInstance prob = make_instance(88);
    const StructuralParams params = random_params(prob, rng, true);
    SolverState pre = random_pre_state(prob, rng, true);
    pre.s_t = 1.0;
    const SolverState state = as_fista_step(pre, params, prob, StepMode::soft, 50.0);
    const HypergradSet set = hypergrad_all_fista(state, params, prob, 50.0);
    CHECK((*set.d_beta_z)[0] == 0.0);
}

TEST_CASE("appendix chain factor is 1 at s_t = 1 with even z weights") {
    // 0.5 (s1 + s0 - 1)/s1 + 0.5 = 1 when s0 = 1.
    const double s1 = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(0.5 * (s1 + 1.0 - 1.0) / s1 + 0.5 == 1.0);
}

TEST_CASE("lambda = 0 reduces to least-squares sensitivity and still matches FD") {
    GaussianStream rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        ProblemInstance prob = make_instance(400 + rep);
        prob.lambda = 0.0;
        const StructuralParams params = random_params(prob, rng);
        const SolverState pre = random_pre_state(prob, rng);
        const SolverState state = as_ista_step(pre, params, prob, StepMode::soft, 50.0);
        const double d = hypergrad_gamma_ista(state, params, prob, 50.0);
        const double fd =
            fd_hypergradient(AlphaId::gamma, pre, params, prob, 50.0, 1e-4 * params.gamma);
        CHECK(std::abs(d - fd) <= 1e-4 * std::max(1e-6, std::abs(d)));
    }
}

TEST_CASE("fd oracle is stable under halving the step") {
    GaussianStream rng(7);
    const ProblemInstance prob = make_instance(55);
    const StructuralParams params = random_params(prob, rng);
    const SolverState pre = random_pre_state(prob, rng);
    const double f1 = fd_hypergradient(AlphaId::beta_r1, pre, params, prob, 50.0, 1e-6);
    const double f2 = fd_hypergradient(AlphaId::beta_r1, pre, params, prob, 50.0, 5e-7);
    CHECK(std::abs(f1 - f2) <= 1e-5 * std::max(1.0, std::abs(f1)));
}

TEST_CASE("fd oracle negation symmetry across the beta pair") {
    GaussianStream rng(8);
    const ProblemInstance prob = make_instance(66);
    const StructuralParams params = random_params(prob, rng);
    const SolverState pre = random_pre_state(prob, rng);
    const double d1 = fd_hypergradient(AlphaId::beta_x1, pre, params, prob, 50.0, 1e-6);
    const double d2 = fd_hypergradient(AlphaId::beta_x2, pre, params, prob, 50.0, 1e-6);
    CHECK(std::abs(d1 + d2) <= 1e-7 * std::max(1.0, std::abs(d1)));
}

TEST_CASE("error paths") {
    GaussianStream rng(9);
    const ProblemInstance prob = make_instance(99);
    const StructuralParams params = random_params(prob, rng);
    const SolverState pre = random_pre_state(prob, rng);
    CHECK_THROWS_AS(fd_hypergradient(AlphaId::gamma, pre, params, prob, 50.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fd_hypergradient(AlphaId::beta_z1, pre, params, prob, 50.0, 1e-6),
                    std::invalid_argument);
    SolverState empty;
    CHECK_THROWS_AS(hypergrad_gamma_ista(empty, params, prob, 50.0), std::invalid_argument);
    const SolverState state = as_ista_step(pre, params, prob, StepMode::soft, 50.0);
    CHECK_THROWS_AS(hypergrad_all_fista(state, params, prob, 50.0), std::invalid_argument);
}

TEST_CASE("hypergradient cost scales linearly in n") {
    auto time_for = [](int n) {
        const ProblemInstance prob = make_instance(1234, 50, n);
        GaussianStream rng(10);
        StructuralParams params;
        params.beta_r = {0.5, -0.5};
        params.beta_x = {-0.5, 0.5};
        params.gamma = 1.0 / spectral_norm_sq(prob.A);
        SolverState pre;
        pre.x_t.resize(n);
        for (int i = 0; i < n; ++i) pre.x_t[i] = rng.gaussian();
        const SolverState state = as_ista_step(pre, params, prob, StepMode::soft, 50.0);

        double best = 1e300;
        for (int rep = 0; rep < 5; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            for (int k = 0; k < 20; ++k)
                (void)hypergrad_all_ista(state, params, prob, 50.0);
            const auto stop = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(stop - start).count());
        }
        return best;
    };
    const double t1 = time_for(2000);
    const double t2 = time_for(4000);
    CHECK(t2 / t1 < 3.2);  // quadratic cost would give ~4x
}
