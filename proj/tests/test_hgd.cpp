#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgdas/hgd.hpp"

using namespace hgdas;

namespace {

ProblemInstance make_instance(std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.m = 75;
    cfg.n = 150;
    cfg.nonzero_ratio = 0.08;
    cfg.noise_variance = 0.1;
    cfg.matrix_kind = MatrixKind::correlated_gaussian;
    cfg.rho = 0.5;
    cfg.seed = seed;
    return build_instance(cfg, 10.0);
}

HgdConfig zero_rate_config(Variant variant, int iterations = 40) {
    HgdConfig cfg;
    cfg.variant = variant;
    cfg.iterations = iterations;
    cfg.eta_r = cfg.eta_x = cfg.eta_z = cfg.eta_gamma = 0.0;
    return cfg;
}

HgdConfig paper_config(Variant variant) {
    HgdConfig cfg;
    cfg.variant = variant;
    cfg.iterations = 40;
    if (variant == Variant::ista) {
        cfg.eta_r = 1e-1;
        cfg.eta_x = 1e-1;
    } else {
        cfg.eta_r = 1e-1;
        cfg.eta_x = 5e-2;
        cfg.eta_z = 5e-2;
    }
    cfg.eta_gamma = 5e-9;
    return cfg;
}

}  // namespace

TEST_CASE("hgd_update arithmetic") {
    CHECK(hgd_update(1.0, 0.0, 0.1) == 1.0);
    CHECK(hgd_update(1.0, 2.0, 0.1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(hgd_update(1.0, std::nan(""), 0.1), std::invalid_argument);
}

TEST_CASE("gamma clamp keeps the step size positive") {
    // a huge positive gradient would push gamma below zero
    const double updated = std::max(hgd_update(1e-3, 1e9, 1.0), HgdConfig::gamma_min);
    CHECK(updated == HgdConfig::gamma_min);
}

TEST_CASE("zero meta rates reproduce fixed ista") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ProblemInstance prob = make_instance(500 + seed);
        const double gamma = 1.0 / spectral_norm_sq(prob.A);
        auto [x_hgd, trace] = hgd_as_ista(prob, zero_rate_config(Variant::ista));
        auto [x_ref, ref_trace] = ista(prob, gamma, 40);
        CHECK((x_hgd - x_ref).cwiseAbs().maxCoeff() <= 1e-12);
        for (std::size_t t = 0; t < trace.records.size(); ++t)
            CHECK(std::abs(trace.records[t].mse - ref_trace.records[t + 1].sq_error) <= 1e-12);
    }
}

TEST_CASE("zero meta rates reproduce fixed fista") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ProblemInstance prob = make_instance(600 + seed);
        const double gamma = 1.0 / spectral_norm_sq(prob.A);
        auto [z_hgd, trace] = hgd_as_fista(prob, zero_rate_config(Variant::fista));
        auto [z_ref, ref_trace] = fista(prob, gamma, 40);
        CHECK((z_hgd - z_ref).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("one iteration gives one trace record") {
    const ProblemInstance prob = make_instance(3);
    HgdConfig cfg = paper_config(Variant::ista);
    cfg.iterations = 1;
    auto [x, trace] = hgd_as_ista(prob, cfg);
    CHECK(trace.records.size() == 1);
}

TEST_CASE("parameters evolve exactly by -eta * hypergradient") {
    const ProblemInstance prob = make_instance(4);
    const HgdConfig cfg = paper_config(Variant::ista);
    auto [x, trace] = hgd_as_ista(prob, cfg);
    REQUIRE(trace.records.size() == 40);
    for (std::size_t t = 0; t + 1 < trace.records.size(); ++t) {
        const auto& cur = trace.records[t];
        const auto& nxt = trace.records[t + 1];
        CHECK(nxt.beta_r[0] == cur.beta_r[0] - cfg.eta_r * cur.grads.d_beta_r[0]);
        CHECK(nxt.beta_r[1] == cur.beta_r[1] - cfg.eta_r * cur.grads.d_beta_r[1]);
        CHECK(nxt.beta_x[0] == cur.beta_x[0] - cfg.eta_x * cur.grads.d_beta_x[0]);
        CHECK(nxt.gamma ==
              std::max(cur.gamma - cfg.eta_gamma * cur.grads.d_gamma, HgdConfig::gamma_min));
    }
}

TEST_CASE("fista first record has zero beta_z hypergradient") {
    const ProblemInstance prob = make_instance(5);
    auto [z, trace] = hgd_as_fista(prob, paper_config(Variant::fista));
    REQUIRE(!trace.records.empty());
    CHECK((*trace.records.front().grads.d_beta_z)[0] == 0.0);
}

TEST_CASE("hard weights in the trace are one-hot") {
    const ProblemInstance prob = make_instance(6);
    auto [z, trace] = hgd_as_fista(prob, paper_config(Variant::fista));
    for (const auto& rec : trace.records) {
        CHECK(rec.hard_r[0] + rec.hard_r[1] == 1.0);
        CHECK((rec.hard_r[0] == 1.0 || rec.hard_r[0] == 0.0));
        CHECK(rec.hard_z[0] + rec.hard_z[1] == 1.0);
    }
}

TEST_CASE("traces stay finite at the benchmark configuration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ProblemInstance prob = make_instance(700 + seed);
        auto [x, ti] = hgd_as_ista(prob, paper_config(Variant::ista));
        auto [z, tf] = hgd_as_fista(prob, paper_config(Variant::fista));
        for (const auto& rec : ti.records) {
            CHECK(std::isfinite(rec.mse));
            CHECK(std::isfinite(rec.objective));
            CHECK(std::isfinite(rec.grads.d_gamma));
        }
        for (const auto& rec : tf.records) CHECK(std::isfinite(rec.mse));
    }
}

TEST_CASE("config validation") {
    const ProblemInstance prob = make_instance(7);
    HgdConfig cfg = paper_config(Variant::ista);
    cfg.iterations = 0;
    CHECK_THROWS_AS(hgd_as_ista(prob, cfg), std::invalid_argument);
    cfg = paper_config(Variant::fista);
    CHECK_THROWS_AS(hgd_as_ista(prob, cfg), std::invalid_argument);
}
