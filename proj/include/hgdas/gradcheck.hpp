#pragma once

#include <map>
#include <string>
#include <vector>

#include "hgdas/classic.hpp"
#include "hgdas/hgd.hpp"
#include "hgdas/hypergrad.hpp"
#include "hgdas/rng.hpp"

namespace hgdas {

struct GradcheckResult {
    // Worst relative error per parameter, over states where the analytic
    // value is large enough for a relative comparison.
    std::map<std::string, double> max_rel_error;
    // Worst absolute error over the remaining (tiny-gradient) states.
    std::map<std::string, double> max_small_abs_error;
    int cases = 0;

    bool passed(double rel_tol = 1e-4, double abs_tol = 1e-9) const {
        for (const auto& [name, err] : max_rel_error)
            if (err > rel_tol) return false;
        for (const auto& [name, err] : max_small_abs_error)
            if (err > abs_tol) return false;
        return true;
    }
};

namespace detail {

inline void tally(GradcheckResult& res, const std::string& name, double analytic, double fd) {
    const double err = std::abs(analytic - fd);
    if (std::abs(analytic) >= 1e-6) {
        double& slot = res.max_rel_error[name];
        slot = std::max(slot, err / std::abs(analytic));
    } else {
        double& slot = res.max_small_abs_error[name];
        slot = std::max(slot, err);
    }
}

}  // namespace detail

// Validates every closed-form hypergradient against the central
// finite-difference oracle on one-step soft-mode forwards from random
// states. Defaults match the benchmark setting (M,N,lambda,p) =
// (75,150,10,50).
inline GradcheckResult run_gradcheck(Variant variant, std::uint64_t seed, int cases,
                                     int m = 75, int n = 150, double lambda = 10.0,
                                     double p = 50.0) {
    GradcheckResult res;
    res.cases = cases;
    const double delta_beta = 1e-6;

    for (int c = 0; c < cases; ++c) {
        GaussianStream rng(substream_seed(seed, static_cast<std::uint64_t>(c)));
        ProblemInstance prob;
        prob.A.resize(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) prob.A(i, j) = rng.gaussian();
        prob.x_star = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.08) prob.x_star[i] = rng.gaussian();
        prob.lambda = lambda;
        prob.y = prob.A * prob.x_star;
        for (int i = 0; i < m; ++i) prob.y[i] += std::sqrt(0.1) * rng.gaussian();

        StructuralParams params;
        params.beta_r = {4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)};
        params.beta_x = {4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)};
        params.gamma = (0.5 + 1.5 * rng.uniform()) / spectral_norm_sq(prob.A);
        const double delta_gamma = 1e-4 * params.gamma;

        SolverState pre;
        pre.x_t.resize(n);
        for (int i = 0; i < n; ++i) pre.x_t[i] = 0.5 * rng.gaussian();

        if (variant == Variant::fista) {
            params.beta_z = Eigen::Vector2d{4.0 * (rng.uniform() - 0.5),
                                            4.0 * (rng.uniform() - 0.5)};
            Eigen::VectorXd z = pre.x_t;
            for (int i = 0; i < n; ++i) z[i] += 0.2 * rng.gaussian();
            pre.z_t = z;
            pre.s_t = 1.0 + 4.0 * rng.uniform();
        }

        const SolverState state =
            variant == Variant::fista
                ? as_fista_step(pre, params, prob, StepMode::soft, p)
                : as_ista_step(pre, params, prob, StepMode::soft, p);

        const HypergradSet set = variant == Variant::fista
                                     ? hypergrad_all_fista(state, params, prob, p)
                                     : hypergrad_all_ista(state, params, prob, p);

        detail::tally(res, "gamma", set.d_gamma,
                      fd_hypergradient(AlphaId::gamma, pre, params, prob, p, delta_gamma));
        detail::tally(res, "beta_r1", set.d_beta_r[0],
                      fd_hypergradient(AlphaId::beta_r1, pre, params, prob, p, delta_beta));
        detail::tally(res, "beta_r2", set.d_beta_r[1],
                      fd_hypergradient(AlphaId::beta_r2, pre, params, prob, p, delta_beta));
        detail::tally(res, "beta_x1", set.d_beta_x[0],
                      fd_hypergradient(AlphaId::beta_x1, pre, params, prob, p, delta_beta));
        detail::tally(res, "beta_x2", set.d_beta_x[1],
                      fd_hypergradient(AlphaId::beta_x2, pre, params, prob, p, delta_beta));
        if (variant == Variant::fista) {
            detail::tally(res, "beta_z1", (*set.d_beta_z)[0],
                          fd_hypergradient(AlphaId::beta_z1, pre, params, prob, p, delta_beta));
            detail::tally(res, "beta_z2", (*set.d_beta_z)[1],
                          fd_hypergradient(AlphaId::beta_z2, pre, params, prob, p, delta_beta));
        }
    }
    return res;
}

struct SoftHardStats {
    double mean_rel_diff = 0.0;
    double max_rel_diff = 0.0;
};

// The online solvers compute hypergradients from hard-mode forward values
// while the closed forms are exact only for the smooth soft-mode map; this
// measures the resulting gap. Reported, not corrected.
inline SoftHardStats soft_hard_discrepancy(Variant variant, std::uint64_t seed, int cases,
                                           int m = 75, int n = 150, double lambda = 10.0,
                                           double p = 50.0) {
    SoftHardStats stats;
    int counted = 0;
    for (int c = 0; c < cases; ++c) {
        GaussianStream rng(substream_seed(seed ^ 0x5048ULL, static_cast<std::uint64_t>(c)));
        ProblemInstance prob;
        prob.A.resize(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) prob.A(i, j) = rng.gaussian();
        prob.x_star = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.08) prob.x_star[i] = rng.gaussian();
        prob.lambda = lambda;
        prob.y = prob.A * prob.x_star;

        StructuralParams params;
        params.beta_r = {2.0 * (rng.uniform() - 0.5), 2.0 * (rng.uniform() - 0.5)};
        params.beta_x = {2.0 * (rng.uniform() - 0.5), 2.0 * (rng.uniform() - 0.5)};
        if (variant == Variant::fista)
            params.beta_z = Eigen::Vector2d{2.0 * (rng.uniform() - 0.5),
                                            2.0 * (rng.uniform() - 0.5)};
        params.gamma = 1.0 / spectral_norm_sq(prob.A);

        SolverState pre;
        pre.x_t.resize(n);
        for (int i = 0; i < n; ++i) pre.x_t[i] = 0.5 * rng.gaussian();
        if (variant == Variant::fista) {
            pre.z_t = pre.x_t;
            pre.s_t = 1.0 + 3.0 * rng.uniform();
        }

        auto grads_from = [&](StepMode mode) {
            const SolverState state =
                variant == Variant::fista ? as_fista_step(pre, params, prob, mode, p)
                                          : as_ista_step(pre, params, prob, mode, p);
            return variant == Variant::fista ? hypergrad_all_fista(state, params, prob, p)
                                             : hypergrad_all_ista(state, params, prob, p);
        };
        const HypergradSet hard = grads_from(StepMode::hard);
        const HypergradSet soft = grads_from(StepMode::soft);

        auto accumulate = [&](double a, double b) {
            const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
            const double rel = std::abs(a - b) / scale;
            stats.mean_rel_diff += rel;
            stats.max_rel_diff = std::max(stats.max_rel_diff, rel);
            ++counted;
        };
        accumulate(hard.d_gamma, soft.d_gamma);
        accumulate(hard.d_beta_r[0], soft.d_beta_r[0]);
        accumulate(hard.d_beta_x[0], soft.d_beta_x[0]);
        if (variant == Variant::fista)
            accumulate((*hard.d_beta_z)[0], (*soft.d_beta_z)[0]);
    }
    if (counted > 0) stats.mean_rel_diff /= counted;
    return stats;
}

}  // namespace hgdas
