#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hgdas/arch.hpp"
#include "hgdas/classic.hpp"
#include "hgdas/hypergrad.hpp"
#include "hgdas/problem.hpp"
#include "hgdas/smooth.hpp"

namespace hgdas {

enum class Variant { ista, fista };

struct HgdConfig {
    Variant variant = Variant::ista;
    int iterations = 40;
    double eta_r = 1e-1;
    double eta_x = 1e-1;
    double eta_z = 5e-2;      // FISTA only
    double eta_gamma = 5e-9;
    double p = 50.0;
    StructuralParams init_params;  // init_params.gamma <= 0 means 1/s_max^2
    static constexpr double gamma_min = 1e-12;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("HgdConfig: iterations must be >= 1");
        if (eta_r < 0.0 || eta_x < 0.0 || eta_z < 0.0 || eta_gamma < 0.0)
            throw std::invalid_argument("HgdConfig: meta rates must be nonnegative");
        if (!(p > 0.0)) throw std::invalid_argument("HgdConfig: p must be positive");
    }
};

struct RunTrace {
    struct Record {
        int t;
        double mse;        // ||estimate - x_star||^2 after this iteration
        double objective;
        double surrogate;
        Eigen::Vector2d soft_r, soft_x, soft_z;
        Eigen::Vector2d hard_r, hard_x, hard_z;
        double gamma;
        Eigen::Vector2d beta_r, beta_x, beta_z;
        HypergradSet grads;
        bool has_z = false;
    };
    double initial_mse = 0.0;  // t = 0, estimate is x0
    std::vector<Record> records;
    bool is_fista = false;
};

struct SolverAbort : std::runtime_error {
    int iteration;
    explicit SolverAbort(int t)
        : std::runtime_error("non-finite solver state at iteration " + std::to_string(t)),
          iteration(t) {}
};

// alpha <- alpha - eta * grad
inline double hgd_update(double alpha, double grad, double eta) {
    if (!std::isfinite(grad)) throw std::invalid_argument("hgd_update: non-finite gradient");
    return alpha - eta * grad;
}

namespace detail {

inline void apply_updates(StructuralParams& params, const HypergradSet& grads,
                          const HgdConfig& cfg) {
    params.beta_r[0] = hgd_update(params.beta_r[0], grads.d_beta_r[0], cfg.eta_r);
    params.beta_r[1] = hgd_update(params.beta_r[1], grads.d_beta_r[1], cfg.eta_r);
    params.beta_x[0] = hgd_update(params.beta_x[0], grads.d_beta_x[0], cfg.eta_x);
    params.beta_x[1] = hgd_update(params.beta_x[1], grads.d_beta_x[1], cfg.eta_x);
    if (params.beta_z && grads.d_beta_z) {
        (*params.beta_z)[0] = hgd_update((*params.beta_z)[0], (*grads.d_beta_z)[0], cfg.eta_z);
        (*params.beta_z)[1] = hgd_update((*params.beta_z)[1], (*grads.d_beta_z)[1], cfg.eta_z);
    }
    params.gamma =
        std::max(hgd_update(params.gamma, grads.d_gamma, cfg.eta_gamma), HgdConfig::gamma_min);
}

inline void record_iteration(RunTrace& trace, int t, const Eigen::VectorXd& estimate,
                             const SolverState& state, const StructuralParams& params,
                             const HypergradSet& grads, const ProblemInstance& prob,
                             const HgdConfig& cfg, bool fista) {
    const StepWeights w = make_weights(params);
    RunTrace::Record rec;
    rec.t = t;
    rec.mse = (estimate - prob.x_star).squaredNorm();
    rec.objective = objective(estimate, prob);
    rec.surrogate = surrogate_objective(estimate, prob, cfg.p);
    rec.soft_r = w.soft_r;
    rec.soft_x = w.soft_x;
    rec.soft_z = w.soft_z;
    rec.hard_r = w.hard_r;
    rec.hard_x = w.hard_x;
    rec.hard_z = w.hard_z;
    rec.gamma = params.gamma;
    rec.beta_r = params.beta_r;
    rec.beta_x = params.beta_x;
    rec.beta_z = params.beta_z.value_or(Eigen::Vector2d{0.0, 0.0});
    rec.grads = grads;
    rec.has_z = fista;
    if (!std::isfinite(rec.mse) || !std::isfinite(rec.objective)) throw SolverAbort(t);
    trace.records.push_back(std::move(rec));
    (void)state;
}

}  // namespace detail

// Algorithm: per iteration, soft weights are rounded for the forward pass,
// hypergradients are computed from the just-finished step with the
// unrounded weights, then all parameters are updated simultaneously.
inline std::pair<Eigen::VectorXd, RunTrace> hgd_as_ista(const ProblemInstance& prob,
                                                        const HgdConfig& cfg) {
    cfg.validate();
    if (cfg.variant != Variant::ista)
        throw std::invalid_argument("hgd_as_ista: config variant mismatch");

    StructuralParams params = cfg.init_params;
    params.beta_z.reset();
    if (!(params.gamma > 0.0)) params.gamma = 1.0 / spectral_norm_sq(prob.A);

    RunTrace trace;
    trace.is_fista = false;
    SolverState state;
    state.x_t = Eigen::VectorXd::Zero(prob.n());
    trace.initial_mse = (state.x_t - prob.x_star).squaredNorm();

    for (int t = 0; t < cfg.iterations; ++t) {
        state.t = t;
        SolverState stepped = as_ista_step(state, params, prob, StepMode::hard);
        const HypergradSet grads = hypergrad_all_ista(stepped, params, prob, cfg.p);
        detail::record_iteration(trace, t, stepped.x_next, stepped, params, grads, prob, cfg,
                                 false);
        detail::apply_updates(params, grads, cfg);
        state.x_t = std::move(stepped.x_next);
    }
    return {state.x_t, trace};
}

inline std::pair<Eigen::VectorXd, RunTrace> hgd_as_fista(const ProblemInstance& prob,
                                                         const HgdConfig& cfg) {
    cfg.validate();
    if (cfg.variant != Variant::fista)
        throw std::invalid_argument("hgd_as_fista: config variant mismatch");

    StructuralParams params = cfg.init_params;
    if (!params.beta_z) params.beta_z = Eigen::Vector2d{1.0, -1.0};
    if (!(params.gamma > 0.0)) params.gamma = 1.0 / spectral_norm_sq(prob.A);

    RunTrace trace;
    trace.is_fista = true;
    SolverState state;
    state.x_t = Eigen::VectorXd::Zero(prob.n());
    state.z_t = state.x_t;
    state.s_t = 1.0;
    trace.initial_mse = (state.x_t - prob.x_star).squaredNorm();

    for (int t = 0; t < cfg.iterations; ++t) {
        state.t = t;
        SolverState stepped = as_fista_step(state, params, prob, StepMode::hard);
        const HypergradSet grads = hypergrad_all_fista(stepped, params, prob, cfg.p);
        detail::record_iteration(trace, t, *stepped.z_next, stepped, params, grads, prob, cfg,
                                 true);
        detail::apply_updates(params, grads, cfg);
        state.x_t = std::move(stepped.x_next);
        state.z_t = std::move(*stepped.z_next);
        state.s_t = stepped.s_next;
    }
    return {*state.z_t, trace};
}

}  // namespace hgdas
