#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "hgdas/problem.hpp"
#include "hgdas/smooth.hpp"

namespace hgdas {

enum class StepMode { hard, soft };

struct StructuralParams {
    Eigen::Vector2d beta_r{1.0, -1.0};
    Eigen::Vector2d beta_x{-1.0, 1.0};
    std::optional<Eigen::Vector2d> beta_z;  // FISTA only
    double gamma = 0.0;
};

struct StepWeights {
    Eigen::Vector2d soft_r, soft_x, soft_z;
    Eigen::Vector2d hard_r, hard_x, hard_z;
};

// State carried across one architecture-searched iteration. For the FISTA
// variant z_t is the momentum point (the input to the gradient step) and
// x_t is the previous proximal iterate; for ISTA only x_t is used.
struct SolverState {
    int t = 0;
    Eigen::VectorXd x_t;
    Eigen::VectorXd r_t;
    Eigen::VectorXd x_next;
    std::optional<Eigen::VectorXd> z_t;
    std::optional<Eigen::VectorXd> z_next;
    double s_t = 1.0;
    double s_next = 1.0;
};

// Two-way softmax, stable under large betas.
inline Eigen::Vector2d softmax_weights(const Eigen::Vector2d& beta) {
    const double m = beta.maxCoeff();
    const double e1 = std::exp(beta[0] - m);
    const double e2 = std::exp(beta[1] - m);
    const double s = e1 + e2;
    return {e1 / s, e2 / s};
}

// One-hot selection of the larger weight; a tie selects k = 1.
inline Eigen::Vector2d round_weights(const Eigen::Vector2d& soft) {
    return soft[0] >= soft[1] ? Eigen::Vector2d{1.0, 0.0} : Eigen::Vector2d{0.0, 1.0};
}

// f(v) = v - gamma A^T (A v - y), the gradient descent step.
inline Eigen::VectorXd f_step(const Eigen::VectorXd& v, const ProblemInstance& prob,
                              double gamma) {
    if (v.size() != prob.A.cols()) throw std::invalid_argument("f_step: dimension mismatch");
    return v - gamma * (prob.A.transpose() * (prob.A * v - prob.y));
}

// g(v) = S_{gamma lambda}(v), the shrinkage step.
inline Eigen::VectorXd g_step(const Eigen::VectorXd& v, const ProblemInstance& prob,
                              double gamma) {
    if (v.size() != prob.A.cols()) throw std::invalid_argument("g_step: dimension mismatch");
    return soft_threshold(v, gamma * prob.lambda);
}

inline Eigen::VectorXd g_step_smooth(const Eigen::VectorXd& v, const ProblemInstance& prob,
                                     double gamma, double p) {
    return smooth_soft_threshold(v, gamma * prob.lambda, p);
}

namespace detail {

// Weighted combination of f and g applied to v. Hard one-hot weights take
// the single branch so the operation sequence is identical to the classic
// solvers; soft mode uses the smoothed shrinkage.
inline Eigen::VectorXd combine_fg(const Eigen::Vector2d& w, const Eigen::VectorXd& v,
                                  const ProblemInstance& prob, double gamma, StepMode mode,
                                  double p) {
    if (mode == StepMode::hard) {
        if (w[0] == 1.0) return f_step(v, prob, gamma);
        if (w[1] == 1.0) return g_step(v, prob, gamma);
        return w[0] * f_step(v, prob, gamma) + w[1] * g_step(v, prob, gamma);
    }
    return w[0] * f_step(v, prob, gamma) + w[1] * g_step_smooth(v, prob, gamma, p);
}

}  // namespace detail

inline StepWeights make_weights(const StructuralParams& params) {
    StepWeights w;
    w.soft_r = softmax_weights(params.beta_r);
    w.soft_x = softmax_weights(params.beta_x);
    w.hard_r = round_weights(w.soft_r);
    w.hard_x = round_weights(w.soft_x);
    if (params.beta_z) {
        w.soft_z = softmax_weights(*params.beta_z);
        w.hard_z = round_weights(w.soft_z);
    } else {
        w.soft_z = {1.0, 0.0};
        w.hard_z = {1.0, 0.0};
    }
    return w;
}

// One AS-ISTA iteration:
//   r       = w_r1 f(x) + w_r2 g(x)
//   x_next  = w_x1 f(r) + w_x2 g(r)
// Hard mode uses rounded weights and the exact shrinkage; soft mode uses
// unrounded weights and the smoothed shrinkage (the finite-difference
// oracle path).
inline SolverState as_ista_step(const SolverState& state, const StructuralParams& params,
                                const ProblemInstance& prob, StepMode mode, double p = 0.0) {
    if (mode == StepMode::soft && !(p > 0.0))
        throw std::invalid_argument("as_ista_step: soft mode requires smoothing p > 0");
    const StepWeights w = make_weights(params);
    const Eigen::Vector2d& wr = (mode == StepMode::hard) ? w.hard_r : w.soft_r;
    const Eigen::Vector2d& wx = (mode == StepMode::hard) ? w.hard_x : w.soft_x;

    SolverState next;
    next.t = state.t;
    next.x_t = state.x_t;
    next.r_t = detail::combine_fg(wr, state.x_t, prob, params.gamma, mode, p);
    next.x_next = detail::combine_fg(wx, next.r_t, prob, params.gamma, mode, p);
    return next;
}

// One AS-FISTA iteration: the AS-ISTA core reads the momentum point z_t,
// then
//   s_next = (1 + sqrt(1 + 4 s_t^2)) / 2
//   z_next = w_z1 h(x_next, x_t, s_next, s_t) + w_z2 x_next
// with h the classic FISTA extrapolation.
inline SolverState as_fista_step(const SolverState& state, const StructuralParams& params,
                                 const ProblemInstance& prob, StepMode mode, double p = 0.0) {
    if (!state.z_t) throw std::invalid_argument("as_fista_step: missing momentum state z_t");
    if (!(state.s_t >= 1.0)) throw std::invalid_argument("as_fista_step: require s_t >= 1");
    if (mode == StepMode::soft && !(p > 0.0))
        throw std::invalid_argument("as_fista_step: soft mode requires smoothing p > 0");

    const StepWeights w = make_weights(params);
    const Eigen::Vector2d& wr = (mode == StepMode::hard) ? w.hard_r : w.soft_r;
    const Eigen::Vector2d& wx = (mode == StepMode::hard) ? w.hard_x : w.soft_x;
    const Eigen::Vector2d& wz = (mode == StepMode::hard) ? w.hard_z : w.soft_z;

    SolverState next;
    next.t = state.t;
    next.x_t = state.x_t;
    next.z_t = state.z_t;
    next.s_t = state.s_t;
    next.r_t = detail::combine_fg(wr, *state.z_t, prob, params.gamma, mode, p);
    next.x_next = detail::combine_fg(wx, next.r_t, prob, params.gamma, mode, p);
    next.s_next = (1.0 + std::sqrt(1.0 + 4.0 * state.s_t * state.s_t)) / 2.0;

    const Eigen::VectorXd h =
        next.x_next + ((state.s_t - 1.0) / next.s_next) * (next.x_next - state.x_t);
    if (mode == StepMode::hard && wz[0] == 1.0)
        next.z_next = h;
    else if (mode == StepMode::hard && wz[1] == 1.0)
        next.z_next = next.x_next;
    else
        next.z_next = wz[0] * h + wz[1] * next.x_next;
    return next;
}

}  // namespace hgdas
