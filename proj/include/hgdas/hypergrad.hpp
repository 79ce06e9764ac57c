#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "hgdas/arch.hpp"
#include "hgdas/problem.hpp"
#include "hgdas/smooth.hpp"

namespace hgdas {

struct HypergradSet {
    double d_gamma = 0.0;
    Eigen::Vector2d d_beta_r{0.0, 0.0};
    Eigen::Vector2d d_beta_x{0.0, 0.0};
    std::optional<Eigen::Vector2d> d_beta_z;
};

namespace detail {

// sigma(p(-v - tau)) - sigma(p(v - tau)) elementwise; the tau-derivative
// factor of the smoothed shrinkage.
inline Eigen::VectorXd shrink_tau_diff(const Eigen::VectorXd& v, double tau, double p) {
    return v.unaryExpr(
        [tau, p](double q) { return sigmoid(p * (-q - tau)) - sigmoid(p * (q - tau)); });
}

// (I - gamma A^T A) v, kept as matrix-vector products.
inline Eigen::VectorXd apply_grad_step_jacobian(const Eigen::VectorXd& v,
                                                const ProblemInstance& prob, double gamma) {
    return v - gamma * (prob.A.transpose() * (prob.A * v));
}

// Everything the closed forms share for one iteration. Soft (unrounded)
// weights and the smoothed shrinkage are used throughout, regardless of how
// the forward values in `state` were produced (straight-through estimator).
struct HypergradWork {
    const SolverState& state;
    const StructuralParams& params;
    const ProblemInstance& prob;
    double p;

    Eigen::Vector2d wr, wx, wz;
    double tau;
    bool fista;
    double z_factor;  // Appendix-C chain factor, 1 for ISTA
    Eigen::VectorXd input;     // z_t for FISTA, x_t for ISTA
    Eigen::VectorXd grad;      // grad J~ at the estimate (x_next or z_next)
    Eigen::VectorXd dg_diag;   // d g~/dr diagonal at r_t

    HypergradWork(const SolverState& s, const StructuralParams& pr, const ProblemInstance& pb,
                  double p_)
        : state(s), params(pr), prob(pb), p(p_) {
        if (s.x_t.size() == 0 || s.r_t.size() == 0 || s.x_next.size() == 0)
            throw std::invalid_argument("hypergrad: missing forward state");
        if (!(p > 0.0)) throw std::invalid_argument("hypergrad: p must be positive");
        wr = softmax_weights(pr.beta_r);
        wx = softmax_weights(pr.beta_x);
        tau = pr.gamma * pb.lambda;
        fista = s.z_t.has_value();
        if (fista) {
            if (!s.z_next || !pr.beta_z)
                throw std::invalid_argument("hypergrad: missing momentum state");
            wz = softmax_weights(*pr.beta_z);
            z_factor = wz[0] * (s.s_next + s.s_t - 1.0) / s.s_next + wz[1];
            input = *s.z_t;
            grad = surrogate_gradient(*s.z_next, pb, p);
        } else {
            wz = {1.0, 0.0};
            z_factor = 1.0;
            input = s.x_t;
            grad = surrogate_gradient(s.x_next, pb, p);
        }
        dg_diag = smooth_soft_threshold_dq(s.r_t, tau, p);
    }

    // grad^T (w_x1 (I - gamma A^T A) + w_x2 diag[dg]) v, through the z factor
    double chain_through_x(const Eigen::VectorXd& dr) const {
        const Eigen::VectorXd dx = wx[0] * apply_grad_step_jacobian(dr, prob, params.gamma) +
                                   wx[1] * dg_diag.cwiseProduct(dr);
        return z_factor * grad.dot(dx);
    }

    double d_gamma() const {
        const Eigen::VectorXd dr_dgamma =
            -wr[0] * (prob.A.transpose() * (prob.A * input - prob.y)) +
            wr[1] * prob.lambda * shrink_tau_diff(input, tau, p);
        const Eigen::VectorXd df_dgamma =
            -(prob.A.transpose() * (prob.A * state.r_t - prob.y)) +
            apply_grad_step_jacobian(dr_dgamma, prob, params.gamma);
        const Eigen::VectorXd dg_dgamma =
            prob.lambda * shrink_tau_diff(state.r_t, tau, p) +
            dg_diag.cwiseProduct(dr_dgamma);
        return z_factor * grad.dot(wx[0] * df_dgamma + wx[1] * dg_dgamma);
    }

    Eigen::Vector2d d_beta_r() const {
        const Eigen::VectorXd dr =
            wr[0] * wr[1] *
            (f_step(input, prob, params.gamma) - g_step_smooth(input, prob, params.gamma, p));
        const double d1 = chain_through_x(dr);
        return {d1, -d1};
    }

    Eigen::Vector2d d_beta_x() const {
        const Eigen::VectorXd dx =
            wx[0] * wx[1] *
            (f_step(state.r_t, prob, params.gamma) -
             g_step_smooth(state.r_t, prob, params.gamma, p));
        const double d1 = z_factor * grad.dot(dx);
        return {d1, -d1};
    }

    Eigen::Vector2d d_beta_z() const {
        const Eigen::VectorXd dz = wz[0] * wz[1] * ((state.s_t - 1.0) / state.s_next) *
                                   (state.x_next - state.x_t);
        const double d1 = grad.dot(dz);
        return {d1, -d1};
    }
};

}  // namespace detail

inline double hypergrad_gamma_ista(const SolverState& state, const StructuralParams& params,
                                   const ProblemInstance& prob, double p) {
    return detail::HypergradWork(state, params, prob, p).d_gamma();
}

inline Eigen::Vector2d hypergrad_beta_r_ista(const SolverState& state,
                                             const StructuralParams& params,
                                             const ProblemInstance& prob, double p) {
    return detail::HypergradWork(state, params, prob, p).d_beta_r();
}

inline Eigen::Vector2d hypergrad_beta_x_ista(const SolverState& state,
                                             const StructuralParams& params,
                                             const ProblemInstance& prob, double p) {
    return detail::HypergradWork(state, params, prob, p).d_beta_x();
}

inline HypergradSet hypergrad_all_ista(const SolverState& state, const StructuralParams& params,
                                       const ProblemInstance& prob, double p) {
    detail::HypergradWork work(state, params, prob, p);
    HypergradSet set;
    set.d_gamma = work.d_gamma();
    set.d_beta_r = work.d_beta_r();
    set.d_beta_x = work.d_beta_x();
    return set;
}

inline HypergradSet hypergrad_all_fista(const SolverState& state, const StructuralParams& params,
                                        const ProblemInstance& prob, double p) {
    if (!state.z_t || !state.z_next)
        throw std::invalid_argument("hypergrad_all_fista: missing momentum state");
    detail::HypergradWork work(state, params, prob, p);
    HypergradSet set;
    set.d_gamma = work.d_gamma();
    set.d_beta_r = work.d_beta_r();
    set.d_beta_x = work.d_beta_x();
    set.d_beta_z = work.d_beta_z();
    return set;
}

enum class AlphaId { gamma, beta_r1, beta_r2, beta_x1, beta_x2, beta_z1, beta_z2 };

// Central finite difference of J~ after one soft-mode step from the stored
// pre-step state. This differentiates exactly the map the closed forms
// differentiate: soft weights and smoothed shrinkage everywhere.
inline double fd_hypergradient(AlphaId alpha, const SolverState& pre_state,
                               const StructuralParams& params, const ProblemInstance& prob,
                               double p, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("fd_hypergradient: delta must be positive");

    const bool fista = pre_state.z_t.has_value();
    auto eval = [&](double shift) {
        StructuralParams perturbed = params;
        switch (alpha) {
            case AlphaId::gamma: perturbed.gamma += shift; break;
            case AlphaId::beta_r1: perturbed.beta_r[0] += shift; break;
            case AlphaId::beta_r2: perturbed.beta_r[1] += shift; break;
            case AlphaId::beta_x1: perturbed.beta_x[0] += shift; break;
            case AlphaId::beta_x2: perturbed.beta_x[1] += shift; break;
            case AlphaId::beta_z1:
                if (!perturbed.beta_z)
                    throw std::invalid_argument("fd_hypergradient: no beta_z in params");
                (*perturbed.beta_z)[0] += shift;
                break;
            case AlphaId::beta_z2:
                if (!perturbed.beta_z)
                    throw std::invalid_argument("fd_hypergradient: no beta_z in params");
                (*perturbed.beta_z)[1] += shift;
                break;
        }
        if (fista) {
            const SolverState s = as_fista_step(pre_state, perturbed, prob, StepMode::soft, p);
            return surrogate_objective(*s.z_next, prob, p);
        }
        const SolverState s = as_ista_step(pre_state, perturbed, prob, StepMode::soft, p);
        return surrogate_objective(s.x_next, prob, p);
    };

    return (eval(delta) - eval(-delta)) / (2.0 * delta);
}

}  // namespace hgdas
