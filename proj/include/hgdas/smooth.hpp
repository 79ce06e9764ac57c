#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "hgdas/problem.hpp"

namespace hgdas {

// log(1 + e^a) without overflow at large |a|.
inline double softplus(double a) {
    return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

inline double sigmoid(double q) {
    if (q >= 0.0) return 1.0 / (1.0 + std::exp(-q));
    const double e = std::exp(q);
    return e / (1.0 + e);
}

inline double soft_threshold(double q, double tau) {
    const double mag = std::abs(q) - tau;
    return mag > 0.0 ? (q > 0.0 ? mag : -mag) : 0.0;
}

inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& q, double tau) {
    return q.unaryExpr([tau](double v) { return soft_threshold(v, tau); });
}

// Smoothed soft threshold:
//   S~_tau(q) = (1/p) log(1 + e^{p(q-tau)}) - (1/p) log(1 + e^{p(-q-tau)})
inline double smooth_soft_threshold(double q, double tau, double p) {
    return (softplus(p * (q - tau)) - softplus(p * (-q - tau))) / p;
}

inline Eigen::VectorXd smooth_soft_threshold(const Eigen::VectorXd& q, double tau, double p) {
    return q.unaryExpr([tau, p](double v) { return smooth_soft_threshold(v, tau, p); });
}

// d S~_tau(q) / dq
inline double smooth_soft_threshold_dq(double q, double tau, double p) {
    return sigmoid(p * (q - tau)) + sigmoid(p * (-q - tau));
}

inline Eigen::VectorXd smooth_soft_threshold_dq(const Eigen::VectorXd& q, double tau, double p) {
    return q.unaryExpr([tau, p](double v) { return smooth_soft_threshold_dq(v, tau, p); });
}

// Smoothed l1 norm: sum_i (softplus(p x_i) + softplus(-p x_i) - 2 log 2) / p.
// Always in [||x||_1 - 2N log2 / p, ||x||_1].
inline double smooth_l1(const Eigen::VectorXd& x, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("smooth_l1: p must be positive");
    double acc = 0.0;
    const double two_log2 = 2.0 * std::log(2.0);
    for (int i = 0; i < x.size(); ++i)
        acc += softplus(p * x[i]) + softplus(-p * x[i]) - two_log2;
    return acc / p;
}

// Gradient of smooth_l1 per entry: 2 sigma(p x_i) - 1.
inline Eigen::VectorXd smooth_l1_gradient(const Eigen::VectorXd& x, double p) {
    return x.unaryExpr([p](double v) { return 2.0 * sigmoid(p * v) - 1.0; });
}

// J(x) = ||y - A x||^2 / 2 + lambda ||x||_1
inline double objective(const Eigen::VectorXd& x, const ProblemInstance& prob) {
    if (x.size() != prob.A.cols()) throw std::invalid_argument("objective: dimension mismatch");
    return 0.5 * (prob.y - prob.A * x).squaredNorm() + prob.lambda * x.lpNorm<1>();
}

// J~(x) = ||y - A x||^2 / 2 + lambda smooth_l1(x, p)
inline double surrogate_objective(const Eigen::VectorXd& x, const ProblemInstance& prob, double p) {
    if (x.size() != prob.A.cols())
        throw std::invalid_argument("surrogate_objective: dimension mismatch");
    return 0.5 * (prob.y - prob.A * x).squaredNorm() + prob.lambda * smooth_l1(x, p);
}

// grad J~ = A^T (A x - y) + lambda (2 sigma(p x) - 1)
inline Eigen::VectorXd surrogate_gradient(const Eigen::VectorXd& x, const ProblemInstance& prob,
                                          double p) {
    if (x.size() != prob.A.cols())
        throw std::invalid_argument("surrogate_gradient: dimension mismatch");
    return prob.A.transpose() * (prob.A * x - prob.y) + prob.lambda * smooth_l1_gradient(x, p);
}

}  // namespace hgdas
