#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hgdas/arch.hpp"
#include "hgdas/problem.hpp"
#include "hgdas/smooth.hpp"

namespace hgdas {

struct ClassicTrace {
    struct Record {
        int t;
        double objective;
        double sq_error;  // ||estimate - x_star||^2
    };
    std::vector<Record> records;               // length T + 1, t = 0..T
    std::vector<Eigen::VectorXd> estimates;    // estimate at each t
};

// Largest squared singular value of A via power iteration on A^T A.
// Deterministic all-ones start, relative change < 1e-12 stop, <= 500 rounds.
inline double spectral_norm_sq(const Eigen::MatrixXd& a) {
    if (a.size() == 0 || a.norm() == 0.0)
        throw std::invalid_argument("spectral_norm_sq: zero matrix");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(a.cols());
    v.normalize();
    double ev = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = a.transpose() * (a * v);
        const double ev_new = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) throw std::invalid_argument("spectral_norm_sq: degenerate iterate");
        v = w / wn;
        if (it > 0 && std::abs(ev_new - ev) <= 1e-12 * std::abs(ev_new)) return ev_new;
        ev = ev_new;
    }
    return ev;
}

namespace detail {

inline void record(ClassicTrace& trace, int t, const Eigen::VectorXd& est,
                   const ProblemInstance& prob) {
    trace.records.push_back({t, objective(est, prob), (est - prob.x_star).squaredNorm()});
    trace.estimates.push_back(est);
}

}  // namespace detail

// ISTA, Eqs: r = x - gamma A^T (A x - y); x+ = S_{lambda gamma}(r).
inline std::pair<Eigen::VectorXd, ClassicTrace> ista(const ProblemInstance& prob, double gamma,
                                                     int iterations,
                                                     const Eigen::VectorXd& x0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("ista: gamma must be positive");
    if (iterations < 0) throw std::invalid_argument("ista: negative iteration count");
    ClassicTrace trace;
    Eigen::VectorXd x = x0;
    detail::record(trace, 0, x, prob);
    for (int t = 0; t < iterations; ++t) {
        x = g_step(f_step(x, prob, gamma), prob, gamma);
        detail::record(trace, t + 1, x, prob);
    }
    return {x, trace};
}

inline std::pair<Eigen::VectorXd, ClassicTrace> ista(const ProblemInstance& prob, double gamma,
                                                     int iterations) {
    return ista(prob, gamma, iterations, Eigen::VectorXd::Zero(prob.n()));
}

// FISTA: the gradient step reads the momentum point z, the estimate is z.
inline std::pair<Eigen::VectorXd, ClassicTrace> fista(const ProblemInstance& prob, double gamma,
                                                      int iterations,
                                                      const Eigen::VectorXd& x0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("fista: gamma must be positive");
    if (iterations < 0) throw std::invalid_argument("fista: negative iteration count");
    ClassicTrace trace;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd z = x0;
    double s = 1.0;
    detail::record(trace, 0, z, prob);
    for (int t = 0; t < iterations; ++t) {
        const Eigen::VectorXd x_next = g_step(f_step(z, prob, gamma), prob, gamma);
        const double s_next = (1.0 + std::sqrt(1.0 + 4.0 * s * s)) / 2.0;
        z = x_next + ((s - 1.0) / s_next) * (x_next - x);
        x = x_next;
        s = s_next;
        detail::record(trace, t + 1, z, prob);
    }
    return {z, trace};
}

inline std::pair<Eigen::VectorXd, ClassicTrace> fista(const ProblemInstance& prob, double gamma,
                                                      int iterations) {
    return fista(prob, gamma, iterations, Eigen::VectorXd::Zero(prob.n()));
}

}  // namespace hgdas
