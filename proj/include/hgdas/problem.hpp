#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

#include "hgdas/rng.hpp"

namespace hgdas {

enum class MatrixKind { iid_gaussian, correlated_gaussian };

struct GeneratorConfig {
    int m = 75;
    int n = 150;
    double nonzero_ratio = 0.08;
    double signal_variance = 1.0;
    double noise_variance = 0.1;
    MatrixKind matrix_kind = MatrixKind::iid_gaussian;
    double rho = 0.0;  // column correlation, correlated_gaussian only
    std::uint64_t seed = 0;

    void validate() const {
        if (m <= 0 || n <= 0 || m >= n)
            throw std::invalid_argument("GeneratorConfig: require 0 < M < N");
        if (!(nonzero_ratio > 0.0 && nonzero_ratio < 1.0))
            throw std::invalid_argument("GeneratorConfig: nonzero_ratio must be in (0,1)");
        if (!(signal_variance > 0.0))
            throw std::invalid_argument("GeneratorConfig: signal_variance must be positive");
        if (noise_variance < 0.0)
            throw std::invalid_argument("GeneratorConfig: noise_variance must be nonnegative");
        if (matrix_kind == MatrixKind::correlated_gaussian && !(rho >= 0.0 && rho < 1.0))
            throw std::invalid_argument("GeneratorConfig: rho must be in [0,1)");
    }
};

struct ProblemInstance {
    Eigen::MatrixXd A;      // M x N measurement matrix
    Eigen::VectorXd y;      // observation, y = A x_star + v
    Eigen::VectorXd x_star; // ground-truth sparse signal
    double lambda = 1.0;

    int m() const { return static_cast<int>(A.rows()); }
    int n() const { return static_cast<int>(A.cols()); }
};

// Bernoulli-Gaussian: each entry zero with probability 1 - nonzero_ratio,
// otherwise N(0, signal_variance).
inline Eigen::VectorXd generate_signal(const GeneratorConfig& cfg, GaussianStream& rng) {
    cfg.validate();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(cfg.n);
    const double sd = std::sqrt(cfg.signal_variance);
    for (int i = 0; i < cfg.n; ++i) {
        const double u = rng.uniform();
        const double g = rng.gaussian();  // always drawn, keeps stream position fixed
        if (u < cfg.nonzero_ratio) x[i] = sd * g;
    }
    return x;
}

// iid: entries i.i.d. N(0,1). correlated: A = G * Sigma^{1/2} with
// Sigma_{jl} = rho^{|j-l|}, so columns carry Toeplitz correlation and rows
// stay independent.
inline Eigen::MatrixXd generate_matrix(const GeneratorConfig& cfg, GaussianStream& rng) {
    cfg.validate();
    Eigen::MatrixXd g(cfg.m, cfg.n);
    for (int i = 0; i < cfg.m; ++i)
        for (int j = 0; j < cfg.n; ++j) g(i, j) = rng.gaussian();

    if (cfg.matrix_kind == MatrixKind::iid_gaussian || cfg.rho == 0.0) return g;

    Eigen::MatrixXd sigma(cfg.n, cfg.n);
    for (int j = 0; j < cfg.n; ++j)
        for (int l = 0; l < cfg.n; ++l) sigma(j, l) = std::pow(cfg.rho, std::abs(j - l));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    Eigen::MatrixXd sqrt_sigma =
        es.eigenvectors() *
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        es.eigenvectors().transpose();
    return g * sqrt_sigma;
}

// Sub-streams 0/1/2 for matrix/signal/noise so each draw is independently
// reproducible from the one seed.
inline ProblemInstance build_instance(const GeneratorConfig& cfg, double lambda) {
    cfg.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("build_instance: lambda must be positive");

    GaussianStream mat_rng(substream_seed(cfg.seed, 0));
    GaussianStream sig_rng(substream_seed(cfg.seed, 1));
    GaussianStream noise_rng(substream_seed(cfg.seed, 2));

    ProblemInstance prob;
    prob.A = generate_matrix(cfg, mat_rng);
    prob.x_star = generate_signal(cfg, sig_rng);
    prob.lambda = lambda;
    prob.y = prob.A * prob.x_star;
    if (cfg.noise_variance > 0.0) {
        const double sd = std::sqrt(cfg.noise_variance);
        for (int i = 0; i < cfg.m; ++i) prob.y[i] += sd * noise_rng.gaussian();
    }
    return prob;
}

}  // namespace hgdas
