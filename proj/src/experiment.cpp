#include "hgdas/experiment.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hgdas/classic.hpp"
#include "hgdas/config_io.hpp"
#include "hgdas/trace_io.hpp"

namespace hgdas {

const char* solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::ista_fixed: return "ista_fixed";
        case SolverKind::fista_fixed: return "fista_fixed";
        case SolverKind::hgd_as_ista: return "hgd_as_ista";
        case SolverKind::hgd_as_fista: return "hgd_as_fista";
    }
    throw std::invalid_argument("unknown solver kind");
}

SolverKind solver_from_name(const std::string& name) {
    if (name == "ista_fixed") return SolverKind::ista_fixed;
    if (name == "fista_fixed") return SolverKind::fista_fixed;
    if (name == "hgd_as_ista") return SolverKind::hgd_as_ista;
    if (name == "hgd_as_fista") return SolverKind::hgd_as_fista;
    throw std::invalid_argument("unknown solver '" + name + "'");
}

void ExperimentConfig::validate() const {
    generator.validate();
    if (!(lambda > 0.0)) throw std::invalid_argument("ExperimentConfig: lambda must be positive");
    if (iterations < 0) throw std::invalid_argument("ExperimentConfig: negative iterations");
    if (n_matrices < 1 || n_signals < 1)
        throw std::invalid_argument("ExperimentConfig: counts must be >= 1");
    if (solvers.empty()) throw std::invalid_argument("ExperimentConfig: no solvers configured");
    if (threads < 1) throw std::invalid_argument("ExperimentConfig: threads must be >= 1");
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

Eigen::MatrixXd matrix_for(const ExperimentConfig& cfg, int matrix_idx) {
    GaussianStream rng(substream_seed(cfg.master_seed, static_cast<std::uint64_t>(matrix_idx), 0));
    return generate_matrix(cfg.generator, rng);
}

ProblemInstance instance_from_matrix(const ExperimentConfig& cfg, const Eigen::MatrixXd& a,
                                     int matrix_idx, int signal_idx) {
    const auto m = static_cast<std::uint64_t>(matrix_idx);
    const auto j = static_cast<std::uint64_t>(signal_idx);
    GaussianStream sig_rng(substream_seed(cfg.master_seed, m, 2 * j + 1));
    GaussianStream noise_rng(substream_seed(cfg.master_seed, m, 2 * j + 2));

    ProblemInstance prob;
    prob.A = a;
    prob.x_star = generate_signal(cfg.generator, sig_rng);
    prob.lambda = cfg.lambda;
    prob.y = prob.A * prob.x_star;
    if (cfg.generator.noise_variance > 0.0) {
        const double sd = std::sqrt(cfg.generator.noise_variance);
        for (int i = 0; i < prob.m(); ++i) prob.y[i] += sd * noise_rng.gaussian();
    }
    return prob;
}

struct ItemResult {
    // Per solver: MSE at t = 0..T, failed flag, wall-clock ms, final iterate.
    std::vector<std::vector<double>> mse;
    std::vector<char> failed;
    std::vector<double> ms;
    std::vector<Eigen::VectorXd> final_x;
    std::vector<RunTrace> trace;  // only kept for matrix 0 HGD solvers
};

std::vector<double> classic_curve(const ClassicTrace& trace) {
    std::vector<double> curve;
    curve.reserve(trace.records.size());
    for (const auto& rec : trace.records) curve.push_back(rec.sq_error);
    return curve;
}

std::vector<double> hgd_curve(const RunTrace& trace) {
    std::vector<double> curve;
    curve.reserve(trace.records.size() + 1);
    curve.push_back(trace.initial_mse);
    for (const auto& rec : trace.records) curve.push_back(rec.mse);
    return curve;
}

}  // namespace

ProblemInstance instance_for(const ExperimentConfig& cfg, int matrix_idx, int signal_idx) {
    return instance_from_matrix(cfg, matrix_for(cfg, matrix_idx), matrix_idx, signal_idx);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int n_solvers = static_cast<int>(cfg.solvers.size());
    const int n_items = cfg.n_matrices * cfg.n_signals;

    // Matrices and their step sizes are shared across signals and solvers.
    std::vector<Eigen::MatrixXd> matrices(cfg.n_matrices);
    std::vector<double> gamma(cfg.n_matrices);
    for (int m = 0; m < cfg.n_matrices; ++m) {
        matrices[m] = matrix_for(cfg, m);
        gamma[m] = 1.0 / spectral_norm_sq(matrices[m]);
    }

    std::vector<ItemResult> results(n_items);
    std::atomic<int> next_item{0};

    auto worker = [&]() {
        for (;;) {
            const int item = next_item.fetch_add(1);
            if (item >= n_items) return;
            const int m = item / cfg.n_signals;
            const int j = item % cfg.n_signals;
            const ProblemInstance prob = instance_from_matrix(cfg, matrices[m], m, j);

            ItemResult& res = results[item];
            res.mse.resize(n_solvers);
            res.failed.assign(n_solvers, 0);
            res.ms.assign(n_solvers, 0.0);
            res.final_x.resize(n_solvers);
            res.trace.resize(n_solvers);

            for (int s = 0; s < n_solvers; ++s) {
                const auto start = std::chrono::steady_clock::now();
                try {
                    switch (cfg.solvers[s]) {
                        case SolverKind::ista_fixed: {
                            auto [x, trace] = ista(prob, gamma[m], cfg.iterations);
                            res.mse[s] = classic_curve(trace);
                            res.final_x[s] = std::move(x);
                            break;
                        }
                        case SolverKind::fista_fixed: {
                            auto [z, trace] = fista(prob, gamma[m], cfg.iterations);
                            res.mse[s] = classic_curve(trace);
                            res.final_x[s] = std::move(z);
                            break;
                        }
                        case SolverKind::hgd_as_ista: {
                            HgdConfig hc = cfg.hgd_ista;
                            hc.variant = Variant::ista;
                            hc.iterations = cfg.iterations;
                            hc.init_params.gamma = gamma[m];
                            auto [x, trace] = hgd_as_ista(prob, hc);
                            res.mse[s] = hgd_curve(trace);
                            res.final_x[s] = std::move(x);
                            if (m == 0) res.trace[s] = std::move(trace);
                            break;
                        }
                        case SolverKind::hgd_as_fista: {
                            HgdConfig hc = cfg.hgd_fista;
                            hc.variant = Variant::fista;
                            hc.iterations = cfg.iterations;
                            hc.init_params.gamma = gamma[m];
                            auto [z, trace] = hgd_as_fista(prob, hc);
                            res.mse[s] = hgd_curve(trace);
                            res.final_x[s] = std::move(z);
                            if (m == 0) res.trace[s] = std::move(trace);
                            break;
                        }
                    }
                } catch (const SolverAbort&) {
                    res.failed[s] = 1;
                }
                const auto stop = std::chrono::steady_clock::now();
                res.ms[s] = std::chrono::duration<double, std::milli>(stop - start).count();
            }
        }
    };

    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Reduction in fixed (matrix, signal, solver) order; worker count never
    // changes the payload.
    ExperimentReport report;
    report.master_seed = cfg.master_seed;
    report.config_hash = config_hash(cfg);
    {
        char buf[32];
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        report.timestamp = buf;
    }

    for (int s = 0; s < n_solvers; ++s) {
        SolverReport sr;
        sr.kind = cfg.solvers[s];
        sr.name = solver_name(sr.kind);
        sr.mean_mse.assign(static_cast<std::size_t>(cfg.iterations) + 1, 0.0);
        int ok = 0;
        double total_ms = 0.0;
        auto& finals = report.final_iterates[sr.name];
        for (int item = 0; item < n_items; ++item) {
            const ItemResult& res = results[item];
            total_ms += res.ms[s];
            if (res.failed[s]) {
                ++sr.failed;
                continue;
            }
            ++ok;
            for (std::size_t t = 0; t < sr.mean_mse.size(); ++t)
                sr.mean_mse[t] += res.mse[s][t];
            finals.push_back(res.final_x[s]);
            if (item < cfg.n_signals && !res.trace[s].records.empty())
                report.sample_traces[sr.name].push_back(res.trace[s]);
        }
        if (ok > 0)
            for (double& v : sr.mean_mse) v /= ok;
        sr.final_mse = sr.mean_mse.back();
        sr.mean_ms_per_signal = total_ms / n_items;
        report.solvers.push_back(std::move(sr));
    }
    return report;
}

namespace {

nlohmann::ordered_json payload_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["config_hash"] = report.config_hash;
    j["master_seed"] = report.master_seed;
    j["solvers"] = nlohmann::ordered_json::array();
    for (const auto& sr : report.solvers) {
        nlohmann::ordered_json s;
        s["name"] = sr.name;
        s["mean_mse"] = sr.mean_mse;
        s["final_mse"] = sr.final_mse;
        s["failed"] = sr.failed;
        j["solvers"].push_back(std::move(s));
    }
    return j;
}

}  // namespace

std::string report_payload_json(const ExperimentReport& report) {
    return payload_json(report).dump(2);
}

std::string report_full_json(const ExperimentReport& report) {
    nlohmann::ordered_json j = payload_json(report);
    j["timestamp"] = report.timestamp;
    for (std::size_t s = 0; s < report.solvers.size(); ++s)
        j["solvers"][s]["mean_ms_per_signal"] = report.solvers[s].mean_ms_per_signal;
    return j.dump(2);
}

std::vector<TimingRow> timing_report(const ExperimentConfig& cfg) {
    const ExperimentReport report = run_experiment(cfg);
    std::vector<TimingRow> rows;
    for (const auto& sr : report.solvers)
        rows.push_back({sr.name, 0.0, sr.mean_ms_per_signal});
    return rows;
}

}  // namespace hgdas
