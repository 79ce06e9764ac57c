#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hgdas/hgd.hpp"
#include "hgdas/problem.hpp"

namespace hgdas {

enum class SolverKind { ista_fixed, fista_fixed, hgd_as_ista, hgd_as_fista };

const char* solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);

struct ExperimentConfig {
    GeneratorConfig generator;
    double lambda = 10.0;
    int iterations = 40;
    int n_matrices = 20;
    int n_signals = 20;  // per matrix
    std::vector<SolverKind> solvers;
    HgdConfig hgd_ista;   // used by hgd_as_ista
    HgdConfig hgd_fista;  // used by hgd_as_fista
    std::string output_dir = "out";
    std::uint64_t master_seed = 1;
    int threads = 1;

    void validate() const;
};

struct SolverReport {
    SolverKind kind;
    std::string name;
    std::vector<double> mean_mse;  // length T + 1, t = 0 is the zero start
    double final_mse = 0.0;
    int failed = 0;                // instances excluded as non-finite
    double mean_ms_per_signal = 0.0;  // wall clock, not part of the payload
};

struct ExperimentReport {
    std::vector<SolverReport> solvers;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::string timestamp;
    // Traces of matrix 0 for HGD solvers (heatmap/trace export).
    std::map<std::string, std::vector<RunTrace>> sample_traces;
    // Raw final iterates per solver, (matrix, signal) major order, for audit.
    std::map<std::string, std::vector<Eigen::VectorXd>> final_iterates;
};

// The (matrix, signal) instance the sweep runs; exposed so audits can
// regenerate any instance independently.
ProblemInstance instance_for(const ExperimentConfig& cfg, int matrix_idx, int signal_idx);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Deterministic report content (no timing, no timestamp), serialized JSON.
std::string report_payload_json(const ExperimentReport& report);
std::string report_full_json(const ExperimentReport& report);

struct TimingRow {
    std::string name;
    double training_ms = 0.0;  // always 0: nothing here has a training phase
    double test_ms_per_signal = 0.0;
};

std::vector<TimingRow> timing_report(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace hgdas
