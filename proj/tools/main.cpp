#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hgdas/config_io.hpp"
#include "hgdas/experiment.hpp"
#include "hgdas/gradcheck.hpp"
#include "hgdas/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_gen(const std::string& path) {
    if (path.empty()) {
        std::cout << hgdas::sample_config_text();
        return 0;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 1;
    }
    out << hgdas::sample_config_text();
    return 0;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int cmd_run(const std::string& config_path, const std::string& out_override, int threads) {
    if (!fs::exists(config_path)) {
        std::cerr << "error: config file '" << config_path << "' not found\n";
        return 2;
    }
    hgdas::ExperimentConfig cfg;
    try {
        cfg = hgdas::load_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (threads > 0) cfg.threads = threads;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (const char* env = std::getenv("HGDAS_OUTPUT_DIR")) cfg.output_dir = env;

    try {
        const hgdas::ExperimentReport report = hgdas::run_experiment(cfg);
        const fs::path dir(cfg.output_dir);
        fs::create_directories(dir);
        write_file(dir / "report.json", hgdas::report_full_json(report));

        for (const auto& sr : report.solvers) {
            std::string csv = "t,mean_mse\n";
            for (std::size_t t = 0; t < sr.mean_mse.size(); ++t)
                csv += std::to_string(t) + "," + hgdas::format_double(sr.mean_mse[t]) + "\n";
            write_file(dir / ("mse_" + sr.name + ".csv"), csv);
        }
        for (const auto& [name, traces] : report.sample_traces) {
            if (traces.empty()) continue;
            hgdas::export_trace_csv(traces.front(), (dir / ("trace_" + name + ".csv")).string());
            hgdas::export_heatmap(traces, (dir / ("heatmap_" + name + ".csv")).string());
        }

        std::cout << "wrote " << (dir / "report.json").string() << "\n";
        for (const auto& sr : report.solvers)
            std::cout << sr.name << ": final_mse=" << hgdas::format_double(sr.final_mse)
                      << " mean_ms_per_signal=" << hgdas::format_double(sr.mean_ms_per_signal)
                      << " failed=" << sr.failed << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_gradcheck(std::uint64_t seed, int cases, double tol) {
    bool all_ok = true;
    for (const auto variant : {hgdas::Variant::ista, hgdas::Variant::fista}) {
        const char* name = variant == hgdas::Variant::ista ? "ista" : "fista";
        const auto res = hgdas::run_gradcheck(variant, seed, cases);
        for (const auto& [param, err] : res.max_rel_error)
            std::cout << name << " " << param << " max_rel_error "
                      << hgdas::format_double(err) << "\n";
        for (const auto& [param, err] : res.max_small_abs_error)
            std::cout << name << " " << param << " max_abs_error(small) "
                      << hgdas::format_double(err) << "\n";
        all_ok = all_ok && res.passed(tol);

        const auto stats = hgdas::soft_hard_discrepancy(variant, seed, cases);
        std::cout << name << " soft-vs-hard hypergradient rel diff: mean "
                  << hgdas::format_double(stats.mean_rel_diff) << " max "
                  << hgdas::format_double(stats.max_rel_diff) << " (informational)\n";
    }
    std::cout << (all_ok ? "gradcheck PASS" : "gradcheck FAIL") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_heatmap(const std::vector<std::string>& trace_paths, const std::string& out_path) {
    try {
        std::vector<hgdas::RunTrace> traces;
        for (const auto& path : trace_paths) {
            if (!fs::exists(path)) {
                std::cerr << "error: trace file '" << path << "' not found\n";
                return 2;
            }
            traces.push_back(hgdas::read_trace_csv(path));
        }
        const std::string csv = hgdas::heatmap_to_csv(traces);
        if (out_path.empty())
            std::cout << csv;
        else
            write_file(out_path, csv);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-recovery benchmark: ISTA/FISTA and their online "
                 "architecture-searched variants"};
    app.require_subcommand(1);

    std::string config_path, out_override, gen_path, heatmap_out;
    std::vector<std::string> trace_paths;
    int threads = 0;
    std::uint64_t seed = 7;
    int cases = 100;
    double tol = 1e-4;

    auto* run = app.add_subcommand("run", "Run a benchmark sweep from a config file");
    run->add_option("config", config_path, "config file (key=value or JSON)")->required();
    run->add_option("--out", out_override, "output directory override");
    run->add_option("--threads", threads, "worker thread count");

    auto* gradcheck =
        app.add_subcommand("gradcheck", "Check closed-form hypergradients against the "
                                        "finite-difference oracle");
    gradcheck->add_option("--seed", seed, "random seed");
    gradcheck->add_option("--cases", cases, "states per parameter");
    gradcheck->add_option("--tol", tol, "relative tolerance");

    auto* heatmap = app.add_subcommand("heatmap", "Render an architecture heatmap CSV from "
                                                  "trace CSVs");
    heatmap->add_option("traces", trace_paths, "trace CSV files")->required();
    heatmap->add_option("--out", heatmap_out, "output file (stdout if omitted)");

    auto* gen = app.add_subcommand("gen", "Emit a sample config");
    gen->add_option("path", gen_path, "write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return cmd_run(config_path, out_override, threads);
    if (gradcheck->parsed()) return cmd_gradcheck(seed, cases, tol);
    if (heatmap->parsed()) return cmd_heatmap(trace_paths, heatmap_out);
    if (gen->parsed()) return cmd_gen(gen_path);
    return 2;
}
