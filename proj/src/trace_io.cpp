#include "hgdas/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hgdas {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("trace csv: bad number '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::string trace_to_csv(const RunTrace& trace) {
    std::ostringstream out;
    out << "t,mse,objective,surrogate,gamma,w_r1,w_x1,w_z1,beta_r1,beta_x1,beta_z1\n";
    for (const auto& rec : trace.records) {
        out << rec.t << ',' << format_double(rec.mse) << ',' << format_double(rec.objective)
            << ',' << format_double(rec.surrogate) << ',' << format_double(rec.gamma) << ','
            << format_double(rec.hard_r[0]) << ',' << format_double(rec.hard_x[0]) << ',';
        if (rec.has_z) out << format_double(rec.hard_z[0]);
        out << ',' << format_double(rec.beta_r[0]) << ',' << format_double(rec.beta_x[0]) << ',';
        if (rec.has_z) out << format_double(rec.beta_z[0]);
        out << '\n';
    }
    return out.str();
}

void export_trace_csv(const RunTrace& trace, const std::string& path) {
    if (trace.records.empty()) throw std::invalid_argument("export_trace_csv: empty trace");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_trace_csv: cannot write " + path);
    out << trace_to_csv(trace);
}

RunTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_trace_csv: empty file " + path);

    RunTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("read_trace_csv: bad row in " + path);
        RunTrace::Record rec;
        rec.t = static_cast<int>(parse_double(f[0]));
        rec.mse = parse_double(f[1]);
        rec.objective = parse_double(f[2]);
        rec.surrogate = parse_double(f[3]);
        rec.gamma = parse_double(f[4]);
        rec.hard_r = {parse_double(f[5]), 1.0 - parse_double(f[5])};
        rec.hard_x = {parse_double(f[6]), 1.0 - parse_double(f[6])};
        rec.has_z = !f[7].empty();
        rec.hard_z = rec.has_z ? Eigen::Vector2d{parse_double(f[7]), 1.0 - parse_double(f[7])}
                               : Eigen::Vector2d{1.0, 0.0};
        rec.beta_r = {parse_double(f[8]), 0.0};
        rec.beta_x = {parse_double(f[9]), 0.0};
        rec.beta_z = rec.has_z ? Eigen::Vector2d{parse_double(f[10]), 0.0}
                               : Eigen::Vector2d{0.0, 0.0};
        trace.records.push_back(rec);
        trace.is_fista = rec.has_z;
    }
    return trace;
}

std::string heatmap_to_csv(const std::vector<RunTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("heatmap: no traces");
    const bool fista = traces.front().is_fista;
    const std::size_t iters = traces.front().records.size();
    for (const auto& tr : traces)
        if (tr.is_fista != fista || tr.records.size() != iters)
            throw std::invalid_argument("heatmap: traces must share variant and length");

    std::ostringstream out;
    const int slots_per_iter = fista ? 3 : 2;
    for (std::size_t t = 0; t < iters; ++t) {
        for (int slot = 0; slot < slots_per_iter; ++slot) {
            for (std::size_t c = 0; c < traces.size(); ++c) {
                const auto& rec = traces[c].records[t];
                const double w = slot == 0   ? rec.hard_r[0]
                                 : slot == 1 ? rec.hard_x[0]
                                             : rec.hard_z[0];
                if (c) out << ',';
                out << static_cast<int>(w);
            }
            out << '\n';
        }
    }
    return out.str();
}

void export_heatmap(const std::vector<RunTrace>& traces, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_heatmap: cannot write " + path);
    out << heatmap_to_csv(traces);
}

}  // namespace hgdas
