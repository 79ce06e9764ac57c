#include "hgdas/config_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hgdas/trace_io.hpp"

namespace hgdas {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text) {
    KvMap kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KvMap parse_json_flat(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config json: expected an object");
    KvMap kv;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string())
            kv[key] = value.get<std::string>();
        else
            kv[key] = value.dump();
    }
    return kv;
}

double to_double(const KvMap& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad number for '" + key + "'");
    }
}

long long to_int(const KvMap& kv, const std::string& key, long long fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad integer for '" + key + "'");
    }
}

std::string to_str(const KvMap& kv, const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

const std::vector<std::string> kKnownKeys = {
    "generator.m", "generator.n", "generator.nonzero_ratio", "generator.signal_variance",
    "generator.noise_variance", "generator.matrix", "generator.rho",
    "lambda", "iterations", "matrices", "signals_per_matrix", "solvers",
    "master_seed", "output_dir", "threads", "p",
    "ista.eta_r", "ista.eta_x", "ista.eta_gamma",
    "fista.eta_r", "fista.eta_x", "fista.eta_z", "fista.eta_gamma",
};

ExperimentConfig from_kv(const KvMap& kv) {
    for (const auto& [key, value] : kv) {
        (void)value;
        bool known = false;
        for (const auto& k : kKnownKeys) known = known || k == key;
        if (!known) throw std::invalid_argument("config: unknown key '" + key + "'");
    }

    ExperimentConfig cfg;
    cfg.generator.m = static_cast<int>(to_int(kv, "generator.m", 75));
    cfg.generator.n = static_cast<int>(to_int(kv, "generator.n", 150));
    cfg.generator.nonzero_ratio = to_double(kv, "generator.nonzero_ratio", 0.08);
    cfg.generator.signal_variance = to_double(kv, "generator.signal_variance", 1.0);
    cfg.generator.noise_variance = to_double(kv, "generator.noise_variance", 0.1);
    const std::string kind = to_str(kv, "generator.matrix", "correlated");
    if (kind == "iid")
        cfg.generator.matrix_kind = MatrixKind::iid_gaussian;
    else if (kind == "correlated")
        cfg.generator.matrix_kind = MatrixKind::correlated_gaussian;
    else
        throw std::invalid_argument("config: generator.matrix must be iid or correlated");
    cfg.generator.rho = to_double(kv, "generator.rho", 0.5);

    cfg.lambda = to_double(kv, "lambda", 10.0);
    cfg.iterations = static_cast<int>(to_int(kv, "iterations", 40));
    cfg.n_matrices = static_cast<int>(to_int(kv, "matrices", 20));
    cfg.n_signals = static_cast<int>(to_int(kv, "signals_per_matrix", 20));
    cfg.master_seed = static_cast<std::uint64_t>(to_int(kv, "master_seed", 1));
    cfg.output_dir = to_str(kv, "output_dir", "out");
    cfg.threads = static_cast<int>(to_int(kv, "threads", 1));

    const double p = to_double(kv, "p", 50.0);
    cfg.hgd_ista.variant = Variant::ista;
    cfg.hgd_ista.p = p;
    cfg.hgd_ista.eta_r = to_double(kv, "ista.eta_r", 1e-1);
    cfg.hgd_ista.eta_x = to_double(kv, "ista.eta_x", 1e-1);
    cfg.hgd_ista.eta_gamma = to_double(kv, "ista.eta_gamma", 5e-9);
    cfg.hgd_fista.variant = Variant::fista;
    cfg.hgd_fista.p = p;
    cfg.hgd_fista.eta_r = to_double(kv, "fista.eta_r", 1e-1);
    cfg.hgd_fista.eta_x = to_double(kv, "fista.eta_x", 5e-2);
    cfg.hgd_fista.eta_z = to_double(kv, "fista.eta_z", 5e-2);
    cfg.hgd_fista.eta_gamma = to_double(kv, "fista.eta_gamma", 5e-9);

    for (const auto& name :
         split_list(to_str(kv, "solvers", "ista_fixed fista_fixed hgd_as_ista hgd_as_fista")))
        cfg.solvers.push_back(solver_from_name(name));

    cfg.validate();
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_kv(parse_json_flat(text));
    return from_kv(parse_kv(text));
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return from_kv(parse_json_flat(text));
    return parse_config_text(text);
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "generator.m = " << cfg.generator.m << '\n';
    out << "generator.n = " << cfg.generator.n << '\n';
    out << "generator.nonzero_ratio = " << format_double(cfg.generator.nonzero_ratio) << '\n';
    out << "generator.signal_variance = " << format_double(cfg.generator.signal_variance) << '\n';
    out << "generator.noise_variance = " << format_double(cfg.generator.noise_variance) << '\n';
    out << "generator.matrix = "
        << (cfg.generator.matrix_kind == MatrixKind::iid_gaussian ? "iid" : "correlated") << '\n';
    out << "generator.rho = " << format_double(cfg.generator.rho) << '\n';
    out << "lambda = " << format_double(cfg.lambda) << '\n';
    out << "iterations = " << cfg.iterations << '\n';
    out << "matrices = " << cfg.n_matrices << '\n';
    out << "signals_per_matrix = " << cfg.n_signals << '\n';
    out << "master_seed = " << cfg.master_seed << '\n';
    out << "output_dir = " << cfg.output_dir << '\n';
    out << "p = " << format_double(cfg.hgd_ista.p) << '\n';
    out << "ista.eta_r = " << format_double(cfg.hgd_ista.eta_r) << '\n';
    out << "ista.eta_x = " << format_double(cfg.hgd_ista.eta_x) << '\n';
    out << "ista.eta_gamma = " << format_double(cfg.hgd_ista.eta_gamma) << '\n';
    out << "fista.eta_r = " << format_double(cfg.hgd_fista.eta_r) << '\n';
    out << "fista.eta_x = " << format_double(cfg.hgd_fista.eta_x) << '\n';
    out << "fista.eta_z = " << format_double(cfg.hgd_fista.eta_z) << '\n';
    out << "fista.eta_gamma = " << format_double(cfg.hgd_fista.eta_gamma) << '\n';
    out << "solvers =";
    for (const auto s : cfg.solvers) out << ' ' << solver_name(s);
    out << '\n';
    return out.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config_text(cfg))));
    return buf;
}

std::string sample_config_text() {
    return R"(# Sparse-recovery benchmark configuration.
# Flat key = value; '#' starts a comment. A JSON object with the same
# flat keys is accepted as an alternative.

# Problem generator
generator.m = 75                # measurement count (rows of A)
generator.n = 150               # signal dimension (columns of A), M < N
generator.nonzero_ratio = 0.08  # Bernoulli-Gaussian nonzero probability
generator.signal_variance = 1.0
generator.noise_variance = 0.1  # per-entry observation noise variance
generator.matrix = correlated   # iid | correlated
generator.rho = 0.5             # column correlation (correlated only)

lambda = 10                     # l1 regularization weight
iterations = 40

# Sweep size: matrices x signals_per_matrix independent instances.
matrices = 20
signals_per_matrix = 20
master_seed = 1
output_dir = out
threads = 1

# Solvers to run (any subset).
solvers = ista_fixed fista_fixed hgd_as_ista hgd_as_fista

# Online update settings. p controls the sharpness of the smoothed l1.
p = 50
ista.eta_r = 1e-1
ista.eta_x = 1e-1
ista.eta_gamma = 5e-9
fista.eta_r = 1e-1
fista.eta_x = 5e-2
fista.eta_z = 5e-2
fista.eta_gamma = 5e-9
)";
}

}  // namespace hgdas
