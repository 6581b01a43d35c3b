#include "sdecoup/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace sdecoup {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> parse_flat(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + v + "'");
    return out;
}

std::vector<long> to_long_list(const std::string& key, const std::string& v) {
    std::vector<long> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw ConfigError("key '" + key + "': empty list entry");
        out.push_back(to_long(key, t));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

} // namespace

PiecewiseLipschitzFn load_drift_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open drift file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    try {
        return PiecewiseLipschitzFn::from_text(os.str());
    } catch (const std::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

LoadedConfig load_experiment_config(const std::filesystem::path& path) {
    auto kv = parse_flat(path);
    const auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    LoadedConfig out;
    ExperimentConfig& cfg = out.experiment;

    const auto drift = take("drift_file");
    if (!drift) throw ConfigError(path.string() + ": missing required key 'drift_file'");
    out.drift_file = *drift;
    std::filesystem::path drift_path(*drift);
    if (drift_path.is_relative()) drift_path = path.parent_path() / drift_path;
    cfg.sde.drift = load_drift_file(drift_path);

    if (const auto v = take("x0")) cfg.sde.x0 = to_double("x0", *v);
    if (const auto v = take("n_list")) cfg.n_list = to_long_list("n_list", *v);
    if (const auto v = take("fine_factor")) cfg.fine_factor = int(to_long("fine_factor", *v));
    if (const auto v = take("ref_factor")) cfg.ref_factor = int(to_long("ref_factor", *v));
    if (const auto v = take("p")) cfg.p = int(to_long("p", *v));
    if (const auto v = take("replications")) cfg.replications = to_long("replications", *v);
    if (const auto v = take("seed")) cfg.master_seed = to_u64("seed", *v);
    if (const auto v = take("tag")) cfg.tag = *v;
    if (const auto v = take("threads")) cfg.threads = int(to_long("threads", *v));

    if (!kv.empty()) throw ConfigError(path.string() + ": unknown key '" + kv.begin()->first + "'");
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return out;
}

std::string emit_experiment_config(const LoadedConfig& cfg) {
    std::ostringstream os;
    char buf[256];
    os << "drift_file = " << cfg.drift_file << "\n";
    std::snprintf(buf, sizeof buf, "x0 = %.17g\n", cfg.experiment.sde.x0);
    os << buf;
    os << "n_list = ";
    for (std::size_t i = 0; i < cfg.experiment.n_list.size(); ++i)
        os << (i ? "," : "") << cfg.experiment.n_list[i];
    os << "\n";
    os << "fine_factor = " << cfg.experiment.fine_factor << "\n";
    os << "ref_factor = " << cfg.experiment.ref_factor << "\n";
    os << "p = " << cfg.experiment.p << "\n";
    os << "replications = " << cfg.experiment.replications << "\n";
    os << "seed = " << cfg.experiment.master_seed << "\n";
    os << "tag = " << cfg.experiment.tag << "\n";
    os << "threads = " << cfg.experiment.threads << "\n";
    return os.str();
}

bool experiment_configs_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.sde.drift.same_structure(b.sde.drift) && a.sde.x0 == b.sde.x0 &&
           a.n_list == b.n_list && a.fine_factor == b.fine_factor &&
           a.ref_factor == b.ref_factor && a.p == b.p && a.replications == b.replications &&
           a.master_seed == b.master_seed && a.tag == b.tag && a.threads == b.threads;
}

} // namespace sdecoup
