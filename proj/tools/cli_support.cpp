#include "cli_support.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace ringtrio::cli {

namespace fs = std::filesystem;

Config::Config(const std::vector<KeySpec>& schema) {
    for (const auto& k : schema) kv_[k.key] = k.def;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void Config::merge_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
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
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key=value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void Config::set(const std::string& key, const std::string& value) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("unknown config key: " + key);
    it->second = value;
}

const std::string& Config::str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
}

double Config::num(const std::string& key) const {
    const std::string& v = str(key);
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: '" + v + "'");
    }
}

double Config::positive(const std::string& key) const {
    const double x = num(key);
    if (!(x > 0)) throw ConfigError("config key " + key + " must be positive");
    return x;
}

int Config::integer(const std::string& key) const {
    const double x = num(key);
    const int n = (int)x;
    if ((double)n != x)
        throw ConfigError("config key " + key + " must be an integer");
    return n;
}

std::uint64_t Config::u64(const std::string& key) const {
    const std::string& v = str(key);
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a non-negative integer: '" +
                          v + "'");
    }
}

std::string Config::hash_hex() const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    auto eat = [&h](const std::string& s) {
        for (const unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : kv_) {
        eat(k);
        eat("=");
        eat(v);
        eat("\n");
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

int thread_count() {
    const char* env = std::getenv("RINGTRIO_THREADS");
    if (!env || !*env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

void atomic_write(const fs::path& path, const std::string& data) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(data.data(), (std::streamsize)data.size());
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string csv_stamp(const Config& cfg) {
    std::string s = "# config_hash=" + cfg.hash_hex();
    if (cfg.items().count("seed")) s += " seed=" + cfg.str("seed");
    return s + "\n";
}

void write_artifacts(const std::string& subcommand, const Config& cfg,
                     const std::vector<std::pair<std::string, std::string>>& files,
                     const nlohmann::json& extra) {
    const fs::path outdir = cfg.str("out");
    nlohmann::json manifest;
    manifest["command"] = subcommand;
    manifest["version"] = kVersion;
    manifest["config"] = cfg.items();
    manifest["config_hash"] = cfg.hash_hex();
    if (cfg.items().count("seed")) manifest["seed"] = cfg.u64("seed");
    manifest["threads"] = thread_count();
    if (!extra.empty()) manifest["extra"] = extra;
    std::vector<std::string> names;
    for (const auto& [name, data] : files) {
        atomic_write(outdir / name, data);
        names.push_back(name);
    }
    manifest["outputs"] = names;
    atomic_write(outdir / "manifest.json", manifest.dump(2) + "\n");
}

void write_error_report(const std::string& subcommand, const Config& cfg,
                        const std::string& message) {
    try {
        nlohmann::json rep;
        rep["command"] = subcommand;
        rep["error"] = message;
        rep["config_hash"] = cfg.hash_hex();
        atomic_write(fs::path(cfg.str("out")) / "error.json", rep.dump(2) + "\n");
    } catch (const std::exception&) {
        // the report is best-effort; the exit code still signals the failure
    }
}

int run_guarded(const std::string& subcommand, const Config& cfg,
                const std::function<void(const Config&)>& body) {
    try {
        body(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << subcommand << ": config error: " << e.what() << "\n";
        write_error_report(subcommand, cfg, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << subcommand << ": " << e.what() << "\n";
        write_error_report(subcommand, cfg, e.what());
        return 3;
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace ringtrio::cli
