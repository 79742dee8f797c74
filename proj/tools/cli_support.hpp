// Shared plumbing for the command line front end: flat key=value configs
// with defaults and validation, a stable config hash stamped into every
// output artifact, atomic file writes, and the run manifest.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ringtrio::cli {

inline constexpr const char* kVersion = "0.1.0";

// Configuration problems exit with code 2; numerical failures with code 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KeySpec {
    std::string key;
    std::string def;
    std::string help;
};

// Resolved configuration: schema defaults, overridden by a config file,
// overridden by command line flags.  Unknown keys are rejected.
class Config {
  public:
    explicit Config(const std::vector<KeySpec>& schema);

    void merge_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);

    const std::string& str(const std::string& key) const;
    double num(const std::string& key) const;
    double positive(const std::string& key) const;  // > 0 or ConfigError
    int integer(const std::string& key) const;
    std::uint64_t u64(const std::string& key) const;

    const std::map<std::string, std::string>& items() const { return kv_; }
    // FNV-1a over the sorted "key=value" lines; stamped into every artifact
    std::string hash_hex() const;

  private:
    std::map<std::string, std::string> kv_;
};

// Worker-thread budget: RINGTRIO_THREADS, default 1.
int thread_count();

// Writes data to <path> via a temporary file in the same directory followed
// by an atomic rename.
void atomic_write(const std::filesystem::path& path, const std::string& data);

// Comment stamp placed at the top of every CSV artifact.
std::string csv_stamp(const Config& cfg);

// Writes the named files atomically into out_dir, then a manifest.json
// capturing the subcommand, resolved config, config hash, seed and the
// output list.
void write_artifacts(
    const std::string& subcommand, const Config& cfg,
    const std::vector<std::pair<std::string, std::string>>& files,
    const nlohmann::json& extra = nlohmann::json::object());

// Machine-readable failure report (error.json in the output directory).
void write_error_report(const std::string& subcommand, const Config& cfg,
                        const std::string& message);

// Runs the subcommand body, mapping exceptions onto exit codes 2 / 3 and
// emitting the error report.
int run_guarded(const std::string& subcommand, const Config& cfg,
                const std::function<void(const Config&)>& body);

// Fixed-precision, locale-independent float formatting for CSV output.
std::string fmt(double v);

}  // namespace ringtrio::cli
