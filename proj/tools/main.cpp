// Command line front end.  Subcommands are registered here and implemented
// next to the library modules they drive.  Every flag mirrors a config key;
// precedence is defaults < --config file < flags.
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using ringtrio::cli::Config;
using ringtrio::cli::KeySpec;

struct Registered {
    std::vector<KeySpec> schema;
    std::function<void(const Config&)> body;
    std::string config_file;
    std::map<std::string, std::string> flag_values;
};

void add_subcommand(CLI::App& app, const std::string& name,
                    const std::string& desc, std::vector<KeySpec> schema,
                    std::function<void(const Config&)> body, int& exit_code,
                    std::vector<std::unique_ptr<Registered>>& store) {
    auto reg = std::make_unique<Registered>();
    reg->schema = std::move(schema);
    reg->body = std::move(body);
    Registered* r = reg.get();
    store.push_back(std::move(reg));

    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", r->config_file,
                    "key=value config file (# comments); flags override it");
    for (const auto& k : r->schema)
        cmd->add_option("--" + k.key, r->flag_values[k.key],
                        k.help + " [" + k.def + "]");
    cmd->callback([r, name, cmd, &exit_code] {
        Config cfg(r->schema);
        try {
            if (!r->config_file.empty()) cfg.merge_file(r->config_file);
            for (const auto& k : r->schema)
                if (cmd->count("--" + k.key) > 0) cfg.set(k.key, r->flag_values[k.key]);
        } catch (const std::exception& e) {
            std::cerr << name << ": config error: " << e.what() << "\n";
            exit_code = 2;
            return;
        }
        exit_code = ringtrio::cli::run_guarded(name, cfg, r->body);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ring-trapped three-boson model: classical, semiclassical and "
                 "quantum analyses"};
    app.require_subcommand(1);
    int exit_code = 0;
    std::vector<std::unique_ptr<Registered>> store;

    add_subcommand(app, "trajectory", "integrate one trajectory and export CSV",
                   ringtrio::cli::trajectory_schema(), ringtrio::cli::run_trajectory,
                   exit_code, store);
    add_subcommand(app, "orbits",
                   "periodic-orbit census (JSON) and period-vs-energy tables (CSV)",
                   ringtrio::cli::orbits_schema(), ringtrio::cli::run_orbits,
                   exit_code, store);
    add_subcommand(app, "sos",
                   "surface of section: classified crossings (CSV) and regular "
                   "fraction summary (JSON)",
                   ringtrio::cli::sos_schema(), ringtrio::cli::run_sos, exit_code,
                   store);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
