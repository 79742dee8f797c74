// Subcommand bodies and their config schemas.  Each subcommand's flags are
// generated from its schema, so every flag is mirrored by a config key.
#pragma once

#include <vector>

#include "cli_support.hpp"

namespace ringtrio::cli {

std::vector<KeySpec> trajectory_schema();
void run_trajectory(const Config& cfg);

std::vector<KeySpec> orbits_schema();
void run_orbits(const Config& cfg);

std::vector<KeySpec> sos_schema();
void run_sos(const Config& cfg);

}  // namespace ringtrio::cli
