// Command implementations behind the CLI: each writes its reports under
// out_dir and returns the process exit code (0 pass, 1 condition failed).
// Usage/config errors (2) and numerical failures (3) surface as exceptions
// for the dispatcher to map.
#pragma once

#include <string>

#include "blochspec/config.hpp"

namespace blochspec {

// Jellium + Wiener verification; writes check.json and wiener.csv.
int cmd_check(const RunConfig& config, const std::string& out_dir);

// Band sweep; writes bands.csv and bands_summary.json (flat bands +
// growth-law fit).
int cmd_bands(const RunConfig& config, const std::string& out_dir);

// Dispersion-decay experiment; writes decay.csv.
int cmd_evolve(const RunConfig& config, const std::string& out_dir);

// Limiting-absorption scan; writes lap.csv.
int cmd_resolvent(const RunConfig& config, const std::string& out_dir);

}  // namespace blochspec
