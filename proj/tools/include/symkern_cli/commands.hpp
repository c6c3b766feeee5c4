#pragma once

#include <json.hpp>
#include <string>

namespace symkern::cli {

/// Known subcommands: kernel-eval, sample-prior, gp-posterior, error-curve,
/// accept-rate, range-curve, spectral-sample.
bool is_command(const std::string& name);

/// Fills defaults, runs the command, writes CSV to config["out"] and returns
/// that path. The first output line echoes the fully resolved config as
/// '# {json}', so re-running the echoed config reproduces the file
/// byte-for-byte.
std::string run_command(const std::string& name, nlohmann::json config);

}  // namespace symkern::cli
