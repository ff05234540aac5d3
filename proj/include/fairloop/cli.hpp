#pragma once

#include <string>
#include <vector>

#include "fairloop/io.hpp"
#include "fairloop/sim.hpp"

namespace fairloop {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Builds an ExperimentConfig from a parsed key-value config. All violations
// (unknown keys, bad values, range errors) are appended to `errors`; the
// returned config is only meaningful when `errors` stays empty.
ExperimentConfig experiment_from_config(KeyValueConfig& config,
                                        std::vector<std::string>& errors);

// Entry point behind the `fairloop` binary: simulate | oracle | ablate |
// sweep | ingest. Returns the process exit status.
int run_cli(int argc, const char* const* argv);

}  // namespace fairloop
