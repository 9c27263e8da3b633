#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "blockade/config.hpp"
#include "blockade/experiments.hpp"

// Result persistence. Every table starts with a '#' header block carrying the
// library version and the full resolved configuration; config.resolved.yaml
// in the same directory reproduces the run when passed back via --config.

namespace blockade {

std::string_view library_version();

// Header lines (without the leading "# ") shared by all outputs.
std::vector<std::string> provenance_lines(const ExperimentConfig& config, std::string_view command);

// Each writer returns the files it created.
std::vector<std::filesystem::path> write_cw_outputs(const ExperimentConfig& config,
                                                    const CwResult& result,
                                                    const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_pulsed_outputs(const ExperimentConfig& config,
                                                        const PulsedResult& result,
                                                        const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_sweep_outputs(const ExperimentConfig& config,
                                                       const SweepResult& result,
                                                       const std::filesystem::path& dir);

}  // namespace blockade
