#pragma once

#include "volgraph_cli/run_config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace volgraph::cli {

/// Files written by one command, relative to its run directory.
struct RunOutput {
    std::filesystem::path run_dir;
    std::vector<std::string> files;
};

/// `<config.out>/<command>-<hash of command and canonical config>`.
std::filesystem::path run_directory(const std::string& command, const RunConfig& config);

/// Validates, runs one command and writes its artifacts plus manifest.json.
RunOutput execute(const std::string& command, const RunConfig& config);

/// Test-partition report followed by one report per configured scenario.
/// Shared by `train` and `evaluate` so both produce identical tables.
std::vector<MetricsReport> evaluation_reports(GraphModel& model, const ExperimentData& data,
                                              const WindowedDataset& dataset, const RunConfig& config);

/// Entry point behind main(): parses flags, runs, and maps failures to exit codes
/// (2 config, 3 data, 4 numerical) with a JSON error object on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace volgraph::cli
