#pragma once

// Subcommands behind the command-line tool. Each writes its files into
// `out_dir` and returns the process exit status: 0 success, 1 an exact
// inequality failed or a tiling did not validate. Configuration problems
// throw ConfigError (the tool maps them to status 2).

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mdimkit/config.hpp"
#include "mdimkit/verify_vp.hpp"

namespace mdk {

struct CommandOutput {
  int status = 0;
  std::vector<std::filesystem::path> files;
  std::optional<VpReport> report;  // verify-vp only
};

CommandOutput cmd_mdim(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
CommandOutput cmd_rd(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
CommandOutput cmd_verify_vp(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
CommandOutput cmd_tiling(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

// Runs a subcommand by its command-line name ("mdim", "rd", "verify-vp",
// "tiling").
CommandOutput run_command(const std::string& command, const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir, std::ostream& log);

struct StockConfig {
  std::string command;
  std::string file;  // name under configs/
  std::string text;
};

// The configurations shipped in configs/, embedded at build time.
const std::vector<StockConfig>& stock_configs();

struct SelftestEntry {
  std::string command;
  std::string file;
  CommandOutput output;
};

struct SelftestResult {
  int status = 0;
  std::vector<SelftestEntry> entries;
};

// Runs every stock configuration into out_dir/<config name>/.
SelftestResult run_selftest(const std::filesystem::path& out_dir, const Overrides& overrides, std::ostream& log);

}  // namespace mdk
