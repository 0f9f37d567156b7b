#pragma once

// Experiment configuration: flat `key = value` lines, `#` comments, JSON
// payloads for lists and matrices.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdimkit/groups.hpp"
#include "mdimkit/ratedist.hpp"
#include "mdimkit/spaces.hpp"
#include "mdimkit/verify_vp.hpp"

namespace mdk {

inline constexpr const char* kToolkitVersion = "0.3.1";

class ConfigError : public std::runtime_error {
 public:
  // line 0: not tied to a line (missing key, command-line override).
  ConfigError(std::string source, int line, std::string field, const std::string& message);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct RawConfig {
  std::string source = "<config>";
  std::map<std::string, ConfigEntry> entries;
};

RawConfig parse_config_text(std::string_view text, std::string source = "<config>");
RawConfig load_config_file(const std::filesystem::path& path);

struct MeasureConfig {
  std::string kind = "product";  // product, markov, empirical
  std::vector<double> site;      // product law; empty means uniform
  std::vector<double> transition;
  double empirical_eps = 0.1;
  int empirical_n = 1;
};

struct TilingConfig {
  std::string kind = "boxes";  // boxes, greedy, explicit
  std::vector<Coord> window_lo;
  std::vector<Coord> window_hi;
  Coord side = 1;
  std::vector<Coord> phase;
  std::vector<std::vector<Element>> shapes;   // greedy and explicit
  std::vector<std::vector<Element>> centers;  // explicit
  double mult_eps = 0.1;
};

struct ExperimentConfig {
  std::string source;
  std::string name = "experiment";
  std::string group_name = "Z";
  std::string folner_name = "boxes";
  std::string alphabet_spec = "hamming:2";
  std::optional<Alphabet> alphabet;
  std::vector<double> eps_grid;
  int n_min = 1;
  int n_max = 1;
  DistortionKind distortion = DistortionKind::L1;
  double p = 2.0;
  std::vector<double> alpha_grid{0.1};
  MeasureConfig measure;
  VpOptions vp;  // families, p_values, alphas, deltas, slack, fano_D, dirichlet_count
  RDOptions rd;
  std::uint64_t seed = 1;
  std::size_t budget_cells = kDefaultBudgetCells;
  std::size_t max_points = kDefaultMaxPoints;
  int jobs = 1;
  TilingConfig tiling;
  // Effective key/value pairs after overrides; hashed into outputs.
  std::map<std::string, std::string> canonical;
  std::map<std::string, int> lines;  // key -> line in the source

  int line_of(const std::string& key) const;

  GroupPtr group() const;
  FolnerSequence folner() const;
  const Alphabet& model_alphabet() const;
  // FNV-1a 64 of the canonical entries, as 16 hex digits.
  std::string hash() const;
  // Options for verify_vp with the shared fields filled in.
  VpOptions vp_options() const;
};

// Throws ConfigError naming the line and field of the first problem.
ExperimentConfig resolve_config(const RawConfig& raw);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> budget_cells;
  std::optional<int> jobs;
};

// Applies command-line overrides; seed and budget enter the hash, jobs does
// not since output does not depend on it.
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mdk
