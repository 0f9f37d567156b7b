#pragma once

// CSV and JSON emission. Numbers print as %.12g so that reruns produce
// identical bytes; every file carries the toolkit version and config hash.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mdimkit/mdim.hpp"
#include "mdimkit/tilings.hpp"
#include "mdimkit/verify_vp.hpp"

namespace mdk {

std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(std::string_view version, std::string_view config_hash, std::vector<std::string> columns);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(std::string_view s);
  void end_row();

  const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

nlohmann::ordered_json to_json(const MdimEstimate& est);
nlohmann::ordered_json to_json(const MdimSlopes& s);
nlohmann::ordered_json to_json(const VpReport& r);
nlohmann::ordered_json to_json(const FiniteTiling& t);

// Header object shared by all JSON outputs.
nlohmann::ordered_json provenance(std::string_view version, std::string_view config_hash, std::string_view name);

// Writes `text` verbatim (binary mode, so LF stays LF).
void write_text(const std::filesystem::path& path, std::string_view text);
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace mdk
