#include "mdimkit/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mdk {

using nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

namespace {

// Doubles round-trip through %.12g so JSON and CSV agree digit for digit.
ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ordered_json elements_json(const std::vector<Element>& es) {
  ordered_json out = ordered_json::array();
  for (const auto& e : es) out.push_back(e);
  return out;
}

ordered_json bracket_json(const CoverBracket& b) {
  return {{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"exact", b.exact}, {"enumerated", b.enumerated}};
}

}  // namespace

CsvWriter::CsvWriter(std::string_view version, std::string_view config_hash, std::vector<std::string> columns)
    : columns_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CSV needs columns");
  out_ = "# mdimkit ";
  out_ += version;
  out_ += " config=";
  out_ += config_hash;
  out_ += '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ',';
    out_ += csv_escape(columns[i]);
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_number(x))); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(std::to_string(x))); }

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (filled_ == columns_) throw std::logic_error("CSV row has too many cells");
  if (filled_) out_ += ',';
  out_ += csv_escape(s);
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("CSV row has too few cells");
  out_ += '\n';
  filled_ = 0;
}

ordered_json provenance(std::string_view version, std::string_view config_hash, std::string_view name) {
  return {{"toolkit", "mdimkit"}, {"version", version}, {"config_hash", config_hash}, {"name", name}};
}

ordered_json to_json(const MdimEstimate& est) {
  ordered_json j;
  j["eps_grid"] = ordered_json::array();
  for (double e : est.eps_grid) j["eps_grid"].push_back(num(e));
  j["truncated"] = est.truncated;
  if (est.truncated) j["first_truncated_n"] = est.first_truncated_n;
  j["rows"] = ordered_json::array();
  for (const auto& r : est.rows) {
    j["rows"].push_back({{"eps", num(r.eps)},
                         {"n", r.n},
                         {"window_size", r.window_size},
                         {"cover", bracket_json(r.cover)},
                         {"cover_bar", bracket_json(r.cover_bar)},
                         {"S_lower", num(r.S_lower)},
                         {"S_upper", num(r.S_upper)},
                         {"Stilde_lower", num(r.Stilde_lower)},
                         {"Stilde_upper", num(r.Stilde_upper)}});
  }
  j["monotonicity_issues"] = est.monotonicity_issues;
  return j;
}

ordered_json to_json(const MdimSlopes& s) {
  ordered_json tail = ordered_json::array();
  for (double e : s.tail_eps) tail.push_back(num(e));
  return {{"upper", num(s.upper)},
          {"lower", num(s.lower)},
          {"ls_slope", num(s.ls_slope)},
          {"tail_eps", tail},
          {"note", "tail statistics over a finite eps grid; not limits"}};
}

ordered_json to_json(const VpReport& r) {
  ordered_json j;
  j["passed"] = r.passed();
  j["violations"] = r.violations;
  j["rows"] = ordered_json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"eps", num(row.eps)},
                         {"n", row.n},
                         {"S_lower", num(row.S_lower)},
                         {"S_upper", num(row.S_upper)},
                         {"Stilde_lower", num(row.Stilde_lower)},
                         {"Stilde_upper", num(row.Stilde_upper)},
                         {"best_rate", num(row.best_rate)},
                         {"family", row.family},
                         {"measure", row.measure},
                         {"best_rate_linf", num(row.best_rate_linf)},
                         {"ratios", {{"rate", num(row.ratio_rate)}, {"S", num(row.ratio_S)}, {"Stilde", num(row.ratio_Stilde)}}}});
  }
  if (r.has_slopes) j["slopes"] = {{"S", to_json(r.slopes_S)}, {"Stilde", to_json(r.slopes_Stilde)}};
  j["checks"] = ordered_json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"eps", num(c.eps)},
                           {"n", c.n},
                           {"subject", c.subject},
                           {"lhs", num(c.lhs)},
                           {"rhs", num(c.rhs)},
                           {"holds", c.holds},
                           {"exact", c.exact}});
  }
  j["fano"] = ordered_json::array();
  for (const auto& f : r.fano) {
    j["fano"].push_back({{"eps", num(f.eps)},
                         {"n", f.n},
                         {"seed", f.seed},
                         {"set_size", f.set_size},
                         {"codebook_size", f.codebook_size},
                         {"separation", num(f.separation)},
                         {"distortion", num(f.distortion)},
                         {"mutual_information", num(f.mutual_information)},
                         {"bound", num(f.bound)},
                         {"status", status_name(f.status)},
                         {"reason", f.reason}});
  }
  j["truncations"] = r.truncations;
  j["profile"] = to_json(r.profile);
  return j;
}

ordered_json to_json(const FiniteTiling& t) {
  ordered_json shapes = ordered_json::array();
  for (const auto& s : t.shapes) shapes.push_back(elements_json(s.elements()));
  ordered_json centers = ordered_json::array();
  for (const auto& c : t.centers) centers.push_back(elements_json(c));
  return {{"shapes", shapes}, {"centers", centers}, {"window", elements_json(t.window.elements())}};
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace mdk
