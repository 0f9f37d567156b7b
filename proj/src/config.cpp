#include "mdimkit/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace mdk {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(const std::string& source, int line) {
  return line > 0 ? source + ":" + std::to_string(line) : source;
}

// Parsing context for one entry.
struct Field {
  const std::string& source;
  const std::string& key;
  const ConfigEntry& entry;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source, entry.line, key, msg); }

  double number() const {
    const std::string& v = entry.value;
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) fail("expected a number, got '" + v + "'");
    return x;
  }

  long long integer() const {
    const std::string& v = entry.value;
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
    return x;
  }

  std::size_t count() const {
    const long long x = integer();
    if (x <= 0) fail("expected a positive integer");
    return static_cast<std::size_t>(x);
  }

  json payload() const {
    try {
      return json::parse(entry.value);
    } catch (const json::exception& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
  }

  // JSON array or comma-separated list.
  std::vector<double> numbers() const {
    std::vector<double> out;
    if (!entry.value.empty() && entry.value.front() == '[') {
      const json j = payload();
      if (!j.is_array()) fail("expected a JSON array");
      for (const auto& v : j) {
        if (!v.is_number()) fail("expected numbers");
        out.push_back(v.get<double>());
      }
      return out;
    }
    std::stringstream ss(entry.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      ConfigEntry sub{item, entry.line};
      out.push_back(Field{source, key, sub}.number());
    }
    return out;
  }

  std::vector<std::string> words() const {
    std::vector<std::string> out;
    if (!entry.value.empty() && entry.value.front() == '[') {
      const json j = payload();
      if (!j.is_array()) fail("expected a JSON array");
      for (const auto& v : j) {
        if (!v.is_string()) fail("expected strings");
        out.push_back(v.get<std::string>());
      }
      return out;
    }
    std::stringstream ss(entry.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  // Square matrix given flat or nested.
  std::vector<double> matrix() const {
    const json j = payload();
    if (!j.is_array()) fail("expected a JSON matrix");
    std::vector<double> out;
    for (const auto& row : j) {
      if (row.is_array()) {
        for (const auto& v : row) {
          if (!v.is_number()) fail("matrix entries must be numbers");
          out.push_back(v.get<double>());
        }
      } else if (row.is_number()) {
        out.push_back(row.get<double>());
      } else {
        fail("matrix entries must be numbers");
      }
    }
    return out;
  }

  static Element element(const json& e, const Field& f) {
    if (!e.is_array()) f.fail("group elements are integer arrays");
    Element out;
    for (const auto& c : e) {
      if (!c.is_number_integer()) f.fail("group elements are integer arrays");
      out.push_back(c.get<Coord>());
    }
    return out;
  }

  std::vector<std::vector<Element>> element_lists() const {
    const json j = payload();
    if (!j.is_array()) fail("expected a JSON array of element lists");
    std::vector<std::vector<Element>> out;
    for (const auto& list : j) {
      if (!list.is_array()) fail("expected a JSON array of element lists");
      std::vector<Element> es;
      for (const auto& e : list) es.push_back(element(e, *this));
      out.push_back(std::move(es));
    }
    return out;
  }

  std::vector<Coord> coords(const json& j) const {
    Element e = element(j, *this);
    return e;
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(where(source, line) + ": " + field + ": " + message), field_(std::move(field)), line_(line) {}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RawConfig parse_config_text(std::string_view text, std::string source) {
  RawConfig raw;
  raw.source = std::move(source);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(raw.source, line_no, trim(t), "expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(raw.source, line_no, "<empty>", "missing key");
    if (raw.entries.count(key)) {
      throw ConfigError(raw.source, line_no, key,
                        "duplicate key (first set on line " + std::to_string(raw.entries[key].line) + ")");
    }
    raw.entries[key] = {value, line_no};
  }
  return raw;
}

RawConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "--config", "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ExperimentConfig resolve_config(const RawConfig& raw) {
  ExperimentConfig cfg;
  cfg.source = raw.source;
  std::optional<Field> labels_field, metric_field;

  using Handler = std::function<void(const Field&)>;
  const std::map<std::string, Handler> handlers{
      {"name", [&](const Field& f) { cfg.name = f.entry.value; }},
      {"group",
       [&](const Field& f) {
         try {
           make_group(f.entry.value);
         } catch (const std::invalid_argument& e) {
           f.fail(e.what());
         }
         cfg.group_name = f.entry.value;
       }},
      {"folner",
       [&](const Field& f) {
         if (f.entry.value != "boxes" && f.entry.value != "stretched") f.fail("expected boxes or stretched");
         cfg.folner_name = f.entry.value;
       }},
      {"alphabet", [&](const Field& f) { cfg.alphabet_spec = f.entry.value; }},
      {"labels", [&](const Field& f) { labels_field.emplace(f); }},
      {"metric", [&](const Field& f) { metric_field.emplace(f); }},
      {"eps_grid",
       [&](const Field& f) {
         cfg.eps_grid = f.numbers();
         if (cfg.eps_grid.empty()) f.fail("eps grid is empty");
         for (double e : cfg.eps_grid) {
           if (!(e > 0.0)) f.fail("eps values must be positive");
         }
       }},
      {"n_range",
       [&](const Field& f) {
         const std::string& v = f.entry.value;
         const auto dots = v.find("..");
         ConfigEntry lo{trim(v.substr(0, dots)), f.entry.line};
         ConfigEntry hi{dots == std::string::npos ? lo.value : trim(v.substr(dots + 2)), f.entry.line};
         cfg.n_min = static_cast<int>(Field{f.source, f.key, lo}.count());
         cfg.n_max = static_cast<int>(Field{f.source, f.key, hi}.count());
         if (cfg.n_max < cfg.n_min) f.fail("empty n range");
       }},
      {"distortion",
       [&](const Field& f) {
         const std::string& v = f.entry.value;
         if (v == "L1") {
           cfg.distortion = DistortionKind::L1;
         } else if (v == "Lp") {
           cfg.distortion = DistortionKind::Lp;
         } else if (v == "Linf") {
           cfg.distortion = DistortionKind::Linf;
         } else {
           f.fail("expected L1, Lp or Linf");
         }
       }},
      {"p",
       [&](const Field& f) {
         cfg.p = f.number();
         if (!(cfg.p >= 1.0)) f.fail("p must be >= 1");
       }},
      {"alpha_grid",
       [&](const Field& f) {
         cfg.alpha_grid = f.numbers();
         if (cfg.alpha_grid.empty()) f.fail("alpha grid is empty");
         for (std::size_t i = 0; i < cfg.alpha_grid.size(); ++i) {
           if (!(cfg.alpha_grid[i] > 0.0)) f.fail("alpha values must be positive");
           if (i > 0 && !(cfg.alpha_grid[i] < cfg.alpha_grid[i - 1])) f.fail("alpha grid must be strictly decreasing");
         }
       }},
      {"measure",
       [&](const Field& f) {
         const std::string& v = f.entry.value;
         if (v != "product" && v != "markov" && v != "empirical") f.fail("expected product, markov or empirical");
         cfg.measure.kind = v;
       }},
      {"site", [&](const Field& f) { cfg.measure.site = f.numbers(); }},
      {"transition", [&](const Field& f) { cfg.measure.transition = f.matrix(); }},
      {"empirical_eps",
       [&](const Field& f) {
         cfg.measure.empirical_eps = f.number();
         if (!(cfg.measure.empirical_eps > 0.0)) f.fail("must be positive");
       }},
      {"empirical_n", [&](const Field& f) { cfg.measure.empirical_n = static_cast<int>(f.count()); }},
      {"families", [&](const Field& f) { cfg.vp.families = f.words(); }},
      {"p_values", [&](const Field& f) { cfg.vp.p_values = f.numbers(); }},
      {"alphas", [&](const Field& f) { cfg.vp.alphas = f.numbers(); }},
      {"deltas", [&](const Field& f) { cfg.vp.deltas = f.numbers(); }},
      {"modes",
       [&](const Field& f) {
         cfg.vp.modes.clear();
         for (const auto& w : f.words()) {
           if (w == "L1") {
             cfg.vp.modes.push_back(DistortionKind::L1);
           } else if (w == "Lp") {
             cfg.vp.modes.push_back(DistortionKind::Lp);
           } else if (w == "Linf") {
             cfg.vp.modes.push_back(DistortionKind::Linf);
           } else {
             f.fail("unknown mode '" + w + "'");
           }
         }
       }},
      {"slack",
       [&](const Field& f) {
         cfg.vp.slack = f.number();
         if (!std::isfinite(cfg.vp.slack)) f.fail("slack must be finite");
       }},
      {"fano_D", [&](const Field& f) { cfg.vp.fano_D = f.number(); }},
      {"dirichlet_count", [&](const Field& f) { cfg.vp.dirichlet_count = static_cast<int>(f.integer()); }},
      {"seed",
       [&](const Field& f) {
         const long long s = f.integer();
         if (s < 0) f.fail("seed must be nonnegative");
         cfg.seed = static_cast<std::uint64_t>(s);
       }},
      {"budget_cells", [&](const Field& f) { cfg.budget_cells = f.count(); }},
      {"max_points", [&](const Field& f) { cfg.max_points = f.count(); }},
      {"jobs", [&](const Field& f) { cfg.jobs = static_cast<int>(f.count()); }},
      {"rd.s_max_factor", [&](const Field& f) { cfg.rd.s_max_factor = f.number(); }},
      {"rd.distortion_tol", [&](const Field& f) { cfg.rd.distortion_tol = f.number(); }},
      {"rd.max_outer", [&](const Field& f) { cfg.rd.max_outer = static_cast<int>(f.count()); }},
      {"rd.max_inner", [&](const Field& f) { cfg.rd.max_inner = static_cast<int>(f.count()); }},
      {"rd.inner_tol", [&](const Field& f) { cfg.rd.inner_tol = f.number(); }},
      {"rd.gap_tol", [&](const Field& f) { cfg.rd.gap_tol = f.number(); }},
      {"rd.search_inner", [&](const Field& f) { cfg.rd.search_inner = static_cast<int>(f.count()); }},
      {"rd.search_tol", [&](const Field& f) { cfg.rd.search_tol = f.number(); }},
      {"tiling",
       [&](const Field& f) {
         const std::string& v = f.entry.value;
         if (v != "boxes" && v != "greedy" && v != "explicit") f.fail("expected boxes, greedy or explicit");
         cfg.tiling.kind = v;
       }},
      {"tiling_window",
       [&](const Field& f) {
         const json j = f.payload();
         if (!j.is_array() || j.size() != 2) f.fail("expected [[lo...], [hi...]]");
         cfg.tiling.window_lo = f.coords(j[0]);
         cfg.tiling.window_hi = f.coords(j[1]);
         if (cfg.tiling.window_lo.size() != cfg.tiling.window_hi.size()) f.fail("corner ranks differ");
         for (std::size_t i = 0; i < cfg.tiling.window_lo.size(); ++i) {
           if (!(cfg.tiling.window_lo[i] < cfg.tiling.window_hi[i])) f.fail("empty window");
         }
       }},
      {"tile_side", [&](const Field& f) { cfg.tiling.side = static_cast<Coord>(f.count()); }},
      {"tile_phase", [&](const Field& f) { cfg.tiling.phase = f.coords(f.payload()); }},
      {"tiling_shapes", [&](const Field& f) { cfg.tiling.shapes = f.element_lists(); }},
      {"tiling_centers", [&](const Field& f) { cfg.tiling.centers = f.element_lists(); }},
      {"mult_eps",
       [&](const Field& f) {
         cfg.tiling.mult_eps = f.number();
         if (!(cfg.tiling.mult_eps > 0.0 && cfg.tiling.mult_eps < 1.0)) f.fail("must lie in (0, 1)");
       }},
  };

  for (const auto& [key, entry] : raw.entries) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(raw.source, entry.line, key, "unknown key");
    it->second(Field{raw.source, key, entry});
    cfg.canonical[key] = entry.value;
    cfg.lines[key] = entry.line;
  }

  // Alphabet.
  const std::string& spec = cfg.alphabet_spec;
  const auto alpha_line = raw.entries.count("alphabet") ? raw.entries.at("alphabet").line : 0;
  auto alpha_fail = [&](const std::string& msg) { throw ConfigError(raw.source, alpha_line, "alphabet", msg); };
  auto size_after_colon = [&](const std::string& prefix) -> std::size_t {
    const std::string rest = spec.substr(prefix.size());
    ConfigEntry e{rest, alpha_line};
    const std::string key = "alphabet";
    return Field{raw.source, key, e}.count();
  };
  try {
    if (spec.rfind("hamming:", 0) == 0) {
      cfg.alphabet = hamming_alphabet(size_after_colon("hamming:"));
    } else if (spec.rfind("grid:", 0) == 0) {
      cfg.alphabet = grid_alphabet(size_after_colon("grid:"));
    } else if (spec == "custom") {
      if (!metric_field) alpha_fail("custom alphabets need a metric");
      const std::vector<double> m = metric_field->matrix();
      const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m.size()))));
      if (n * n != m.size() || n == 0) metric_field->fail("metric must be a nonempty square matrix");
      std::vector<std::string> labels;
      if (labels_field) {
        labels = labels_field->words();
        if (labels.size() != n) labels_field->fail("label count does not match the metric");
      } else {
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
      }
      try {
        cfg.alphabet = Alphabet(std::move(labels), m);
      } catch (const std::invalid_argument& e) {
        metric_field->fail(std::string("metric validation failed: ") + e.what());
      }
    } else {
      alpha_fail("expected hamming:<k>, grid:<m> or custom");
    }
  } catch (const std::length_error& e) {
    alpha_fail(e.what());
  }
  if (spec != "custom" && (labels_field || metric_field)) {
    const Field& f = metric_field ? *metric_field : *labels_field;
    f.fail("labels and metric apply to custom alphabets only");
  }

  // Cross-field checks.
  const std::size_t q = cfg.alphabet->size();
  auto line_of = [&](const char* key) { return raw.entries.count(key) ? raw.entries.at(key).line : 0; };
  if (!cfg.measure.site.empty()) {
    if (cfg.measure.site.size() != q) throw ConfigError(raw.source, line_of("site"), "site", "length does not match the alphabet");
    try {
      Pmf check(cfg.measure.site);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(raw.source, line_of("site"), "site", e.what());
    }
  }
  if (cfg.measure.kind == "markov") {
    if (cfg.measure.transition.size() != q * q) {
      throw ConfigError(raw.source, line_of("transition"), "transition", "need an |A| x |A| row-stochastic matrix");
    }
    try {
      Channel check(q, q, cfg.measure.transition);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(raw.source, line_of("transition"), "transition", e.what());
    }
    if (make_group(cfg.group_name)->lattice_rank() != 1) {
      throw ConfigError(raw.source, line_of("measure"), "measure", "Markov measures need group Z");
    }
  }
  try {
    VpOptions probe = cfg.vp_options();
    if (probe.eps_grid.empty()) probe.eps_grid = {1.0};
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(raw.source, 0, "verify-vp options", e.what());
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.canonical["seed"] = std::to_string(*o.seed);
  }
  if (o.budget_cells) {
    if (*o.budget_cells == 0) throw ConfigError("command line", 0, "--budget-cells", "must be positive");
    cfg.budget_cells = *o.budget_cells;
    cfg.canonical["budget_cells"] = std::to_string(*o.budget_cells);
  }
  if (o.jobs) {
    if (*o.jobs < 1) throw ConfigError("command line", 0, "--jobs", "must be positive");
    cfg.jobs = *o.jobs;
  }
}

int ExperimentConfig::line_of(const std::string& key) const {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

GroupPtr ExperimentConfig::group() const { return make_group(group_name); }

FolnerSequence ExperimentConfig::folner() const { return make_folner(*group(), folner_name); }

const Alphabet& ExperimentConfig::model_alphabet() const {
  if (!alphabet) throw std::logic_error("configuration was not resolved");
  return *alphabet;
}

std::string ExperimentConfig::hash() const {
  std::string bytes;
  for (const auto& [k, v] : canonical) {
    if (k == "jobs") continue;
    bytes += k;
    bytes += '=';
    bytes += v;
    bytes += '\n';
  }
  return hex64(fnv1a64(bytes));
}

VpOptions ExperimentConfig::vp_options() const {
  VpOptions o = vp;
  o.eps_grid = eps_grid;
  o.n_min = n_min;
  o.n_max = n_max;
  o.seed = seed;
  o.rd = rd;
  o.budget_cells = budget_cells;
  o.max_points = max_points;
  o.jobs = jobs;
  return o;
}

}  // namespace mdk
