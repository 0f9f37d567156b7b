#include "mdimkit/commands.hpp"

#include <cmath>
#include <stdexcept>

#include "mdimkit/mdim.hpp"
#include "mdimkit/ratedist.hpp"
#include "mdimkit/serialize.hpp"
#include "mdimkit/tilings.hpp"

namespace mdk {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const std::vector<StockConfig> kStock{
#include "stock_configs.inc"
};

struct Emitter {
  const ExperimentConfig& cfg;
  const fs::path& dir;
  std::ostream& log;
  CommandOutput& out;

  CsvWriter csv(std::vector<std::string> columns) const {
    return CsvWriter(kToolkitVersion, cfg.hash(), std::move(columns));
  }

  ordered_json header() const {
    ordered_json j = provenance(kToolkitVersion, cfg.hash(), cfg.name);
    j["config"] = cfg.canonical;
    return j;
  }

  void write(const std::string& suffix, const std::string& text) const {
    fs::create_directories(dir);
    const fs::path p = dir / (cfg.name + suffix);
    write_text(p, text);
    out.files.push_back(p);
    log << "wrote " << p.string() << "\n";
  }
};

void require_eps(const ExperimentConfig& cfg) {
  if (cfg.eps_grid.empty()) throw ConfigError(cfg.source, cfg.line_of("eps_grid"), "eps_grid", "eps grid is empty");
}

MeasurePtr configured_measure(const ExperimentConfig& cfg) {
  const Alphabet& a = cfg.model_alphabet();
  const MeasureConfig& m = cfg.measure;
  if (m.kind == "product") {
    if (m.site.empty()) return product_measure(Pmf::uniform(a.size()), "uniform");
    return product_measure(Pmf(m.site), "product");
  }
  if (m.kind == "markov") return markov_measure(Channel(a.size(), a.size(), m.transition), "markov");
  const VpModel model{cfg.group(), a, cfg.folner()};
  auto c = candidate_measures(model, "empirical", m.empirical_eps, m.empirical_n, cfg.seed, 2, cfg.max_points);
  if (c.empty()) {
    throw ConfigError(cfg.source, cfg.line_of("measure"), "measure",
                      "empirical measure needs a lattice group and an enumerable window");
  }
  return c.front().measure;
}

DistortionSpec spec_for(const ExperimentConfig& cfg, double eps, double alpha) {
  switch (cfg.distortion) {
    case DistortionKind::L1:
      return DistortionSpec::l1(eps);
    case DistortionKind::Lp:
      return DistortionSpec::lp(eps, cfg.p);
    case DistortionKind::Linf:
      break;
  }
  return DistortionSpec::linf(eps, alpha);
}

}  // namespace

const std::vector<StockConfig>& stock_configs() { return kStock; }

CommandOutput cmd_mdim(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  require_eps(cfg);
  CommandOutput out;
  const Emitter em{cfg, out_dir, log, out};
  const MdimEstimate est =
      s_profile(cfg.model_alphabet(), cfg.folner(), cfg.eps_grid, cfg.n_min, cfg.n_max, cfg.max_points, cfg.jobs);

  ordered_json j = em.header();
  j["profile"] = to_json(est);
  try {
    j["slopes"] = {{"S", to_json(mdim_slopes(est, MetricKind::Max))},
                   {"Stilde", to_json(mdim_slopes(est, MetricKind::Average))}};
  } catch (const std::invalid_argument& e) {
    j["slopes"] = nullptr;
    j["slopes_unavailable"] = e.what();
  }
  em.write(".mdim.json", dump_json(j));

  CsvWriter csv = em.csv({"eps", "n", "window_size", "cover_lower", "cover_upper", "cover_bar_lower",
                          "cover_bar_upper", "S_lower", "S_upper", "Stilde_lower", "Stilde_upper"});
  for (const auto& r : est.rows) {
    csv.cell(r.eps).cell(static_cast<long long>(r.n)).cell(static_cast<long long>(r.window_size));
    csv.cell(r.cover.lower).cell(r.cover.upper).cell(r.cover_bar.lower).cell(r.cover_bar.upper);
    csv.cell(r.S_lower).cell(r.S_upper).cell(r.Stilde_lower).cell(r.Stilde_upper);
    csv.end_row();
  }
  em.write(".mdim.csv", csv.str());
  if (est.truncated) log << "profile truncated at n=" << est.first_truncated_n << "\n";
  return out;
}

CommandOutput cmd_rd(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  require_eps(cfg);
  CommandOutput out;
  const Emitter em{cfg, out_dir, log, out};
  const Alphabet& a = cfg.model_alphabet();
  const MeasurePtr mu = configured_measure(cfg);
  const FolnerSequence folner = cfg.folner();
  const std::vector<double> alphas =
      cfg.distortion == DistortionKind::Linf ? cfg.alpha_grid : std::vector<double>{0.0};

  CsvWriter csv = em.csv({"eps", "n", "rate_per_symbol", "distortion", "multiplier", "gap", "alpha", "rate",
                          "status", "measure", "window_size", "codebook_size"});
  int flagged = 0;
  for (double eps : cfg.eps_grid) {
    for (double alpha : alphas) {
      const DistortionSpec spec = spec_for(cfg, eps, alpha);
      const NormalizedProfile prof = rd_normalized(*mu, a, spec, folner, cfg.n_min, cfg.n_max, cfg.rd, cfg.budget_cells);
      for (const auto& r : prof.rows) {
        csv.cell(eps).cell(static_cast<long long>(r.n)).cell(r.rate_per_symbol).cell(r.result.distortion);
        csv.cell(r.result.s).cell(r.result.gap).cell(alpha).cell(r.result.rate);
        csv.cell(rd_status_name(r.result.status)).cell(mu->name());
        csv.cell(static_cast<long long>(r.window_size)).cell(static_cast<long long>(r.codebook_size));
        csv.end_row();
        if (r.result.status == RDStatus::Infeasible || r.result.status == RDStatus::NotConverged) ++flagged;
      }
      if (prof.truncated) {
        for (int n = prof.first_truncated_n; n <= cfg.n_max; ++n) {
          const double nan = std::nan("");
          csv.cell(eps).cell(static_cast<long long>(n)).cell(nan).cell(nan).cell(nan).cell(nan).cell(alpha).cell(nan);
          csv.cell("budget_exceeded").cell(mu->name());
          csv.cell(static_cast<long long>(folner(n).size())).cell(0LL);
          csv.end_row();
          ++flagged;
        }
      }
    }
  }
  em.write(".rd.csv", csv.str());
  if (flagged) log << flagged << " flagged rows (infeasible, not converged or over budget)\n";
  return out;
}

CommandOutput cmd_verify_vp(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  require_eps(cfg);
  CommandOutput out;
  const Emitter em{cfg, out_dir, log, out};
  const VpModel model{cfg.group(), cfg.model_alphabet(), cfg.folner()};
  VpReport rep = verify_vp(model, cfg.vp_options());

  ordered_json j = em.header();
  j["report"] = to_json(rep);
  em.write(".vp.json", dump_json(j));

  CsvWriter rows = em.csv({"eps", "n", "S_lower", "S_upper", "Stilde_lower", "Stilde_upper", "best_rate", "family",
                           "measure", "best_rate_linf", "ratio_rate", "ratio_S", "ratio_Stilde"});
  for (const auto& r : rep.rows) {
    rows.cell(r.eps).cell(static_cast<long long>(r.n)).cell(r.S_lower).cell(r.S_upper).cell(r.Stilde_lower);
    rows.cell(r.Stilde_upper).cell(r.best_rate).cell(r.family).cell(r.measure).cell(r.best_rate_linf);
    rows.cell(r.ratio_rate).cell(r.ratio_S).cell(r.ratio_Stilde);
    rows.end_row();
  }
  em.write(".vp.csv", rows.str());

  CsvWriter rates = em.csv({"family", "measure", "mode", "eps", "alpha", "n", "window_size", "codebook_size", "rate",
                            "rate_per_symbol", "distortion", "multiplier", "gap", "status"});
  for (const auto& r : rep.rates) {
    rates.cell(r.family).cell(r.measure).cell(r.mode).cell(r.eps).cell(r.alpha).cell(static_cast<long long>(r.n));
    rates.cell(static_cast<long long>(r.window_size)).cell(static_cast<long long>(r.codebook_size)).cell(r.rate);
    rates.cell(r.rate_per_symbol).cell(r.distortion).cell(r.multiplier).cell(r.gap).cell(r.status);
    rates.end_row();
  }
  em.write(".vp_rates.csv", rates.str());

  CsvWriter checks = em.csv({"name", "eps", "n", "subject", "lhs", "rhs", "holds", "exact"});
  for (const auto& c : rep.checks) {
    checks.cell(c.name).cell(c.eps).cell(static_cast<long long>(c.n)).cell(c.subject).cell(c.lhs).cell(c.rhs);
    checks.cell(c.holds ? "1" : "0").cell(c.exact ? "1" : "0");
    checks.end_row();
  }
  em.write(".vp_checks.csv", checks.str());

  for (const auto& c : rep.checks) {
    if (!c.holds && c.exact) {
      log << "violated: " << c.name << " eps=" << format_number(c.eps) << " n=" << c.n << " " << c.subject << ": "
          << format_number(c.lhs) << " > " << format_number(c.rhs) << "\n";
    }
  }
  for (const auto& t : rep.truncations) log << "truncated: " << t << "\n";
  log << cfg.name << ": " << rep.checks.size() << " checks, " << rep.violations << " exact violations\n";
  out.status = rep.passed() ? 0 : 1;
  out.report = std::move(rep);
  return out;
}

CommandOutput cmd_tiling(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  CommandOutput out;
  const Emitter em{cfg, out_dir, log, out};
  const TilingConfig& tc = cfg.tiling;
  const GroupPtr g = cfg.group();
  if (tc.window_lo.empty()) throw ConfigError(cfg.source, cfg.line_of("tiling_window"), "tiling_window", "required");
  if (tc.window_lo.size() != g->lattice_rank()) {
    throw ConfigError(cfg.source, cfg.line_of("tiling_window"), "tiling_window", "window rank does not match the group");
  }
  const FiniteSubset window = box(tc.window_lo, tc.window_hi);

  auto shapes = [&] {
    if (tc.shapes.empty()) throw ConfigError(cfg.source, cfg.line_of("tiling_shapes"), "tiling_shapes", "required");
    std::vector<FiniteSubset> out;
    for (const auto& s : tc.shapes) {
      try {
        out.emplace_back(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.source, cfg.line_of("tiling_shapes"), "tiling_shapes", e.what());
      }
    }
    return out;
  };

  FiniteTiling t = [&] {
    if (tc.kind == "boxes") return tile_boxes(g, window, tc.side, tc.phase);
    if (tc.kind == "greedy") return greedy_tiling(g, window, shapes(), cfg.seed);
    if (tc.centers.size() != tc.shapes.size()) {
      throw ConfigError(cfg.source, cfg.line_of("tiling_centers"), "tiling_centers", "need one center list per shape");
    }
    return FiniteTiling{g, shapes(), tc.centers, window};
  }();

  const TilingValidation v = validate(t);
  const DensityReport d = density_report(t, window);
  std::vector<MultiplicityReport> mult;
  for (std::size_t s = 0; s < t.shape_count(); ++s) mult.push_back(covering_multiplicity(t, window, s, tc.mult_eps));

  ordered_json j = em.header();
  j["tiling"] = to_json(t);
  ordered_json issues = ordered_json::array();
  for (const auto& i : v.issues) issues.push_back({{"kind", violation_name(i.kind)}, {"message", i.message}});
  j["validation"] = {{"valid", v.valid()},
                     {"issues", issues},
                     {"remainder_fraction", std::stod(format_number(v.remainder_fraction))},
                     {"uncovered_fraction", std::stod(format_number(v.uncovered_fraction))}};
  ordered_json per = ordered_json::array();
  for (std::size_t s = 0; s < t.shape_count(); ++s) {
    per.push_back({{"shape", s},
                   {"density", std::stod(format_number(d.per_shape[s]))},
                   {"max_mult", mult[s].max_mult},
                   {"covered_fraction", std::stod(format_number(mult[s].covered_fraction))},
                   {"bound", std::stod(format_number(mult[s].bound))}});
  }
  j["report"] = {{"total_density", std::stod(format_number(d.total))}, {"mult_eps", tc.mult_eps}, {"shapes", per}};
  em.write(".tiling.json", dump_json(j));

  CsvWriter csv = em.csv({"shape", "shape_size", "tiles", "density", "max_mult", "covered_fraction", "bound"});
  for (std::size_t s = 0; s < t.shape_count(); ++s) {
    csv.cell(static_cast<long long>(s)).cell(static_cast<long long>(t.shapes[s].size()));
    csv.cell(static_cast<long long>(t.centers[s].size())).cell(d.per_shape[s]).cell(static_cast<long long>(mult[s].max_mult));
    csv.cell(mult[s].covered_fraction).cell(mult[s].bound);
    csv.end_row();
  }
  em.write(".tiling.csv", csv.str());

  log << cfg.name << ": remainder fraction " << format_number(v.remainder_fraction) << "\n";
  for (const auto& i : v.issues) log << "invalid: " << violation_name(i.kind) << ": " << i.message << "\n";
  out.status = v.valid() ? 0 : 1;
  return out;
}

CommandOutput run_command(const std::string& command, const ExperimentConfig& cfg, const fs::path& out_dir,
                          std::ostream& log) {
  if (command == "mdim") return cmd_mdim(cfg, out_dir, log);
  if (command == "rd") return cmd_rd(cfg, out_dir, log);
  if (command == "verify-vp") return cmd_verify_vp(cfg, out_dir, log);
  if (command == "tiling") return cmd_tiling(cfg, out_dir, log);
  throw std::invalid_argument("unknown command " + command);
}

SelftestResult run_selftest(const fs::path& out_dir, const Overrides& overrides, std::ostream& log) {
  SelftestResult res;
  for (const auto& s : stock_configs()) {
    ExperimentConfig cfg = resolve_config(parse_config_text(s.text, "configs/" + s.file));
    apply_overrides(cfg, overrides);
    SelftestEntry e{s.command, s.file, run_command(s.command, cfg, out_dir / cfg.name, log)};
    if (e.output.status != 0) res.status = 1;
    res.entries.push_back(std::move(e));
  }
  return res;
}

}  // namespace mdk
