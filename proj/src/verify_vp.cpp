#include "mdimkit/verify_vp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

#include "mdimkit/parallel.hpp"

namespace mdk {

namespace {

const std::vector<std::string> kFamilies{"point_mass", "uniform", "simplex_grid", "dirichlet",
                                         "subgrid",    "markov",  "empirical"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double ratio(double x, double eps) {
  const double l = std::abs(std::log(eps));
  return l > 0.0 ? x / l : std::numeric_limits<double>::quiet_NaN();
}

double config_count(const Alphabet& a, std::size_t k) {
  return std::pow(static_cast<double>(a.size()), static_cast<double>(k));
}

// Compositions of `total` into `parts` nonnegative parts.
void compositions(std::size_t parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(parts, total - v, cur, out);
    cur.pop_back();
  }
}

// Products of the representatives of an alphabet cover: the cover behind
// the product bracket of #(A^F, d_F, eps).
PointSet product_cover_codewords(const Alphabet& a, std::size_t k, double eps) {
  const CoverResult ac = alphabet_cover(a, eps);
  const std::size_t r = ac.representatives.size();
  PointSet out(k);
  std::vector<std::size_t> digit(k, 0);
  Configuration x(k);
  while (true) {
    for (std::size_t g = 0; g < k; ++g) x[g] = static_cast<std::uint32_t>(ac.representatives[digit[g]]);
    out.add(x);
    std::size_t g = k;
    while (g > 0 && ++digit[g - 1] == r) digit[--g] = 0;
    if (g == 0) break;
  }
  return out;
}

// Support, quantized support and the d and d̄ cover representatives at
// every eps of the grid.
PointSet union_codebook(const WindowPmf& m, const Alphabet& a, std::span<const double> eps_grid, std::size_t k) {
  std::set<std::uint64_t> idx;
  for (double eps : eps_grid) {
    const PointSet c = build_codebook(m, a, eps,
                                      {cover_codewords(a, k, MetricKind::Average, eps),
                                       cover_codewords(a, k, MetricKind::Max, eps), product_cover_codewords(a, k, eps)});
    for (std::size_t i = 0; i < c.size(); ++i) idx.insert(config_index(c.at(i), a.size()));
  }
  PointSet out(k);
  for (auto i : idx) out.add(config_from_index(i, a.size(), k));
  return out;
}

InequalityCheck le_check(std::string name, double eps, int n, std::string subject, double lhs, double rhs,
                         double slack, bool exact = true) {
  InequalityCheck c;
  c.name = std::move(name);
  c.eps = eps;
  c.n = n;
  c.subject = std::move(subject);
  c.lhs = lhs;
  c.rhs = rhs;
  c.holds = lhs <= rhs + slack;
  c.exact = exact;
  return c;
}

struct Task {
  int n = 0;
  Candidate candidate;
};

struct TaskResult {
  std::vector<MeasureRate> rates;
  std::vector<InequalityCheck> checks;
  std::string truncation;
};

TaskResult run_task(const VpModel& model, const VpOptions& opt, const MdimEstimate& profile, const Task& task) {
  TaskResult out;
  const Alphabet& a = model.alphabet;
  const FiniteSubset f = model.folner(task.n);
  const std::size_t k = f.size();
  const double fk = static_cast<double>(k);
  const std::string subject = task.candidate.name;
  auto has = [&](DistortionKind d) { return std::find(opt.modes.begin(), opt.modes.end(), d) != opt.modes.end(); };

  std::optional<WindowPmf> marginal;
  PointSet codebook(k);
  try {
    marginal = task.candidate.measure->marginal(f);
    codebook = union_codebook(*marginal, a, opt.eps_grid, k);
    if (static_cast<double>(marginal->size()) * static_cast<double>(codebook.size()) > static_cast<double>(opt.budget_cells)) {
      throw BudgetExceeded("instance too large");
    }
  } catch (const std::length_error& e) {
    out.truncation = subject + " at n=" + std::to_string(task.n) + ": " + e.what();
    return out;
  }
  const WindowPmf& m = *marginal;

  auto solve = [&](const DistortionSpec& spec, std::string mode, double eps_label) {
    const RDResult r = rd_window(m, a, spec, codebook, opt.rd, opt.budget_cells);
    MeasureRate mr;
    mr.family = task.candidate.family;
    mr.measure = subject;
    mr.n = task.n;
    mr.window_size = k;
    mr.codebook_size = codebook.size();
    mr.mode = std::move(mode);
    mr.eps = eps_label;
    mr.alpha = spec.kind == DistortionKind::Linf ? spec.alpha : 0.0;
    mr.rate = r.rate;
    mr.rate_per_symbol = r.rate / fk;
    mr.distortion = r.distortion;
    mr.multiplier = r.s;
    mr.gap = r.gap;
    mr.status = rd_status_name(r.status);
    out.rates.push_back(mr);
    return r.rate;
  };

  std::vector<double> sorted = opt.eps_grid;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> l1_rates;
  for (double eps : sorted) {
    const SRow* row = profile.find(eps, task.n);
    const double l1 = solve(DistortionSpec::l1(eps), "L1", eps);
    l1_rates.push_back(l1);
    if (row) {
      out.checks.push_back(le_check("cover_bound_L1", eps, task.n, subject, l1 / fk,
                                    std::log(row->cover_bar.upper) / fk, opt.slack));
    }
    if (has(DistortionKind::Lp)) {
      for (double p : opt.p_values) {
        const double lp = solve(DistortionSpec::lp(eps, p), "Lp" + fmt("%g", p), eps);
        out.checks.push_back(le_check("order_L1_Lp" + fmt("%g", p), eps, task.n, subject, l1, lp, opt.slack));
        if (row) {
          out.checks.push_back(le_check("cover_bound_Lp" + fmt("%g", p), eps, task.n, subject, lp / fk,
                                        std::log(row->cover.upper) / fk, opt.slack));
          out.checks.push_back(le_check("cover_bound_Lp" + fmt("%g", p) + "_dbar", eps, task.n, subject, lp / fk,
                                        std::log(row->cover_bar.upper) / fk, opt.slack, false));
        }
      }
    }
    if (has(DistortionKind::Linf)) {
      for (double alpha : opt.alphas) {
        const double li = solve(DistortionSpec::linf(eps, alpha), "Linf", eps);
        if (row) {
          out.checks.push_back(le_check("cover_bound_Linf" + fmt("(alpha=%g)", alpha), eps, task.n, subject,
                                        li / fk, std::log(row->cover.upper) / fk, opt.slack));
        }
        const double eps2 = eps + alpha * a.diameter() + 1e-6;
        DistortionSpec shifted = DistortionSpec::l1(eps2);
        const double l1s = solve(shifted, "L1shift" + fmt("(alpha=%g)", alpha), eps);
        out.checks.push_back(
            le_check("order_L1shift_Linf" + fmt("(alpha=%g)", alpha), eps, task.n, subject, l1s, li, opt.slack));
      }
    }
  }
  // Same codebook at every eps, so the computed rates are monotone too.
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    out.checks.push_back(
        le_check("rate_monotone_L1", sorted[i], task.n, subject, l1_rates[i + 1], l1_rates[i], opt.slack));
  }
  return out;
}

}  // namespace

void VpOptions::validate() const {
  if (eps_grid.empty()) throw std::invalid_argument("eps grid is empty");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  }
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  for (const auto& f : families) {
    if (std::find(kFamilies.begin(), kFamilies.end(), f) == kFamilies.end()) {
      throw std::invalid_argument("unknown measure family '" + f + "'");
    }
  }
  for (double p : p_values) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  }
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("alpha must be positive");
  }
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!std::isfinite(slack)) throw std::invalid_argument("slack must be finite");
  if (fano_D != 0.0 && !(fano_D > 2.0)) throw std::invalid_argument("fano D must exceed 2");
  if (dirichlet_count < 0) throw std::invalid_argument("dirichlet count must be nonnegative");
}

std::vector<Candidate> candidate_measures(const VpModel& model, const std::string& family, double eps, int n,
                                          std::uint64_t seed, int dirichlet_count, std::size_t max_points) {
  const Alphabet& a = model.alphabet;
  const std::size_t q = a.size();
  std::vector<Candidate> out;
  auto product = [&](std::vector<double> law, const std::string& name) {
    out.push_back({family, name, product_measure(Pmf(std::move(law)), name)});
  };
  auto law_name = [](const std::vector<double>& law) {
    std::string s = "product(";
    for (std::size_t i = 0; i < law.size(); ++i) s += (i ? "," : "") + fmt("%.6g", law[i]);
    return s + ")";
  };

  if (family == "point_mass") {
    std::vector<double> law(q, 0.0);
    law[0] = 1.0;
    product(law, "point_mass(0)");
  } else if (family == "uniform") {
    product(std::vector<double>(q, 1.0 / static_cast<double>(q)), "uniform");
  } else if (family == "simplex_grid") {
    if (q > 3) return out;
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(q, 4, cur, comps);
    for (const auto& c : comps) {
      if (std::count(c.begin(), c.end(), 0) + 1 >= static_cast<std::ptrdiff_t>(q)) continue;  // point masses
      std::vector<double> law(q);
      for (std::size_t i = 0; i < q; ++i) law[i] = c[i] / 4.0;
      product(law, law_name(law));
    }
  } else if (family == "dirichlet") {
    std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ULL);
    for (int i = 0; i < dirichlet_count; ++i) {
      std::vector<double> law(q);
      double total = 0.0;
      for (auto& v : law) {
        // Exponential draws normalized give a flat Dirichlet sample.
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        v = -std::log(u);
        total += v;
      }
      for (auto& v : law) v /= total;
      product(law, "dirichlet#" + std::to_string(i));
    }
  } else if (family == "subgrid") {
    for (std::size_t step : {std::size_t{2}, std::size_t{3}}) {
      if (q < 2 * step) continue;
      std::vector<double> law(q, 0.0);
      std::size_t used = 0;
      for (std::size_t i = 0; i < q; i += step) ++used;
      for (std::size_t i = 0; i < q; i += step) law[i] = 1.0 / static_cast<double>(used);
      product(law, "subgrid(step=" + std::to_string(step) + ")");
    }
  } else if (family == "markov") {
    if (model.group->lattice_rank() != 1) return out;
    const std::size_t w = q * q;
    std::vector<double> t(w);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) t[i * q + j] = 0.5 / static_cast<double>(q) + (i == j ? 0.5 : 0.0);
    }
    out.push_back({family, "markov(sticky=0.5)", markov_measure(Channel(q, q, std::move(t)), "markov(sticky=0.5)")});
  } else if (family == "empirical") {
    if (!model.group->is_lattice()) return out;
    const FiniteSubset f = model.folner(n);
    const std::size_t k = f.size();
    if (config_count(a, k) > static_cast<double>(max_points)) return out;
    const PointSet pts = PointSet::all(q, k);
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(n));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const SeparatedSet sep = separated_set(pts, OrbitMetric(MetricKind::Max, a, k), eps, order);
    std::vector<Configuration> s;
    for (std::size_t i : sep.indices) s.push_back(pts.at(i));
    const std::string name = "empirical(eps=" + fmt("%.6g", eps) + ",n=" + std::to_string(n) + ")";
    try {
      out.push_back({family, name, empirical_measure(SystemModel{model.group, a, f}, std::move(s), name)});
    } catch (const std::invalid_argument&) {
      // F_n is not a box.
    }
  } else {
    throw std::invalid_argument("unknown measure family '" + family + "'");
  }
  return out;
}

VpReport verify_vp(const VpModel& model, const VpOptions& opt) {
  opt.validate();
  VpReport rep;
  const Alphabet& a = model.alphabet;
  rep.profile = s_profile(a, model.folner, opt.eps_grid, opt.n_min, opt.n_max, opt.max_points, opt.jobs);
  const int n_last = rep.profile.truncated ? rep.profile.first_truncated_n - 1 : opt.n_max;
  if (rep.profile.truncated) {
    rep.truncations.push_back("covering numbers: n >= " + std::to_string(rep.profile.first_truncated_n) +
                              " exceeds " + std::to_string(opt.max_points) + " configurations");
  }

  std::vector<Task> tasks;
  for (int n = opt.n_min; n <= n_last; ++n) {
    for (const auto& fam : opt.families) {
      if (fam == "empirical") {
        for (double eps : opt.eps_grid) {
          for (auto& c : candidate_measures(model, fam, eps, n, opt.seed, opt.dirichlet_count, opt.max_points)) {
            tasks.push_back({n, std::move(c)});
          }
        }
      } else {
        for (auto& c : candidate_measures(model, fam, opt.eps_grid.front(), n, opt.seed, opt.dirichlet_count,
                                          opt.max_points)) {
          tasks.push_back({n, std::move(c)});
        }
      }
    }
  }
  std::vector<TaskResult> results =
      parallel_map(tasks.size(), opt.jobs, [&](std::size_t i) { return run_task(model, opt, rep.profile, tasks[i]); });
  for (auto& r : results) {
    rep.rates.insert(rep.rates.end(), r.rates.begin(), r.rates.end());
    rep.checks.insert(rep.checks.end(), r.checks.begin(), r.checks.end());
    if (!r.truncation.empty()) rep.truncations.push_back(r.truncation);
  }

  for (const auto& row : rep.profile.rows) {
    rep.checks.push_back(le_check("Stilde_le_S", row.eps, row.n, "covering", row.Stilde_lower, row.S_upper, 0.0));
    const double log_cover_a = std::log(static_cast<double>(alphabet_cover(a, row.eps).upper));
    for (double delta : opt.deltas) {
      const double big = 2.0 * std::pow(row.eps, 1.0 - delta);
      const CoverBracket b = cover_bracket(a, row.window_size, MetricKind::Max, big, opt.max_points);
      const double fk = static_cast<double>(row.window_size);
      rep.checks.push_back(le_check("tame_growth_comparison" + fmt("(delta=%g)", delta), row.eps, row.n, "covering",
                                    std::log(b.lower) / fk,
                                    std::log(2.0) + std::pow(row.eps, delta) * log_cover_a + row.Stilde_upper, 0.0));
    }
  }
  for (const auto& issue : rep.profile.monotonicity_issues) {
    InequalityCheck c;
    c.name = "covering_monotone";
    c.subject = issue;
    c.holds = false;
    rep.checks.push_back(c);
  }

  if (opt.fano_D > 2.0) {
    const std::vector<std::uint64_t> seeds{opt.seed, opt.seed + 1, opt.seed + 2};
    for (double eps : opt.eps_grid) {
      auto rows = fano_side_sweep(a, model.folner, eps, opt.fano_D, opt.n_min, std::max(n_last, opt.n_min), seeds,
                                  opt.rd, opt.budget_cells, opt.max_points);
      for (const auto& fr : rows) {
        if (fr.status == CheckStatus::NotApplicable) continue;
        InequalityCheck c;
        c.name = "fano_side";
        c.eps = fr.eps;
        c.n = fr.n;
        c.subject = "seed " + std::to_string(fr.seed);
        c.lhs = fr.bound;
        c.rhs = fr.mutual_information;
        c.holds = fr.status == CheckStatus::Holds;
        rep.checks.push_back(c);
      }
      rep.fano.insert(rep.fano.end(), rows.begin(), rows.end());
    }
  }

  const double alpha_min =
      opt.alphas.empty() ? 0.0 : *std::min_element(opt.alphas.begin(), opt.alphas.end());
  for (const auto& srow : rep.profile.rows) {
    VpRow row;
    row.eps = srow.eps;
    row.n = srow.n;
    row.S_lower = srow.S_lower;
    row.S_upper = srow.S_upper;
    row.Stilde_lower = srow.Stilde_lower;
    row.Stilde_upper = srow.Stilde_upper;
    bool found = false;
    for (const auto& r : rep.rates) {
      if (r.n != srow.n || r.eps != srow.eps) continue;
      if (r.mode == "L1" && (!found || r.rate_per_symbol > row.best_rate)) {
        found = true;
        row.best_rate = r.rate_per_symbol;
        row.family = r.family;
        row.measure = r.measure;
      }
      if (r.mode == "Linf" && r.alpha == alpha_min) row.best_rate_linf = std::max(row.best_rate_linf, r.rate_per_symbol);
    }
    row.ratio_rate = ratio(row.best_rate, row.eps);
    row.ratio_S = ratio(row.S_upper, row.eps);
    row.ratio_Stilde = ratio(row.Stilde_upper, row.eps);
    rep.rows.push_back(row);
  }

  std::set<double> distinct(opt.eps_grid.begin(), opt.eps_grid.end());
  if (distinct.size() >= 3 && *distinct.rbegin() < 1.0 && !rep.profile.rows.empty()) {
    rep.has_slopes = true;
    rep.slopes_S = mdim_slopes(rep.profile, MetricKind::Max);
    rep.slopes_Stilde = mdim_slopes(rep.profile, MetricKind::Average);
  }
  for (const auto& c : rep.checks) {
    if (c.exact && !c.holds) ++rep.violations;
  }
  return rep;
}

}  // namespace mdk
