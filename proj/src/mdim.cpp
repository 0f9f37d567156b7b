#include "mdimkit/mdim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "mdimkit/measures.hpp"
#include "mdimkit/parallel.hpp"
#include "mdimkit/ratedist.hpp"

namespace mdk {

namespace {

double config_count(const Alphabet& a, std::size_t k) {
  return std::pow(static_cast<double>(a.size()), static_cast<double>(k));
}

void check_grid(std::span<const double> eps_grid) {
  if (eps_grid.empty()) throw std::invalid_argument("eps grid is empty");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("eps values must be positive");
  }
}

}  // namespace

CoverBracket cover_bracket(const Alphabet& a, std::size_t window_size, MetricKind kind, double eps,
                           std::size_t max_points) {
  if (window_size == 0) throw std::invalid_argument("window must be nonempty");
  CoverBracket b;
  const bool enumerable = config_count(a, window_size) <= static_cast<double>(max_points);
  if (!enumerable && kind == MetricKind::Average) {
    throw std::length_error("A^F has more than " + std::to_string(max_points) + " configurations");
  }
  b.lower = 1.0;
  b.upper = std::numeric_limits<double>::infinity();
  if (enumerable) {
    const PointSet pts = PointSet::all(a.size(), window_size);
    const CoverResult c = covering_number(pts, OrbitMetric(kind, a, window_size), eps);
    b.lower = static_cast<double>(c.lower);
    b.upper = static_cast<double>(c.upper);
    b.exact = c.exact;
    b.enumerated = true;
  }
  if (kind == MetricKind::Max) {
    // Products of alphabet cells have d_F-diameter < eps, and products of
    // eps-separated sets of symbols are eps-separated under d_F.
    const CoverResult ac = alphabet_cover(a, eps);
    const double k = static_cast<double>(window_size);
    b.lower = std::max(b.lower, std::pow(static_cast<double>(ac.lower), k));
    b.upper = std::min(b.upper, std::pow(static_cast<double>(ac.upper), k));
  }
  b.exact = b.exact || b.lower == b.upper;
  return b;
}

const SRow* MdimEstimate::find(double eps, int n) const {
  for (const auto& r : rows) {
    if (r.eps == eps && r.n == n) return &r;
  }
  return nullptr;
}

const SRow* MdimEstimate::last(double eps) const {
  const SRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.eps == eps && (!best || r.n > best->n)) best = &r;
  }
  return best;
}

MdimEstimate s_profile(const Alphabet& a, const FolnerSequence& folner, std::span<const double> eps_grid,
                       int n_min, int n_max, std::size_t max_points, int jobs) {
  check_grid(eps_grid);
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  MdimEstimate est;
  est.eps_grid.assign(eps_grid.begin(), eps_grid.end());

  struct PerN {
    bool truncated = false;
    std::vector<SRow> rows;  // in eps-grid order
  };
  const auto count = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<PerN> per_n = parallel_map(count, jobs, [&](std::size_t i) {
    PerN out;
    const int n = n_min + static_cast<int>(i);
    const std::size_t k = folner(n).size();
    if (config_count(a, k) > static_cast<double>(max_points)) {
      out.truncated = true;
      return out;
    }
    const double fk = static_cast<double>(k);
    for (double eps : eps_grid) {
      SRow r;
      r.eps = eps;
      r.n = n;
      r.window_size = k;
      r.cover = cover_bracket(a, k, MetricKind::Max, eps, max_points);
      r.cover_bar = cover_bracket(a, k, MetricKind::Average, eps, max_points);
      // d̄_F <= d_F: a d-cover is a d̄-cover and a d̄-separated set is
      // d-separated.
      r.cover_bar.upper = std::min(r.cover_bar.upper, r.cover.upper);
      r.cover.lower = std::max(r.cover.lower, r.cover_bar.lower);
      r.cover.exact = r.cover.exact || r.cover.lower == r.cover.upper;
      r.cover_bar.exact = r.cover_bar.exact || r.cover_bar.lower == r.cover_bar.upper;
      r.S_lower = std::log(r.cover.lower) / fk;
      r.S_upper = std::log(r.cover.upper) / fk;
      r.Stilde_lower = std::log(r.cover_bar.lower) / fk;
      r.Stilde_upper = std::log(r.cover_bar.upper) / fk;
      out.rows.push_back(r);
    }
    return out;
  });

  std::size_t computed = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (per_n[i].truncated) {
      est.truncated = true;
      est.first_truncated_n = n_min + static_cast<int>(i);
      computed = i;
      break;
    }
  }
  for (std::size_t e = 0; e < eps_grid.size(); ++e) {
    for (std::size_t i = 0; i < computed; ++i) est.rows.push_back(per_n[i].rows[e]);
  }

  char buf[200];
  for (std::size_t i = 0; i < computed; ++i) {
    const auto& rows = per_n[i].rows;
    for (std::size_t u = 0; u < rows.size(); ++u) {
      for (std::size_t v = 0; v < rows.size(); ++v) {
        if (!(rows[u].eps < rows[v].eps)) continue;
        if (rows[u].S_upper < rows[v].S_lower) {
          std::snprintf(buf, sizeof buf, "S at n=%d: eps %.12g has upper %.12g below lower %.12g at eps %.12g",
                        rows[u].n, rows[u].eps, rows[u].S_upper, rows[v].S_lower, rows[v].eps);
          est.monotonicity_issues.emplace_back(buf);
        }
        if (rows[u].Stilde_upper < rows[v].Stilde_lower) {
          std::snprintf(buf, sizeof buf, "Stilde at n=%d: eps %.12g has upper %.12g below lower %.12g at eps %.12g",
                        rows[u].n, rows[u].eps, rows[u].Stilde_upper, rows[v].Stilde_lower, rows[v].eps);
          est.monotonicity_issues.emplace_back(buf);
        }
      }
    }
  }
  return est;
}

MdimSlopes mdim_slopes(const MdimEstimate& est, MetricKind kind) {
  std::vector<double> eps = est.eps_grid;
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 3) throw std::invalid_argument("mdim slopes need at least 3 eps values");
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("mdim slopes need eps in (0, 1)");
  }
  std::vector<double> xs, lo, hi;
  for (double e : eps) {
    const SRow* r = est.last(e);
    if (!r) throw std::invalid_argument("estimate has no row for some eps");
    xs.push_back(-std::log(e));
    lo.push_back(kind == MetricKind::Max ? r->S_lower : r->Stilde_lower);
    hi.push_back(kind == MetricKind::Max ? r->S_upper : r->Stilde_upper);
  }
  MdimSlopes s;
  const std::size_t tail = (eps.size() + 1) / 2;
  s.upper = -std::numeric_limits<double>::infinity();
  s.lower = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tail; ++i) {
    s.tail_eps.push_back(eps[i]);
    s.upper = std::max(s.upper, hi[i] / xs[i]);
    s.lower = std::min(s.lower, lo[i] / xs[i]);
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = 0.5 * (lo[i] + hi[i]);
    sx += xs[i];
    sy += y;
    sxx += xs[i] * xs[i];
    sxy += xs[i] * y;
  }
  s.ls_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return s;
}

std::vector<FanoSideRow> fano_side_sweep(const Alphabet& a, const FolnerSequence& folner, double eps, double D,
                                         int n_min, int n_max, std::span<const std::uint64_t> seeds,
                                         const RDOptions& opt, std::size_t budget_cells, std::size_t max_points) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(D > 2.0)) throw std::invalid_argument("D must exceed 2");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  const Partition part = partition_map(a, eps);
  RDOptions ropt = opt;
  ropt.keep_channel = true;
  std::vector<FanoSideRow> out;
  for (int n = n_min; n <= n_max; ++n) {
    const std::size_t k = folner(n).size();
    for (std::uint64_t seed : seeds) {
      FanoSideRow row;
      row.eps = eps;
      row.n = n;
      row.seed = seed;
      row.bound = fano_bound(4.0 * eps, D, 1);
      if (config_count(a, k) > static_cast<double>(max_points)) {
        row.reason = "window too large to enumerate";
        out.push_back(row);
        continue;
      }
      const PointSet pts = PointSet::all(a.size(), k);
      const OrbitMetric dbar(MetricKind::Average, a, k);
      std::vector<std::size_t> order(pts.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(n));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
      const SeparatedSet sep = separated_set(pts, dbar, (8.0 * D + 2.0) * eps, order);

      PointSet ps(k);
      std::set<std::uint64_t> seen;
      for (std::size_t i : sep.indices) {
        const Configuration q = part.apply(pts.at(i));
        seen.insert(config_index(q, a.size()));
        ps.add(q);
      }
      row.set_size = ps.size();
      row.bound = fano_bound(4.0 * eps, D, ps.size());
      if (seen.size() != ps.size()) {
        row.reason = "quantizer merged points of S_n";
        out.push_back(row);
        continue;
      }
      const bool full = static_cast<double>(ps.size()) * static_cast<double>(pts.size()) <=
                        static_cast<double>(budget_cells);
      const PointSet& ys = full ? pts : ps;
      row.codebook_size = ys.size();

      std::vector<double> rho(ps.size() * ys.size());
      for (std::size_t x = 0; x < ps.size(); ++x) {
        dbar.row(ps.at(x), ys, std::span<double>(rho.data() + x * ys.size(), ys.size()));
      }
      const std::vector<double> p(ps.size(), 1.0 / static_cast<double>(ps.size()));
      const RDResult r = solve_rd(p, rho, ys.size(), 4.0 * eps * (1.0 - kStrictFactor), ropt);
      std::vector<double> joint(r.channel.size());
      for (std::size_t x = 0; x < ps.size(); ++x) {
        for (std::size_t y = 0; y < ys.size(); ++y) joint[x * ys.size() + y] = p[x] * r.channel[x * ys.size() + y];
      }
      const EmpiricalFano f =
          empirical_fano_check(ps, ys, dbar, JointPmf(ps.size(), ys.size(), std::move(joint)), 4.0 * eps, D);
      row.separation = f.separation;
      row.distortion = f.distortion;
      row.mutual_information = f.mutual_information;
      row.status = f.status;
      row.reason = f.reason;
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace mdk
