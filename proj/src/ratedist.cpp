#include "mdimkit/ratedist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace mdk {

namespace {

constexpr std::size_t kMaxCoverPoints = 6000;

}  // namespace

void DistortionSpec::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("distortion eps must be positive");
  if (kind == DistortionKind::Lp && !(p >= 1.0)) throw std::invalid_argument("Lp exponent must be >= 1");
  if (kind == DistortionKind::Linf && !(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

std::vector<double> DistortionSpec::cost_table(const Alphabet& a) const {
  std::vector<double> c(a.metric());
  for (double& v : c) {
    switch (kind) {
      case DistortionKind::L1:
        break;
      case DistortionKind::Lp:
        v = std::pow(v, p);
        break;
      case DistortionKind::Linf:
        v = v >= eps ? 1.0 : 0.0;
        break;
    }
  }
  return c;
}

double DistortionSpec::target() const {
  switch (kind) {
    case DistortionKind::L1:
      return eps * (1.0 - kStrictFactor);
    case DistortionKind::Lp:
      return std::pow(eps * (1.0 - kStrictFactor), p);
    case DistortionKind::Linf:
      return alpha * (1.0 - kStrictFactor);
  }
  return eps;
}

std::string DistortionSpec::name() const {
  char buf[64];
  switch (kind) {
    case DistortionKind::L1:
      return "L1";
    case DistortionKind::Lp:
      std::snprintf(buf, sizeof buf, "L%g", p);
      return buf;
    case DistortionKind::Linf:
      return "Linf";
  }
  return "unknown";
}

PointSet build_codebook(const WindowPmf& mu, const Alphabet& a, double eps, const std::vector<PointSet>& extra) {
  const std::size_t k = mu.support.window_size();
  const Partition part = partition_map(a, eps);
  std::set<std::uint64_t> idx;
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    const Configuration x = mu.support.at(i);
    idx.insert(config_index(x, a.size()));
    idx.insert(config_index(part.apply(x), a.size()));
  }
  for (const auto& e : extra) {
    if (e.window_size() != k) throw std::invalid_argument("extra codewords have the wrong window size");
    for (std::size_t i = 0; i < e.size(); ++i) idx.insert(config_index(e.at(i), a.size()));
  }
  PointSet out(k);
  for (auto i : idx) out.add(config_from_index(i, a.size(), k));
  return out;
}

std::vector<double> distortion_matrix(const WindowPmf& mu, const Alphabet& a, const DistortionSpec& spec,
                                      const PointSet& codebook) {
  spec.validate();
  if (codebook.window_size() != mu.support.window_size()) {
    throw std::invalid_argument("codebook window does not match the marginal");
  }
  const std::vector<double> cost = spec.cost_table(a);
  const std::size_t ny = codebook.size();
  std::vector<double> rho(mu.size() * ny);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    average_cost_row(cost, a.size(), mu.support.at(x), codebook, std::span<double>(rho.data() + x * ny, ny));
  }
  return rho;
}

RDResult rd_window(const WindowPmf& mu, const Alphabet& a, const DistortionSpec& spec, const PointSet& codebook,
                   const RDOptions& opt, std::size_t budget_cells) {
  spec.validate();
  if (codebook.size() == 0) throw std::invalid_argument("codebook must be nonempty");
  const double cells = static_cast<double>(mu.size()) * static_cast<double>(codebook.size());
  if (cells > static_cast<double>(budget_cells)) {
    throw BudgetExceeded("rate-distortion instance has " + std::to_string(mu.size()) + " x " +
                         std::to_string(codebook.size()) + " cells, budget " + std::to_string(budget_cells));
  }
  const std::vector<double> rho = distortion_matrix(mu, a, spec, codebook);
  RDResult r = solve_rd(mu.prob, rho, codebook.size(), spec.target(), opt);
  r.eps = spec.eps;
  return r;
}

RDResult rd_window_linf(const WindowPmf& mu, const Alphabet& a, double eps, double alpha, const PointSet& codebook,
                        const RDOptions& opt, std::size_t budget_cells) {
  return rd_window(mu, a, DistortionSpec::linf(eps, alpha), codebook, opt, budget_cells);
}

PointSet cover_codewords(const Alphabet& a, std::size_t window_size, MetricKind kind, double eps) {
  const double n = std::pow(static_cast<double>(a.size()), static_cast<double>(window_size));
  if (n > static_cast<double>(kMaxCoverPoints)) {
    throw BudgetExceeded("cover of " + std::to_string(static_cast<long long>(n)) + " configurations exceeds " +
                         std::to_string(kMaxCoverPoints));
  }
  const PointSet all = PointSet::all(a.size(), window_size);
  const CoverResult c = covering_number(all, OrbitMetric(kind, a, window_size), eps);
  PointSet reps(window_size);
  for (std::size_t i : c.representatives) reps.add(all.at(i));
  return reps;
}

NormalizedProfile rd_normalized(const InvariantMeasure& mu, const Alphabet& a, const DistortionSpec& spec,
                                const FolnerSequence& folner, int n_min, int n_max, const RDOptions& opt,
                                std::size_t budget_cells) {
  spec.validate();
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad n range");
  NormalizedProfile prof;
  const MetricKind kind = spec.kind == DistortionKind::L1 ? MetricKind::Average : MetricKind::Max;
  for (int n = n_min; n <= n_max; ++n) {
    const FiniteSubset f = folner(n);
    try {
      const WindowPmf m = mu.marginal(f);
      const PointSet codebook = build_codebook(m, a, spec.eps, {cover_codewords(a, f.size(), kind, spec.eps)});
      NormalizedRate row;
      row.n = n;
      row.window_size = f.size();
      row.codebook_size = codebook.size();
      row.result = rd_window(m, a, spec, codebook, opt, budget_cells);
      row.rate_per_symbol = row.result.rate / static_cast<double>(f.size());
      prof.rows.push_back(std::move(row));
    } catch (const std::length_error&) {
      prof.truncated = true;
      prof.first_truncated_n = n;
      break;
    }
  }
  if (!prof.rows.empty()) {
    auto [lo, hi] = std::minmax_element(prof.rows.begin(), prof.rows.end(), [](const auto& x, const auto& y) {
      return x.rate_per_symbol < y.rate_per_symbol;
    });
    prof.tail_spread = hi->rate_per_symbol - lo->rate_per_symbol;
  }
  return prof;
}

std::vector<RDResult> linf_alpha_path(const WindowPmf& mu, const Alphabet& a, double eps,
                                      const std::vector<double>& alphas, const PointSet& codebook,
                                      const RDOptions& opt, std::size_t budget_cells) {
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] < alphas[i - 1])) throw std::invalid_argument("alpha grid must be strictly decreasing");
  }
  std::vector<RDResult> out;
  for (double alpha : alphas) out.push_back(rd_window_linf(mu, a, eps, alpha, codebook, opt, budget_cells));
  return out;
}

}  // namespace mdk
