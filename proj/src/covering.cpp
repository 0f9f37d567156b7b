#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>

#include "mdimkit/spaces.hpp"

namespace mdk {

namespace {

constexpr std::size_t kExactLimit = 20;

// Adjacency bitsets: edge i-j iff i != j and dist(i, j) < threshold.
class Graph {
 public:
  Graph(const PointSet& points, const OrbitMetric& m, double threshold)
      : n_(points.size()), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {
    std::vector<double> row(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      m.row(points.at(i), points, row);
      std::uint64_t* r = bits_.data() + i * words_;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i && row[j] < threshold) r[j / 64] |= std::uint64_t{1} << (j % 64);
      }
    }
  }

  std::size_t size() const { return n_; }
  std::size_t words() const { return words_; }
  const std::uint64_t* row(std::size_t i) const { return bits_.data() + i * words_; }
  bool edge(std::size_t i, std::size_t j) const { return (row(i)[j / 64] >> (j % 64)) & 1U; }

  // 32-bit neighbourhood masks for small graphs.
  std::vector<std::uint32_t> small_masks() const {
    std::vector<std::uint32_t> out(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) out[i] = static_cast<std::uint32_t>(row(i)[0]);
    return out;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

void check_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
}

std::vector<std::size_t> greedy_separated(const Graph& close) {
  std::vector<std::size_t> kept;
  std::vector<std::uint64_t> blocked(close.words(), 0);
  for (std::size_t i = 0; i < close.size(); ++i) {
    if ((blocked[i / 64] >> (i % 64)) & 1U) continue;
    kept.push_back(i);
    const std::uint64_t* r = close.row(i);
    for (std::size_t w = 0; w < close.words(); ++w) blocked[w] |= r[w];
  }
  return kept;
}

// Greedy set cover by balls of radius < eps/2.
CoverResult ball_cover(const Graph& half) {
  const std::size_t n = half.size();
  CoverResult c;
  c.assignment.assign(n, n);
  std::vector<std::uint64_t> uncovered(half.words(), 0);
  for (std::size_t i = 0; i < n; ++i) uncovered[i / 64] |= std::uint64_t{1} << (i % 64);

  auto gain = [&](std::size_t p) {
    std::size_t g = (uncovered[p / 64] >> (p % 64)) & 1U;
    const std::uint64_t* r = half.row(p);
    for (std::size_t w = 0; w < half.words(); ++w) g += static_cast<std::size_t>(std::popcount(r[w] & uncovered[w]));
    return g;
  };

  // Lazy greedy: gains only shrink, so a stale heap top that is still the
  // best after recomputation is the true maximum. Ties go to the lower index.
  using Entry = std::pair<std::size_t, std::size_t>;  // (gain, n - 1 - index)
  std::priority_queue<Entry> heap;
  for (std::size_t p = 0; p < n; ++p) heap.emplace(gain(p), n - 1 - p);
  std::size_t left = n;
  while (left > 0) {
    auto [g, key] = heap.top();
    heap.pop();
    const std::size_t p = n - 1 - key;
    const std::size_t fresh = gain(p);
    if (fresh != g) {
      heap.emplace(fresh, key);
      continue;
    }
    const std::size_t cell = c.representatives.size();
    c.representatives.push_back(p);
    for (std::size_t q = 0; q < n; ++q) {
      const bool in_ball = q == p || half.edge(p, q);
      if (in_ball && ((uncovered[q / 64] >> (q % 64)) & 1U)) {
        uncovered[q / 64] &= ~(std::uint64_t{1} << (q % 64));
        c.assignment[q] = cell;
        --left;
      }
    }
  }
  c.upper = c.representatives.size();
  return c;
}

// Greedy partition into cliques of the closeness graph. Each clique is
// seeded by the first uncovered point and grown through uncovered points.
CoverResult clique_cover(const Graph& close) {
  const std::size_t n = close.size();
  CoverResult c;
  c.assignment.assign(n, n);
  std::vector<std::uint64_t> cand(close.words());
  for (std::size_t v = 0; v < n; ++v) {
    if (c.assignment[v] != n) continue;
    const std::size_t cell = c.representatives.size();
    c.representatives.push_back(v);
    c.assignment[v] = cell;
    const std::uint64_t* r = close.row(v);
    for (std::size_t w = 0; w < close.words(); ++w) cand[w] = r[w];
    for (std::size_t u = v + 1; u < n; ++u) {
      if (!((cand[u / 64] >> (u % 64)) & 1U) || c.assignment[u] != n) continue;
      c.assignment[u] = cell;
      const std::uint64_t* ru = close.row(u);
      for (std::size_t w = 0; w < close.words(); ++w) cand[w] &= ru[w];
    }
  }
  c.upper = c.representatives.size();
  return c;
}

// Branch and bound for a minimum clique partition on <= 20 vertices.
class ExactCover {
 public:
  explicit ExactCover(std::vector<std::uint32_t> adj) : adj_(std::move(adj)), n_(adj_.size()) {}

  std::vector<std::uint32_t> solve(std::vector<std::uint32_t> initial) {
    best_ = std::move(initial);
    std::vector<std::uint32_t> cur;
    const std::uint32_t all = n_ == 32 ? ~0U : ((1U << n_) - 1U);
    search(all, cur);
    return best_;
  }

 private:
  // Pairwise non-adjacent vertices need distinct cliques.
  std::size_t lower_bound(std::uint32_t rem) const {
    std::size_t k = 0;
    while (rem) {
      const int v = std::countr_zero(rem);
      rem &= ~(1U << v);
      rem &= ~adj_[static_cast<std::size_t>(v)];
      ++k;
    }
    return k;
  }

  void maximal_cliques(std::uint32_t r, std::uint32_t p, std::uint32_t x, std::vector<std::uint32_t>& out) const {
    if (!p && !x) {
      out.push_back(r);
      return;
    }
    const std::uint32_t px = p | x;
    const int pivot = std::countr_zero(px);
    std::uint32_t todo = p & ~adj_[static_cast<std::size_t>(pivot)];
    while (todo) {
      const int v = std::countr_zero(todo);
      todo &= ~(1U << v);
      const std::uint32_t nv = adj_[static_cast<std::size_t>(v)];
      maximal_cliques(r | (1U << v), p & nv, x & nv, out);
      p &= ~(1U << v);
      x |= 1U << v;
    }
  }

  void search(std::uint32_t rem, std::vector<std::uint32_t>& cur) {
    if (!rem) {
      if (cur.size() < best_.size()) best_ = cur;
      return;
    }
    if (cur.size() + lower_bound(rem) >= best_.size()) return;
    const int v = std::countr_zero(rem);
    std::vector<std::uint32_t> cliques;
    maximal_cliques(1U << v, rem & adj_[static_cast<std::size_t>(v)], 0, cliques);
    // Larger cliques first tends to find good solutions early.
    std::stable_sort(cliques.begin(), cliques.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) > std::popcount(b); });
    for (std::uint32_t q : cliques) {
      cur.push_back(q);
      search(rem & ~q, cur);
      cur.pop_back();
    }
  }

  std::vector<std::uint32_t> adj_;
  std::size_t n_;
  std::vector<std::uint32_t> best_;
};

void require_small(const PointSet& points) {
  if (points.size() == 0) throw std::invalid_argument("point set is empty");
  if (points.size() > kExactLimit) {
    throw std::length_error("exhaustive search is limited to " + std::to_string(kExactLimit) + " points");
  }
}

CoverResult exact_from_graph(const Graph& close, const CoverResult& seed) {
  const std::size_t n = close.size();
  std::vector<std::uint32_t> initial(seed.upper, 0);
  for (std::size_t i = 0; i < n; ++i) initial[seed.assignment[i]] |= 1U << i;
  ExactCover solver(close.small_masks());
  const auto cells = solver.solve(std::move(initial));

  CoverResult c;
  c.assignment.assign(n, n);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    c.representatives.push_back(static_cast<std::size_t>(std::countr_zero(cells[k])));
    for (std::size_t i = 0; i < n; ++i) {
      if ((cells[k] >> i) & 1U) c.assignment[i] = k;
    }
  }
  c.lower = c.upper = cells.size();
  c.exact = true;
  return c;
}

}  // namespace

SeparatedSet separated_set(const PointSet& points, const OrbitMetric& m, double eps,
                           std::span<const std::size_t> order) {
  check_eps(eps);
  const std::size_t n = points.size();
  std::vector<std::size_t> seq(order.begin(), order.end());
  if (seq.empty()) {
    seq.resize(n);
    for (std::size_t i = 0; i < n; ++i) seq[i] = i;
  }
  if (seq.size() != n) throw std::invalid_argument("order must be a permutation of the points");
  {
    std::vector<char> seen(n, 0);
    for (std::size_t i : seq) {
      if (i >= n || seen[i]) throw std::invalid_argument("order must be a permutation of the points");
      seen[i] = 1;
    }
  }

  SeparatedSet s;
  std::vector<char> blocked(n, 0);
  std::vector<double> row(n);
  for (std::size_t i : seq) {
    if (blocked[i]) continue;
    s.indices.push_back(i);
    m.row(points.at(i), points, row);
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] < eps) blocked[j] = 1;
    }
  }

  // Certificate, recomputed with the scalar metric: kept points are pairwise
  // >= eps apart and every other point is within eps of a kept one.
  std::vector<Configuration> kept;
  for (std::size_t i : s.indices) kept.push_back(points.at(i));
  bool ok = true;
  for (std::size_t a = 0; a < kept.size() && ok; ++a) {
    for (std::size_t b = a + 1; b < kept.size() && ok; ++b) ok = m(kept[a], kept[b]) >= eps;
  }
  std::vector<char> is_kept(n, 0);
  for (std::size_t i : s.indices) is_kept[i] = 1;
  for (std::size_t j = 0; j < n && ok; ++j) {
    if (is_kept[j]) continue;
    const Configuration y = points.at(j);
    ok = std::any_of(kept.begin(), kept.end(), [&](const Configuration& x) { return m(x, y) < eps; });
  }
  s.maximal = ok;
  return s;
}

std::vector<std::size_t> max_separated_exact(const PointSet& points, const OrbitMetric& m, double eps) {
  check_eps(eps);
  require_small(points);
  const Graph close(points, m, eps);
  const auto adj = close.small_masks();
  const std::uint32_t limit = 1U << points.size();
  // independent[mask] built from mask without its lowest bit.
  std::vector<char> independent(limit, 0);
  independent[0] = 1;
  std::uint32_t best = 0;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    independent[mask] = independent[rest] && !(adj[static_cast<std::size_t>(low)] & rest);
    if (independent[mask] && std::popcount(mask) > std::popcount(best)) best = mask;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((best >> i) & 1U) out.push_back(i);
  }
  return out;
}

CoverResult covering_number(const PointSet& points, const OrbitMetric& m, double eps) {
  check_eps(eps);
  if (points.size() == 0) throw std::invalid_argument("point set is empty");
  const Graph close(points, m, eps);
  const std::size_t lower = greedy_separated(close).size();

  CoverResult best = clique_cover(close);
  if (best.upper > lower) {
    CoverResult balls = ball_cover(Graph(points, m, eps / 2.0));
    if (balls.upper < best.upper) best = std::move(balls);
  }
  if (best.upper > lower && points.size() <= kExactLimit) return exact_from_graph(close, best);

  best.lower = lower;
  best.exact = best.lower == best.upper;
  return best;
}

CoverResult min_cover_exact(const PointSet& points, const OrbitMetric& m, double eps) {
  check_eps(eps);
  require_small(points);
  const Graph close(points, m, eps);
  return exact_from_graph(close, clique_cover(close));
}

CoverResult alphabet_cover(const Alphabet& a, double eps) {
  const PointSet pts = PointSet::all(a.size(), 1);
  return covering_number(pts, OrbitMetric(MetricKind::Max, a, 1), eps);
}

std::vector<TameGrowthRow> tame_growth_profile(const Alphabet& a, std::span<const double> eps_grid,
                                               std::span<const double> delta_grid) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    check_eps(eps_grid[i]);
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1])) throw std::invalid_argument("eps grid must be strictly decreasing");
  }
  for (double d : delta_grid) {
    if (!(d > 0.0)) throw std::invalid_argument("delta must be positive");
  }
  std::vector<TameGrowthRow> rows;
  for (double eps : eps_grid) {
    const auto cover = static_cast<double>(alphabet_cover(a, eps).upper);
    for (double delta : delta_grid) rows.push_back({eps, delta, cover, std::pow(eps, delta) * std::log(cover)});
  }
  return rows;
}

}  // namespace mdk
