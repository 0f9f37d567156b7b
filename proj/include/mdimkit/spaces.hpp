#pragma once

// Finite metric models of a G-shift: a finite alphabet with a metric, the
// orbit metrics d_F (max) and d̄_F (average) on configurations over a window,
// separated sets, and covering numbers by sets of diameter < eps.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdimkit/groups.hpp"

namespace mdk {

class Alphabet {
 public:
  // `metric` is row-major size x size. Throws std::invalid_argument when it
  // is not a metric (checked exhaustively).
  Alphabet(std::vector<std::string> labels, std::vector<double> metric);

  std::size_t size() const { return labels_.size(); }
  double d(std::size_t a, std::size_t b) const { return metric_[a * size() + b]; }
  const std::vector<double>& metric() const { return metric_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double diameter() const { return diameter_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> metric_;
  double diameter_ = 0.0;
};

// Problems found when checking a square matrix for the metric axioms.
std::vector<std::string> metric_violations(std::span<const double> matrix, std::size_t n);

// {0, 1} with the discrete metric.
Alphabet hamming_alphabet(std::size_t k);
// A_m = {0, 1/m, ..., 1} with |x - y|; the finite model of [0, 1].
Alphabet grid_alphabet(std::size_t m);

using Configuration = std::vector<std::uint32_t>;

// Configurations over a window of fixed size, stored by coordinate so the
// kernels can stream one coordinate of every point at a time.
class PointSet {
 public:
  explicit PointSet(std::size_t window_size);

  // All |A|^|F| configurations; position 0 is the most significant digit.
  static PointSet all(std::size_t alphabet_size, std::size_t window_size);

  void add(const Configuration& x);
  std::size_t size() const { return count_; }
  std::size_t window_size() const { return columns_.size(); }
  Configuration at(std::size_t i) const;
  std::span<const std::uint32_t> column(std::size_t pos) const { return columns_[pos]; }

 private:
  std::vector<std::vector<std::uint32_t>> columns_;
  std::size_t count_ = 0;
};

// Mixed-radix index of a configuration in PointSet::all ordering.
std::uint64_t config_index(const Configuration& x, std::size_t alphabet_size);
Configuration config_from_index(std::uint64_t idx, std::size_t alphabet_size, std::size_t window_size);

enum class MetricKind { Max, Average };

std::string metric_kind_name(MetricKind k);

// d_F(x, y) = max_g d(x_g, y_g) or d̄_F(x, y) = (1/|F|) sum_g d(x_g, y_g).
class OrbitMetric {
 public:
  OrbitMetric(MetricKind kind, const Alphabet& alphabet, std::size_t window_size);

  MetricKind kind() const { return kind_; }
  std::size_t window_size() const { return window_size_; }

  // Throws std::invalid_argument when a configuration has the wrong length.
  double operator()(const Configuration& x, const Configuration& y) const;

  // out[j] = dist(x, points[j]).
  void row(const Configuration& x, const PointSet& points, std::span<double> out) const;

 private:
  MetricKind kind_;
  std::size_t alphabet_size_;
  std::vector<double> metric_;
  std::size_t window_size_;
};

// out[j] = (1/|F|) sum_g cost(x_g, points[j]_g) for a per-coordinate cost
// table (alphabet_size x alphabet_size).
void average_cost_row(std::span<const double> cost, std::size_t alphabet_size, const Configuration& x,
                      const PointSet& points, std::span<double> out);

struct SeparatedSet {
  std::vector<std::size_t> indices;  // into the point set, in selection order
  bool maximal = false;              // certificate re-checked independently
};

// Greedy first-fit eps-separated subset (pairwise distance >= eps) following
// `order` (default: point order).
SeparatedSet separated_set(const PointSet& points, const OrbitMetric& m, double eps,
                           std::span<const std::size_t> order = {});

// Maximum eps-separated subset by exhaustive search; at most 20 points.
std::vector<std::size_t> max_separated_exact(const PointSet& points, const OrbitMetric& m, double eps);

struct CoverResult {
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool exact = false;
  // A cover attaining `upper`: one representative per cell and the cell of
  // every point. Cells have diameter < eps and every point lies within eps
  // of its cell's representative.
  std::vector<std::size_t> representatives;
  std::vector<std::size_t> assignment;
};

// Bracket for the minimal number of sets of diameter < eps covering the
// points. Lower: greedy separated set. Upper: best of a greedy ball cover
// (radius < eps/2) and a greedy clique cover. Exact for <= 20 points.
CoverResult covering_number(const PointSet& points, const OrbitMetric& m, double eps);

// Minimal cover by sets of diameter < eps, by branch and bound over maximal
// cliques of the closeness graph; at most 20 points.
CoverResult min_cover_exact(const PointSet& points, const OrbitMetric& m, double eps);

// Covering number of the alphabet itself: exact when |A| <= 20.
CoverResult alphabet_cover(const Alphabet& a, double eps);

struct TameGrowthRow {
  double eps;
  double delta;
  double cover;  // #(A, d, eps) (upper bracket)
  double value;  // eps^delta * log cover
};

// eps^delta log #(X, d, eps) for every (eps, delta). eps_grid must be
// strictly decreasing.
std::vector<TameGrowthRow> tame_growth_profile(const Alphabet& a, std::span<const double> eps_grid,
                                               std::span<const double> delta_grid);

// A finite-alphabet G-shift restricted to a window. The action is the right
// shift (g·x)_h = x_{hg}, extended periodically over a box window in Z^d.
struct SystemModel {
  GroupPtr group;
  Alphabet alphabet;
  FiniteSubset window;

  Configuration shift(const Configuration& x, const Element& g) const;
};

}  // namespace mdk
