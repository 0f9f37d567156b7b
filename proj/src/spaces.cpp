#include "mdimkit/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mdimkit/kernels.hpp"

namespace mdk {

namespace {

constexpr double kMetricTol = 1e-12;

std::string fmt_pair(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

std::vector<std::string> metric_violations(std::span<const double> m, std::size_t n) {
  std::vector<std::string> out;
  if (m.size() != n * n) {
    out.push_back("matrix has " + std::to_string(m.size()) + " entries, expected " + std::to_string(n * n));
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m[i * n + j];
      if (!std::isfinite(v) || v < 0.0) out.push_back("entry " + fmt_pair(i, j) + " is negative or not finite");
      if (i == j && v != 0.0) out.push_back("diagonal entry " + fmt_pair(i, j) + " is nonzero");
      if (i != j && v == 0.0) out.push_back("distinct points " + fmt_pair(i, j) + " at distance 0");
      if (std::abs(v - m[j * n + i]) > kMetricTol) out.push_back("asymmetric at " + fmt_pair(i, j));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (m[i * n + k] > m[i * n + j] + m[j * n + k] + kMetricTol) {
          out.push_back("triangle inequality fails for " + std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k));
        }
      }
    }
  }
  return out;
}

Alphabet::Alphabet(std::vector<std::string> labels, std::vector<double> metric)
    : labels_(std::move(labels)), metric_(std::move(metric)) {
  if (labels_.empty()) throw std::invalid_argument("alphabet must be nonempty");
  const auto bad = metric_violations(metric_, labels_.size());
  if (!bad.empty()) throw std::invalid_argument("not a metric: " + bad.front());
  diameter_ = *std::max_element(metric_.begin(), metric_.end());
}

Alphabet hamming_alphabet(std::size_t k) {
  if (k == 0) throw std::invalid_argument("alphabet must be nonempty");
  std::vector<std::string> labels;
  std::vector<double> m(k * k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back(std::to_string(i));
    m[i * k + i] = 0.0;
  }
  return Alphabet(std::move(labels), std::move(m));
}

Alphabet grid_alphabet(std::size_t m) {
  if (m == 0) throw std::invalid_argument("grid alphabet needs m >= 1");
  const std::size_t k = m + 1;
  std::vector<std::string> labels;
  std::vector<double> d(k * k);
  char buf[32];
  for (std::size_t i = 0; i < k; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", static_cast<double>(i) / static_cast<double>(m));
    labels.emplace_back(buf);
    for (std::size_t j = 0; j < k; ++j) {
      const double diff = static_cast<double>(i > j ? i - j : j - i);
      d[i * k + j] = diff / static_cast<double>(m);
    }
  }
  return Alphabet(std::move(labels), std::move(d));
}

PointSet::PointSet(std::size_t window_size) : columns_(window_size) {
  if (window_size == 0) throw std::invalid_argument("window must be nonempty");
}

PointSet PointSet::all(std::size_t alphabet_size, std::size_t window_size) {
  PointSet p(window_size);
  double total = 1.0;
  for (std::size_t i = 0; i < window_size; ++i) total *= static_cast<double>(alphabet_size);
  if (total > 1e8) throw std::length_error("configuration space too large to enumerate");
  const auto n = static_cast<std::uint64_t>(total);
  for (auto& c : p.columns_) c.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) p.add(config_from_index(i, alphabet_size, window_size));
  return p;
}

void PointSet::add(const Configuration& x) {
  if (x.size() != columns_.size()) throw std::invalid_argument("configuration does not match the window size");
  for (std::size_t g = 0; g < x.size(); ++g) columns_[g].push_back(x[g]);
  ++count_;
}

Configuration PointSet::at(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("point index out of range");
  Configuration x(columns_.size());
  for (std::size_t g = 0; g < x.size(); ++g) x[g] = columns_[g][i];
  return x;
}

std::uint64_t config_index(const Configuration& x, std::size_t alphabet_size) {
  std::uint64_t idx = 0;
  for (auto s : x) {
    if (s >= alphabet_size) throw std::out_of_range("symbol outside the alphabet");
    idx = idx * alphabet_size + s;
  }
  return idx;
}

Configuration config_from_index(std::uint64_t idx, std::size_t alphabet_size, std::size_t window_size) {
  Configuration x(window_size);
  for (std::size_t g = window_size; g > 0; --g) {
    x[g - 1] = static_cast<std::uint32_t>(idx % alphabet_size);
    idx /= alphabet_size;
  }
  return x;
}

std::string metric_kind_name(MetricKind k) { return k == MetricKind::Max ? "max" : "average"; }

OrbitMetric::OrbitMetric(MetricKind kind, const Alphabet& alphabet, std::size_t window_size)
    : kind_(kind), alphabet_size_(alphabet.size()), metric_(alphabet.metric()), window_size_(window_size) {
  if (window_size == 0) throw std::invalid_argument("window must be nonempty");
}

double OrbitMetric::operator()(const Configuration& x, const Configuration& y) const {
  if (x.size() != window_size_ || y.size() != window_size_) {
    throw std::invalid_argument("configuration does not match the metric window");
  }
  double acc = 0.0;
  for (std::size_t g = 0; g < window_size_; ++g) {
    const double v = metric_[x[g] * alphabet_size_ + y[g]];
    acc = kind_ == MetricKind::Max ? std::max(acc, v) : acc + v;
  }
  return kind_ == MetricKind::Max ? acc : acc / static_cast<double>(window_size_);
}

void OrbitMetric::row(const Configuration& x, const PointSet& points, std::span<double> out) const {
  if (x.size() != window_size_ || points.window_size() != window_size_) {
    throw std::invalid_argument("configuration does not match the metric window");
  }
  if (out.size() != points.size()) throw std::invalid_argument("row buffer has the wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t g = 0; g < window_size_; ++g) {
    const std::span<const double> lut(metric_.data() + x[g] * alphabet_size_, alphabet_size_);
    if (kind_ == MetricKind::Max) {
      kernels::gather_max(out, lut, points.column(g));
    } else {
      kernels::gather_add(out, lut, points.column(g));
    }
  }
  if (kind_ == MetricKind::Average) {
    // Divide rather than multiply by 1/|F| so rows agree bit-for-bit with
    // operator().
    const double n = static_cast<double>(window_size_);
    for (double& v : out) v /= n;
  }
}

void average_cost_row(std::span<const double> cost, std::size_t alphabet_size, const Configuration& x,
                      const PointSet& points, std::span<double> out) {
  if (cost.size() != alphabet_size * alphabet_size) throw std::invalid_argument("cost table has the wrong size");
  if (x.size() != points.window_size()) throw std::invalid_argument("configuration does not match the window");
  if (out.size() != points.size()) throw std::invalid_argument("row buffer has the wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t g = 0; g < x.size(); ++g) {
    kernels::gather_add(out, cost.subspan(x[g] * alphabet_size, alphabet_size), points.column(g));
  }
  const double n = static_cast<double>(x.size());
  for (double& v : out) v /= n;
}

Configuration SystemModel::shift(const Configuration& x, const Element& g) const {
  const std::size_t d = group->lattice_rank();
  if (d == 0) throw std::invalid_argument("periodic shifts need Z or Z^d");
  if (x.size() != window.size()) throw std::invalid_argument("configuration does not match the window");
  if (g.size() != d) throw std::invalid_argument("shift element has the wrong rank");

  std::vector<Coord> lo(window.elements().front()), hi(window.elements().back());
  std::size_t volume = 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto& e : window) {
      lo[i] = std::min(lo[i], e[i]);
      hi[i] = std::max(hi[i], e[i]);
    }
    volume *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  }
  if (volume != window.size()) throw std::invalid_argument("periodic shifts need a box window");

  // (g·x)_h = x_{h+g}, coordinates wrapped into the box. Sorted box order is
  // row-major, so positions follow from the wrapped coordinates.
  Configuration out(x.size());
  for (std::size_t pos = 0; pos < window.size(); ++pos) {
    const Element& h = window.elements()[pos];
    std::size_t src = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const Coord side = hi[i] - lo[i] + 1;
      Coord c = (h[i] + g[i] - lo[i]) % side;
      if (c < 0) c += side;
      src = src * static_cast<std::size_t>(side) + static_cast<std::size_t>(c);
    }
    out[pos] = x[src];
  }
  return out;
}

}  // namespace mdk
