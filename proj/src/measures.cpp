#include "mdimkit/measures.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mdk {

namespace {

constexpr double kMaxSupport = 1e7;

WindowPmf from_map(std::size_t window_size, std::size_t alphabet_size, const std::map<std::uint64_t, double>& m) {
  WindowPmf w{PointSet(window_size), {}};
  double total = 0.0;
  for (const auto& [idx, p] : m) total += p;
  for (const auto& [idx, p] : m) {
    if (p <= 0.0) continue;
    w.support.add(config_from_index(idx, alphabet_size, window_size));
    w.prob.push_back(p / total);
  }
  return w;
}

class Product final : public InvariantMeasure {
 public:
  Product(Pmf site, std::string name) : site_(std::move(site)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::string kind() const override { return "product"; }

  WindowPmf marginal(const FiniteSubset& window) const override {
    std::vector<std::uint32_t> symbols;
    for (std::size_t a = 0; a < site_.size(); ++a) {
      if (site_[a] > 0.0) symbols.push_back(static_cast<std::uint32_t>(a));
    }
    const std::size_t k = window.size();
    if (std::pow(static_cast<double>(symbols.size()), static_cast<double>(k)) > kMaxSupport) {
      throw std::length_error("product marginal support too large");
    }
    WindowPmf w{PointSet(k), {}};
    std::vector<std::size_t> digit(k, 0);
    Configuration x(k);
    while (true) {
      double p = 1.0;
      for (std::size_t g = 0; g < k; ++g) {
        x[g] = symbols[digit[g]];
        p *= site_[x[g]];
      }
      w.support.add(x);
      w.prob.push_back(p);
      std::size_t g = k;
      while (g > 0 && ++digit[g - 1] == symbols.size()) digit[--g] = 0;
      if (g == 0) break;
    }
    return w;
  }

 private:
  Pmf site_;
  std::string name_;
};

class Markov final : public InvariantMeasure {
 public:
  Markov(Channel t, std::string name) : t_(std::move(t)), pi_(stationary_law(t_)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::string kind() const override { return "markov"; }

  WindowPmf marginal(const FiniteSubset& window) const override {
    if (window.rank() != 1) throw std::invalid_argument("Markov marginals need a window in Z");
    const auto& e = window.elements();
    if (e.back()[0] - e.front()[0] + 1 != static_cast<Coord>(e.size())) {
      throw std::invalid_argument("Markov marginals need an interval window");
    }
    const std::size_t k = e.size();
    const std::size_t a = pi_.size();
    std::map<std::uint64_t, double> m;
    Configuration x(k);
    std::size_t visited = 0;
    // Depth-first over positive-probability paths.
    auto rec = [&](auto&& self, std::size_t pos, double p) -> void {
      if (pos == k) {
        if (++visited > static_cast<std::size_t>(kMaxSupport)) throw std::length_error("Markov support too large");
        m[config_index(x, a)] += p;
        return;
      }
      for (std::size_t s = 0; s < a; ++s) {
        const double step = pos == 0 ? pi_[s] : t_(x[pos - 1], s);
        if (step <= 0.0) continue;
        x[pos] = static_cast<std::uint32_t>(s);
        self(self, pos + 1, p * step);
      }
    };
    rec(rec, 0, 1.0);
    return from_map(k, a, m);
  }

 private:
  Channel t_;
  Pmf pi_;
  std::string name_;
};

class Empirical final : public InvariantMeasure {
 public:
  Empirical(SystemModel model, std::vector<Configuration> s, std::string name)
      : model_(std::move(model)), s_(std::move(s)), name_(std::move(name)) {
    if (s_.empty()) throw std::invalid_argument("empirical measure needs a nonempty set");
    const std::size_t d = model_.group->lattice_rank();
    if (d == 0) throw std::invalid_argument("empirical measures need Z or Z^d");
    lo_ = model_.window.elements().front();
    side_.assign(d, 0);
    std::vector<Coord> hi = lo_;
    for (const auto& e : model_.window) {
      for (std::size_t i = 0; i < d; ++i) {
        lo_[i] = std::min(lo_[i], e[i]);
        hi[i] = std::max(hi[i], e[i]);
      }
    }
    std::size_t volume = 1;
    for (std::size_t i = 0; i < d; ++i) {
      side_[i] = hi[i] - lo_[i] + 1;
      volume *= static_cast<std::size_t>(side_[i]);
    }
    if (volume != model_.window.size()) throw std::invalid_argument("empirical measures need a box window");
    for (const auto& x : s_) {
      if (x.size() != model_.window.size()) throw std::invalid_argument("configuration does not match the window");
      for (auto v : x) {
        if (v >= model_.alphabet.size()) throw std::out_of_range("symbol outside the alphabet");
      }
    }
  }

  std::string name() const override { return name_; }
  std::string kind() const override { return "empirical"; }

  WindowPmf marginal(const FiniteSubset& window) const override {
    const std::size_t d = side_.size();
    if (window.rank() != d) throw std::invalid_argument("window rank does not match the group");
    const std::size_t k = window.size();
    const std::size_t a = model_.alphabet.size();
    const double w = 1.0 / (static_cast<double>(model_.window.size()) * static_cast<double>(s_.size()));
    std::map<std::uint64_t, double> m;
    Configuration y(k);
    std::vector<std::size_t> src(k);
    for (const auto& g : model_.window) {
      // (g·x)_h = x_{h+g}, wrapped into the box F_n.
      for (std::size_t pos = 0; pos < k; ++pos) {
        const Element& h = window.elements()[pos];
        std::size_t idx = 0;
        for (std::size_t i = 0; i < d; ++i) {
          Coord c = (h[i] + g[i] - lo_[i]) % side_[i];
          if (c < 0) c += side_[i];
          idx = idx * static_cast<std::size_t>(side_[i]) + static_cast<std::size_t>(c);
        }
        src[pos] = idx;
      }
      for (const auto& x : s_) {
        for (std::size_t pos = 0; pos < k; ++pos) y[pos] = x[src[pos]];
        m[config_index(y, a)] += w;
      }
    }
    return from_map(k, a, m);
  }

 private:
  SystemModel model_;
  std::vector<Configuration> s_;
  std::string name_;
  std::vector<Coord> lo_;
  std::vector<Coord> side_;
};

}  // namespace

MeasurePtr product_measure(Pmf site, std::string name) {
  return std::make_shared<Product>(std::move(site), std::move(name));
}

MeasurePtr markov_measure(Channel transition, std::string name) {
  if (transition.inputs() != transition.outputs()) throw std::invalid_argument("transition matrix must be square");
  return std::make_shared<Markov>(std::move(transition), std::move(name));
}

MeasurePtr empirical_measure(const SystemModel& model, std::vector<Configuration> s, std::string name) {
  return std::make_shared<Empirical>(model, std::move(s), std::move(name));
}

Pmf stationary_law(const Channel& t) {
  const std::size_t n = t.inputs();
  if (t.outputs() != n) throw std::invalid_argument("transition matrix must be square");
  // The lazy chain (I + P)/2 has the same stationary law and is aperiodic.
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < 1000000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] += 0.5 * pi[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += 0.5 * pi[i] * t(i, j);
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - pi[i]);
    pi.swap(next);
    if (change < 1e-15) break;
  }
  const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& v : pi) v /= s;
  return Pmf(std::move(pi));
}

Configuration Partition::apply(const Configuration& x) const {
  Configuration y(x.size());
  for (std::size_t g = 0; g < x.size(); ++g) y[g] = (*this)(x[g]);
  return y;
}

Partition partition_map(const Alphabet& a, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t n = a.size();
  Partition p;
  p.cell_of.assign(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (p.cell_of[v] != n) continue;
    const std::size_t cell = p.reps.size();
    p.reps.push_back(static_cast<std::uint32_t>(v));
    std::vector<std::size_t> members{v};
    p.cell_of[v] = cell;
    for (std::size_t u = v + 1; u < n; ++u) {
      if (p.cell_of[u] != n) continue;
      bool close = true;
      for (std::size_t m : members) close = close && a.d(u, m) < eps;
      if (!close) continue;
      members.push_back(u);
      p.cell_of[u] = cell;
    }
  }
  return p;
}

}  // namespace mdk
