#include "mdimkit/groups.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace mdk {

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Coord c : e) {
    h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

void require_rank(const Element& e, std::size_t rank, const std::string& group) {
  if (e.size() != rank) {
    throw std::invalid_argument("element of length " + std::to_string(e.size()) + " is not in " + group);
  }
}

class Lattice final : public Group {
 public:
  explicit Lattice(std::size_t d) : d_(d) {}

  std::string name() const override { return d_ == 1 ? "Z" : "Z" + std::to_string(d_); }
  std::size_t rank() const override { return d_; }
  Element identity() const override { return Element(d_, 0); }

  Element multiply(const Element& a, const Element& b) const override {
    require_rank(a, d_, name());
    require_rank(b, d_, name());
    Element r(d_);
    for (std::size_t i = 0; i < d_; ++i) r[i] = a[i] + b[i];
    return r;
  }

  Element inverse(const Element& a) const override {
    require_rank(a, d_, name());
    Element r(d_);
    for (std::size_t i = 0; i < d_; ++i) r[i] = -a[i];
    return r;
  }

  std::size_t lattice_rank() const override { return d_; }

 private:
  std::size_t d_;
};

class RuleGroup final : public Group {
 public:
  explicit RuleGroup(GroupRule rule) : rule_(std::move(rule)) {
    if (rule_.rank == 0 || !rule_.multiply || !rule_.inverse) {
      throw std::invalid_argument("group rule needs a rank, multiply and inverse");
    }
    require_rank(rule_.identity, rule_.rank, rule_.name);
  }

  std::string name() const override { return rule_.name; }
  std::size_t rank() const override { return rule_.rank; }
  Element identity() const override { return rule_.identity; }

  Element multiply(const Element& a, const Element& b) const override {
    require_rank(a, rule_.rank, rule_.name);
    require_rank(b, rule_.rank, rule_.name);
    return rule_.multiply(a, b);
  }

  Element inverse(const Element& a) const override {
    require_rank(a, rule_.rank, rule_.name);
    return rule_.inverse(a);
  }

 private:
  GroupRule rule_;
};

}  // namespace

GroupPtr make_lattice(std::size_t d) {
  if (d == 0) throw std::invalid_argument("lattice rank must be positive");
  return std::make_shared<Lattice>(d);
}

GroupPtr make_rule_group(GroupRule rule) { return std::make_shared<RuleGroup>(std::move(rule)); }

GroupPtr make_heisenberg() {
  GroupRule rule;
  rule.name = "Heisenberg";
  rule.rank = 3;
  rule.identity = {0, 0, 0};
  rule.multiply = [](const Element& x, const Element& y) {
    return Element{x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]};
  };
  // (a,b,c)^{-1} = (-a, -b, -c + a*b)
  rule.inverse = [](const Element& x) { return Element{-x[0], -x[1], -x[2] + x[0] * x[1]}; };
  return make_rule_group(std::move(rule));
}

GroupPtr make_group(const std::string& name) {
  if (name == "Z") return make_lattice(1);
  if (name == "Heisenberg") return make_heisenberg();
  std::string digits;
  if (name.rfind("Zd:", 0) == 0) {
    digits = name.substr(3);
  } else if (name.size() > 1 && name[0] == 'Z') {
    digits = name.substr(1);
  }
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const int d = std::stoi(digits);
    if (d >= 1 && d <= 8) return make_lattice(static_cast<std::size_t>(d));
  }
  throw std::invalid_argument("unknown group '" + name + "'");
}

FiniteSubset::FiniteSubset(std::vector<Element> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("finite subset must be nonempty");
  const std::size_t r = elements_.front().size();
  for (const auto& e : elements_) {
    if (e.size() != r) throw std::invalid_argument("finite subset mixes encodings of different lengths");
  }
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
}

bool FiniteSubset::contains(const Element& e) const {
  return std::binary_search(elements_.begin(), elements_.end(), e);
}

std::size_t FiniteSubset::index_of(const Element& e) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), e);
  if (it == elements_.end() || *it != e) return elements_.size();
  return static_cast<std::size_t>(it - elements_.begin());
}

FiniteSubset singleton(const Element& e) { return FiniteSubset({e}); }

FiniteSubset box(const std::vector<Coord>& lo, const std::vector<Coord>& hi) {
  if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box bounds must have equal nonzero rank");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (hi[i] <= lo[i]) throw std::invalid_argument("box must be nonempty");
  }
  std::vector<Element> out;
  Element cur = lo;
  while (true) {
    out.push_back(cur);
    std::size_t i = lo.size();
    while (i > 0) {
      --i;
      if (++cur[i] < hi[i]) break;
      cur[i] = lo[i];
      if (i == 0) return FiniteSubset(std::move(out));
    }
  }
}

FiniteSubset cube(std::size_t d, Coord side) {
  return box(std::vector<Coord>(d, 0), std::vector<Coord>(d, side));
}

FiniteSubset product_set(const Group& g, const FiniteSubset& k, const FiniteSubset& a) {
  std::vector<Element> out;
  out.reserve(k.size() * a.size());
  for (const auto& x : k) {
    for (const auto& y : a) out.push_back(g.multiply(x, y));
  }
  return FiniteSubset(std::move(out));
}

FiniteSubset right_translate(const Group& g, const FiniteSubset& a, const Element& t) {
  std::vector<Element> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(g.multiply(x, t));
  return FiniteSubset(std::move(out));
}

FiniteSubset inverse_set(const Group& g, const FiniteSubset& a) {
  std::vector<Element> out;
  out.reserve(a.size());
  for (const auto& x : a) out.push_back(g.inverse(x));
  return FiniteSubset(std::move(out));
}

std::size_t symmetric_difference_size(const FiniteSubset& a, const FiniteSubset& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return a.size() + b.size() - 2 * common;
}

double invariance_defect(const Group& g, const FiniteSubset& a, const FiniteSubset& k) {
  const FiniteSubset ka = product_set(g, k, a);
  return static_cast<double>(symmetric_difference_size(ka, a)) / static_cast<double>(a.size());
}

bool is_invariant(const Group& g, const FiniteSubset& a, const FiniteSubset& k, double delta) {
  return invariance_defect(g, a, k) < delta;
}

FiniteSubset FolnerSequence::operator()(int n) const {
  if (n < 1) throw std::invalid_argument("Følner index starts at 1");
  return generator(n);
}

FolnerSequence folner_boxes(const Group& g) {
  const std::size_t d = g.lattice_rank();
  if (d == 0) throw std::invalid_argument("box Følner sequence needs Z or Z^d, got " + g.name());
  return {"boxes", [d](int n) { return cube(d, n); }};
}

FolnerSequence folner_stretched(const Group& g) {
  const std::size_t d = g.lattice_rank();
  if (d == 0) throw std::invalid_argument("stretched Følner sequence needs Z or Z^d, got " + g.name());
  return {"stretched", [d](int n) {
            std::vector<Coord> hi(d, n);
            hi.back() = 2 * static_cast<Coord>(n);
            return box(std::vector<Coord>(d, 0), hi);
          }};
}

FolnerSequence make_folner(const Group& g, const std::string& name) {
  if (name == "boxes") return folner_boxes(g);
  if (name == "stretched") return folner_stretched(g);
  throw std::invalid_argument("unknown Følner family '" + name + "'");
}

namespace {

// Adds F_k^{-1} F_n into `acc`.
void add_left_quotient(const Group& g, const FiniteSubset& fk, const FiniteSubset& fn,
                       std::unordered_set<Element, ElementHash>& acc) {
  for (const auto& a : fk) {
    const Element ai = g.inverse(a);
    for (const auto& b : fn) acc.insert(g.multiply(ai, b));
  }
}

}  // namespace

double tempered_constant(const Group& g, const FolnerSequence& f, int up_to_n) {
  if (up_to_n < 2) throw std::invalid_argument("tempered_constant needs up_to_n >= 2");
  std::vector<FiniteSubset> sets;
  for (int n = 1; n <= up_to_n; ++n) sets.push_back(f(n));
  double best = 0.0;
  for (int n = 2; n <= up_to_n; ++n) {
    std::unordered_set<Element, ElementHash> acc;
    const auto& fn = sets[static_cast<std::size_t>(n - 1)];
    for (int k = 1; k < n; ++k) add_left_quotient(g, sets[static_cast<std::size_t>(k - 1)], fn, acc);
    best = std::max(best, static_cast<double>(acc.size()) / static_cast<double>(fn.size()));
  }
  return best;
}

std::vector<int> tempered_subsequence(const Group& g, const FolnerSequence& f, int up_to_n, double c) {
  std::vector<int> kept;
  std::vector<FiniteSubset> kept_sets;
  for (int n = 1; n <= up_to_n; ++n) {
    FiniteSubset fn = f(n);
    std::unordered_set<Element, ElementHash> acc;
    for (const auto& fk : kept_sets) add_left_quotient(g, fk, fn, acc);
    if (static_cast<double>(acc.size()) <= c * static_cast<double>(fn.size())) {
      kept.push_back(n);
      kept_sets.push_back(std::move(fn));
    }
  }
  return kept;
}

double folner_defect(const Group& g, const FiniteSubset& fn, const std::vector<Element>& generators) {
  double worst = 0.0;
  for (const auto& s : generators) {
    worst = std::max(worst, invariance_defect(g, fn, singleton(s)));
  }
  return worst;
}

}  // namespace mdk
