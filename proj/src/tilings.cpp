#include "mdimkit/tilings.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mdk {

FiniteSubset FiniteTiling::tile(std::size_t j, const Element& c) const {
  return right_translate(*group, shapes.at(j), c);
}

std::vector<Element> FiniteTiling::whole_centers(std::size_t j, const FiniteSubset& f) const {
  std::vector<Element> out;
  for (const auto& c : centers.at(j)) {
    bool inside = true;
    for (const auto& s : shapes[j]) {
      if (!f.contains(group->multiply(s, c))) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(c);
  }
  return out;
}

FiniteTiling tile_boxes(GroupPtr g, const FiniteSubset& window, Coord side, std::vector<Coord> phase) {
  const std::size_t d = g->lattice_rank();
  if (d == 0) throw std::invalid_argument("tile_boxes needs Z or Z^d, got " + g->name());
  if (side < 1) throw std::invalid_argument("tile side must be >= 1");
  if (window.rank() != d) throw std::invalid_argument("window rank does not match the group");
  if (phase.empty()) phase.assign(d, 0);
  if (phase.size() != d) throw std::invalid_argument("phase rank does not match the group");

  std::vector<Coord> lo(window.elements().front()), hi(lo);
  for (const auto& e : window) {
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], e[i]);
      hi[i] = std::max(hi[i], e[i]);
    }
  }

  // Tiles of the grid phase + side*Z^d that meet the bounding box.
  auto floor_div = [](Coord a, Coord b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
  std::vector<Coord> klo(d), khi(d);
  for (std::size_t i = 0; i < d; ++i) {
    klo[i] = floor_div(lo[i] - phase[i], side);
    khi[i] = floor_div(hi[i] - phase[i], side) + 1;
  }

  FiniteTiling t{g, {cube(d, side)}, {{}}, window};
  const FiniteSubset kbox = box(klo, khi);
  for (const auto& k : kbox) {
    Element c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = phase[i] + side * k[i];
    // Keep the tile when it meets the window.
    bool meets = false;
    for (const auto& s : t.shapes[0]) {
      if (window.contains(g->multiply(s, c))) {
        meets = true;
        break;
      }
    }
    if (meets) t.centers[0].push_back(std::move(c));
  }
  return t;
}

FiniteTiling greedy_tiling(GroupPtr g, const FiniteSubset& window, std::vector<FiniteSubset> shapes,
                           std::uint64_t seed) {
  if (shapes.empty()) throw std::invalid_argument("greedy_tiling needs at least one shape");
  const Element e = g->identity();
  for (const auto& s : shapes) {
    if (!s.contains(e)) throw std::invalid_argument("every shape must contain the identity");
  }

  std::vector<std::size_t> order(window.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }

  FiniteTiling t{g, std::move(shapes), {}, window};
  t.centers.resize(t.shapes.size());
  std::vector<char> covered(window.size(), 0);

  for (std::size_t idx : order) {
    if (covered[idx]) continue;
    const Element& w = window.elements()[idx];
    bool placed = false;
    for (std::size_t j = 0; j < t.shapes.size() && !placed; ++j) {
      for (const auto& s : t.shapes[j]) {
        // s·c = w
        const Element c = g->multiply(g->inverse(s), w);
        std::vector<std::size_t> cells;
        bool fits = true;
        for (const auto& u : t.shapes[j]) {
          const std::size_t pos = window.index_of(g->multiply(u, c));
          if (pos == window.size() || covered[pos]) {
            fits = false;
            break;
          }
          cells.push_back(pos);
        }
        if (!fits) continue;
        for (std::size_t pos : cells) covered[pos] = 1;
        t.centers[j].push_back(c);
        placed = true;
        break;
      }
    }
  }
  for (auto& cs : t.centers) std::sort(cs.begin(), cs.end());
  return t;
}

double density(const FiniteTiling& t, const FiniteSubset& f, std::size_t j) {
  if (j >= t.shapes.size()) throw std::out_of_range("shape index out of range");
  const double whole = static_cast<double>(t.whole_centers(j, f).size());
  return whole * static_cast<double>(t.shapes[j].size()) / static_cast<double>(f.size());
}

DensityReport density_report(const FiniteTiling& t, const FiniteSubset& f) {
  DensityReport r;
  for (std::size_t j = 0; j < t.shapes.size(); ++j) {
    r.per_shape.push_back(density(t, f, j));
    r.total += r.per_shape.back();
  }
  return r;
}

MultiplicityReport covering_multiplicity(const FiniteTiling& t, const FiniteSubset& h, std::size_t j,
                                         double eps) {
  if (j >= t.shapes.size()) throw std::out_of_range("shape index out of range");
  if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");
  const std::unordered_set<Element, ElementHash> cj(t.centers[j].begin(), t.centers[j].end());

  MultiplicityReport r;
  r.multiplicity.reserve(h.size());
  for (const auto& x : h) {
    std::int64_t m = 0;
    if (!cj.empty()) {
      for (const auto& g : h) {
        // x ∈ C_j g^{-1}  <=>  x·g ∈ C_j
        if (cj.count(t.group->multiply(x, g))) ++m;
      }
    }
    r.multiplicity.push_back(m);
  }

  // rho_T(S_j, H) |H| / |S_j| is the number of whole tiles of shape j in H.
  const double whole = static_cast<double>(t.whole_centers(j, h).size());
  r.bound = (1.0 + eps) * whole;

  std::size_t ok = 0;
  for (auto m : r.multiplicity) {
    if (static_cast<double>(m) <= r.bound) ++ok;
  }
  r.covered_fraction = static_cast<double>(ok) / static_cast<double>(h.size());

  std::vector<std::int64_t> sorted = r.multiplicity;
  std::sort(sorted.begin(), sorted.end());
  const auto keep = std::min<std::size_t>(
      sorted.size(), static_cast<std::size_t>(std::floor((1.0 - eps) * static_cast<double>(sorted.size()))) + 1);
  r.max_mult = sorted[keep - 1];
  return r;
}

std::string violation_name(TilingViolation v) {
  switch (v) {
    case TilingViolation::OverlappingTiles:
      return "overlapping_tiles";
    case TilingViolation::ShapeWithoutIdentity:
      return "shape_without_identity";
    case TilingViolation::TranslateShapes:
      return "translate_shapes";
    case TilingViolation::BadCenter:
      return "bad_center";
  }
  return "unknown";
}

namespace {

std::string show(const Element& e) {
  std::string s = "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  return s + ")";
}

bool is_right_translate(const Group& g, const FiniteSubset& a, const FiniteSubset& b) {
  if (a.size() != b.size()) return false;
  const Element a0_inv = g.inverse(a.elements().front());
  for (const auto& t : b) {
    if (right_translate(g, a, g.multiply(a0_inv, t)) == b) return true;
  }
  return false;
}

}  // namespace

TilingValidation validate(const FiniteTiling& t) {
  TilingValidation v;
  const Group& g = *t.group;
  const Element e = g.identity();

  for (std::size_t j = 0; j < t.shapes.size(); ++j) {
    if (!t.shapes[j].contains(e)) {
      v.issues.push_back({TilingViolation::ShapeWithoutIdentity, "shape " + std::to_string(j) + " does not contain e"});
    }
    for (std::size_t k = j + 1; k < t.shapes.size(); ++k) {
      if (is_right_translate(g, t.shapes[j], t.shapes[k])) {
        v.issues.push_back({TilingViolation::TranslateShapes,
                            "shapes " + std::to_string(j) + " and " + std::to_string(k) + " are translates"});
      }
    }
  }

  std::unordered_map<Element, std::pair<std::size_t, std::size_t>, ElementHash> owner;
  std::vector<char> in_whole(t.window.size(), 0), in_any(t.window.size(), 0);
  for (std::size_t j = 0; j < t.shapes.size() && j < t.centers.size(); ++j) {
    for (std::size_t ci = 0; ci < t.centers[j].size(); ++ci) {
      const Element& c = t.centers[j][ci];
      if (c.size() != g.rank()) {
        v.issues.push_back({TilingViolation::BadCenter, "center " + show(c) + " has the wrong rank"});
        continue;
      }
      std::vector<std::size_t> cells;
      bool whole = true;
      for (const auto& s : t.shapes[j]) {
        Element x = g.multiply(s, c);
        auto [it, fresh] = owner.try_emplace(x, j, ci);
        if (!fresh) {
          v.issues.push_back({TilingViolation::OverlappingTiles,
                              "tiles at " + show(t.centers[it->second.first][it->second.second]) + " and " + show(c) +
                                  " share " + show(x)});
        }
        const std::size_t pos = t.window.index_of(x);
        if (pos == t.window.size()) {
          whole = false;
        } else {
          cells.push_back(pos);
        }
      }
      for (std::size_t pos : cells) {
        in_any[pos] = 1;
        if (whole) in_whole[pos] = 1;
      }
    }
  }
  if (t.centers.size() != t.shapes.size()) {
    v.issues.push_back({TilingViolation::BadCenter, "center lists do not match the shape count"});
  }

  const double n = static_cast<double>(t.window.size());
  v.remainder_fraction = static_cast<double>(std::count(in_whole.begin(), in_whole.end(), 0)) / n;
  v.uncovered_fraction = static_cast<double>(std::count(in_any.begin(), in_any.end(), 0)) / n;
  return v;
}

}  // namespace mdk
