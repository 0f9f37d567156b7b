#pragma once

// Finite tilings restricted to a window: shapes S_j (each containing the
// identity), centers C_j, and the statistics used in the quasi-tiling
// arguments (tile density and covering multiplicity of {C_j g^{-1}}).
//
// The centers of a tiling are those of every tile S_j·c that meets the
// window, so the tiles partition the window up to what they cover. Tiles
// crossing the window boundary make up the boundary remainder.

#include <cstdint>
#include <string>
#include <vector>

#include "mdimkit/groups.hpp"

namespace mdk {

struct FiniteTiling {
  GroupPtr group;
  std::vector<FiniteSubset> shapes;
  std::vector<std::vector<Element>> centers;  // centers[j] belongs to shapes[j]
  FiniteSubset window;

  std::size_t shape_count() const { return shapes.size(); }
  // S_j·c
  FiniteSubset tile(std::size_t j, const Element& c) const;
  // Centers c in C_j with S_j·c contained in `f`.
  std::vector<Element> whole_centers(std::size_t j, const FiniteSubset& f) const;
};

// Grid tiling of the window by translates of [0, side)^d, with the lattice
// of centers shifted by `phase` (default 0).
FiniteTiling tile_boxes(GroupPtr g, const FiniteSubset& window, Coord side,
                        std::vector<Coord> phase = {});

// Randomized greedy tiling for any group: visits window cells in a seeded
// random order and places the first shape translate that covers the cell
// inside the window without overlapping earlier tiles. Cells that cannot
// be covered stay uncovered.
FiniteTiling greedy_tiling(GroupPtr g, const FiniteSubset& window, std::vector<FiniteSubset> shapes,
                           std::uint64_t seed);

// (1/|F|) #{c : S_j c in T and S_j c ⊆ F} |S_j|
double density(const FiniteTiling& t, const FiniteSubset& f, std::size_t j);

struct DensityReport {
  std::vector<double> per_shape;
  double total = 0.0;
};
DensityReport density_report(const FiniteTiling& t, const FiniteSubset& f);

struct MultiplicityReport {
  // Largest m(h) over the (1 - eps)-fraction of H with the smallest m(h).
  std::int64_t max_mult = 0;
  // Fraction of h in H with m(h) <= (1 + eps) rho_T(S_j, H) |H| / |S_j|.
  double covered_fraction = 0.0;
  double bound = 0.0;
  std::vector<std::int64_t> multiplicity;  // m(h) in the sorted order of H
};

// m(h) = #{g in H : h in C_j g^{-1} ∩ H}.
MultiplicityReport covering_multiplicity(const FiniteTiling& t, const FiniteSubset& h, std::size_t j,
                                         double eps);

enum class TilingViolation { OverlappingTiles, ShapeWithoutIdentity, TranslateShapes, BadCenter };

struct ValidationIssue {
  TilingViolation kind;
  std::string message;
};

struct TilingValidation {
  std::vector<ValidationIssue> issues;
  // |window \ union of tiles contained in the window| / |window|
  double remainder_fraction = 0.0;
  // |window \ union of all tiles| / |window|
  double uncovered_fraction = 0.0;

  bool valid() const { return issues.empty(); }
};

TilingValidation validate(const FiniteTiling& t);

std::string violation_name(TilingViolation v);

}  // namespace mdk
