#pragma once

// Covering-number growth of full G-shifts over finite alphabets: S and S̃
// brackets per (eps, n), metric mean dimension tail statistics, and the
// Fano-side lower bound sweep for empirical measures.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdimkit/groups.hpp"
#include "mdimkit/infotheory.hpp"
#include "mdimkit/rd_solver.hpp"
#include "mdimkit/spaces.hpp"

namespace mdk {

inline constexpr std::size_t kDefaultMaxPoints = 6000;

// #(A^F, d_F or d̄_F, eps) bracket for |F| = window_size. Throws
// std::length_error when |A|^|F| > max_points, except for the max metric,
// whose bracket is the alphabet bracket raised to |F| when enumeration is
// out of reach.
struct CoverBracket {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  bool enumerated = false;
};

CoverBracket cover_bracket(const Alphabet& a, std::size_t window_size, MetricKind kind, double eps,
                           std::size_t max_points = kDefaultMaxPoints);

struct SRow {
  double eps = 0.0;
  int n = 0;
  std::size_t window_size = 0;
  CoverBracket cover;      // under d_{F_n}
  CoverBracket cover_bar;  // under d̄_{F_n}
  double S_lower = 0.0;
  double S_upper = 0.0;
  double Stilde_lower = 0.0;
  double Stilde_upper = 0.0;
};

struct MdimEstimate {
  std::vector<double> eps_grid;
  std::vector<SRow> rows;  // ordered by (eps as given, n)
  bool truncated = false;
  int first_truncated_n = 0;
  // Brackets that refute monotonicity in eps at some n.
  std::vector<std::string> monotonicity_issues;

  // Row at (eps, n) or nullptr.
  const SRow* find(double eps, int n) const;
  // Row with the largest n computed at eps, or nullptr.
  const SRow* last(double eps) const;
};

// (1/|F_n|) log #(A^{F_n}, d, eps) and the d̄ analogue for the full shift on
// `a`. Windows beyond max_points configurations truncate the n range.
MdimEstimate s_profile(const Alphabet& a, const FolnerSequence& folner, std::span<const double> eps_grid,
                       int n_min, int n_max, std::size_t max_points = kDefaultMaxPoints, int jobs = 1);

struct MdimSlopes {
  double upper = 0.0;     // max of S/|log eps| over the tail of the grid
  double lower = 0.0;     // min of S/|log eps| over the tail
  double ls_slope = 0.0;  // least-squares slope of S against |log eps|
  std::vector<double> tail_eps;
};

// Uses, per eps, the row with the largest computed n: upper brackets for
// `upper`, lower brackets for `lower`, midpoints for the regression. The
// tail is the finest half of the grid (rounded up). Throws
// std::invalid_argument for fewer than 3 eps values or eps outside (0, 1).
MdimSlopes mdim_slopes(const MdimEstimate& est, MetricKind kind);

struct FanoSideRow {
  double eps = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
  std::size_t set_size = 0;       // |S_n|
  std::size_t codebook_size = 0;
  double separation = 0.0;        // min d̄ distance in P(S_n)
  double distortion = 0.0;        // E d̄(X, Y)
  double mutual_information = 0.0;
  double bound = 0.0;             // (1 - 1/D) log |S_n| - H(1/D)
  CheckStatus status = CheckStatus::NotApplicable;
  std::string reason;
};

// For each n and seed: S_n maximal (8D+2) eps-separated in (A^{F_n}, d̄)
// (first fit in a seeded random order), X uniform on P(S_n) with P the
// coordinate quantizer at mesh eps, Y the rate-distortion channel at
// E d̄ < 4 eps. Fano's bound is checked when its preconditions verify.
std::vector<FanoSideRow> fano_side_sweep(const Alphabet& a, const FolnerSequence& folner, double eps, double D,
                                         int n_min, int n_max, std::span<const std::uint64_t> seeds,
                                         const RDOptions& opt = {}, std::size_t budget_cells = 1000000,
                                         std::size_t max_points = kDefaultMaxPoints);

}  // namespace mdk
