#pragma once

// Rate-distortion of window marginals: R_mu(eps, F) under the L1, Lp and
// L-infinity closeness conditions, with a finite reproduction codebook.

#include <stdexcept>
#include <string>
#include <vector>

#include "mdimkit/groups.hpp"
#include "mdimkit/measures.hpp"
#include "mdimkit/rd_solver.hpp"
#include "mdimkit/spaces.hpp"

namespace mdk {

// Strict "< eps" conditions are imposed as "<= eps (1 - kStrictFactor)".
inline constexpr double kStrictFactor = 1e-9;
inline constexpr std::size_t kDefaultBudgetCells = 1000000;

class BudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class DistortionKind { L1, Lp, Linf };

struct DistortionSpec {
  DistortionKind kind = DistortionKind::L1;
  double eps = 0.0;
  double p = 1.0;      // Lp exponent
  double alpha = 0.0;  // Linf fraction

  static DistortionSpec l1(double eps) { return {DistortionKind::L1, eps, 1.0, 0.0}; }
  static DistortionSpec lp(double eps, double p) { return {DistortionKind::Lp, eps, p, 0.0}; }
  static DistortionSpec linf(double eps, double alpha) { return {DistortionKind::Linf, eps, 1.0, alpha}; }

  // Throws std::invalid_argument for eps <= 0, p < 1 or alpha <= 0.
  void validate() const;
  // Per-coordinate cost table: d, d^p or 1[d >= eps].
  std::vector<double> cost_table(const Alphabet& a) const;
  // Bound on the averaged cost: eps (1 - f), (eps (1 - f))^p or alpha (1 - f).
  double target() const;
  std::string name() const;
};

// Reproduction codebook: the marginal's support, its image under the
// coordinate quantizer P at mesh eps, and any extra codewords, deduplicated
// and sorted by configuration index.
PointSet build_codebook(const WindowPmf& mu, const Alphabet& a, double eps, const std::vector<PointSet>& extra = {});

// Averaged per-window distortion matrix |support| x |codebook|.
std::vector<double> distortion_matrix(const WindowPmf& mu, const Alphabet& a, const DistortionSpec& spec,
                                      const PointSet& codebook);

// R_mu(eps, F) (L1 or Lp) or R_{mu,inf}(eps, alpha, F). Throws BudgetExceeded
// when |support| x |codebook| > budget_cells.
RDResult rd_window(const WindowPmf& mu, const Alphabet& a, const DistortionSpec& spec, const PointSet& codebook,
                   const RDOptions& opt = {}, std::size_t budget_cells = kDefaultBudgetCells);

RDResult rd_window_linf(const WindowPmf& mu, const Alphabet& a, double eps, double alpha, const PointSet& codebook,
                        const RDOptions& opt = {}, std::size_t budget_cells = kDefaultBudgetCells);

struct NormalizedRate {
  int n = 0;
  std::size_t window_size = 0;
  RDResult result;
  double rate_per_symbol = 0.0;
  std::size_t codebook_size = 0;
};

struct NormalizedProfile {
  std::vector<NormalizedRate> rows;
  bool truncated = false;  // some n exceeded the budget
  int first_truncated_n = 0;
  double tail_spread = 0.0;  // max - min of rate_per_symbol over the computed rows
};

// R(eps, F_n) / |F_n| for n in [n_min, n_max]. Codebooks add the
// representatives of a cover of A^{F_n} by sets of diameter < eps under the
// metric matching the distortion (d̄ for L1, d for Lp and Linf).
NormalizedProfile rd_normalized(const InvariantMeasure& mu, const Alphabet& a, const DistortionSpec& spec,
                                const FolnerSequence& folner, int n_min, int n_max, const RDOptions& opt = {},
                                std::size_t budget_cells = kDefaultBudgetCells);

// R_{mu,inf}(eps, alpha, F) along a decreasing alpha grid.
std::vector<RDResult> linf_alpha_path(const WindowPmf& mu, const Alphabet& a, double eps,
                                      const std::vector<double>& alphas, const PointSet& codebook,
                                      const RDOptions& opt = {}, std::size_t budget_cells = kDefaultBudgetCells);

// Cover representatives of A^F (|F| = window_size) as a point set.
PointSet cover_codewords(const Alphabet& a, std::size_t window_size, MetricKind kind, double eps);

}  // namespace mdk
