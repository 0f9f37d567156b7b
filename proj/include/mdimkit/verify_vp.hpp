#pragma once

// Desk-scale comparison of normalized rate distortion against covering
// growth: exact one-sided inequalities (cover bounds, orderings between the
// L1, Lp and L-infinity rates, S̃ <= S, the tame-growth comparison, Fano) and
// trend ratios against |log eps|.

#include <cstdint>
#include <string>
#include <vector>

#include "mdimkit/groups.hpp"
#include "mdimkit/mdim.hpp"
#include "mdimkit/measures.hpp"
#include "mdimkit/ratedist.hpp"
#include "mdimkit/spaces.hpp"

namespace mdk {

struct VpModel {
  GroupPtr group;
  Alphabet alphabet;
  FolnerSequence folner;
};

struct VpOptions {
  std::vector<double> eps_grid;
  int n_min = 1;
  int n_max = 1;
  // point_mass, uniform, simplex_grid, dirichlet, subgrid, markov, empirical
  std::vector<std::string> families{"point_mass", "uniform"};
  std::vector<DistortionKind> modes{DistortionKind::L1, DistortionKind::Lp, DistortionKind::Linf};
  std::vector<double> p_values{1.0, 2.0, 4.0};
  std::vector<double> alphas{0.1, 0.01};
  std::vector<double> deltas{0.5};  // tame-growth comparison exponents in (0, 1)
  double slack = 1e-6;  // added to every right-hand side; negative values tighten the checks
  double fano_D = 0.0;  // > 2 enables the Fano-side sweep
  std::uint64_t seed = 1;
  int dirichlet_count = 2;
  RDOptions rd;
  std::size_t budget_cells = kDefaultBudgetCells;
  std::size_t max_points = kDefaultMaxPoints;
  int jobs = 1;

  // Throws std::invalid_argument on an empty grid, bad n range, unknown
  // family, p < 1, alpha <= 0, delta outside (0, 1) or a non-finite slack.
  void validate() const;
};

struct Candidate {
  std::string family;
  std::string name;
  MeasurePtr measure;
};

// Members of one family for windows F_n; `eps` sets the separation scale
// of the empirical family. Families that do not apply to the model (Markov
// off Z, empirical off lattices or beyond max_points) give no members.
std::vector<Candidate> candidate_measures(const VpModel& model, const std::string& family, double eps, int n,
                                          std::uint64_t seed, int dirichlet_count = 2,
                                          std::size_t max_points = kDefaultMaxPoints);

struct MeasureRate {
  std::string family;
  std::string measure;
  int n = 0;
  std::size_t window_size = 0;
  std::size_t codebook_size = 0;
  std::string mode;  // L1, L2, Linf(alpha=0.1), L1(eps'=...) ...
  double eps = 0.0;
  double alpha = 0.0;
  double rate = 0.0;  // per window
  double rate_per_symbol = 0.0;
  double distortion = 0.0;
  double multiplier = 0.0;
  double gap = 0.0;
  std::string status;
};

struct InequalityCheck {
  std::string name;
  double eps = 0.0;
  int n = 0;
  std::string subject;  // measure or quantity checked
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  bool exact = true;  // counts toward the exit status
};

struct VpRow {
  double eps = 0.0;
  int n = 0;
  double S_lower = 0.0;
  double S_upper = 0.0;
  double Stilde_lower = 0.0;
  double Stilde_upper = 0.0;
  double best_rate = 0.0;  // max over candidates of R_mu(eps, F_n) / |F_n|
  std::string family;
  std::string measure;
  double best_rate_linf = 0.0;  // same for the smallest alpha, when run
  // x / |log eps|; NaN at eps = 1.
  double ratio_rate = 0.0;
  double ratio_S = 0.0;
  double ratio_Stilde = 0.0;
};

struct VpReport {
  MdimEstimate profile;
  std::vector<VpRow> rows;
  std::vector<MeasureRate> rates;
  std::vector<InequalityCheck> checks;
  std::vector<FanoSideRow> fano;
  std::vector<std::string> truncations;
  bool has_slopes = false;
  MdimSlopes slopes_S;
  MdimSlopes slopes_Stilde;
  int violations = 0;  // failed exact checks

  bool passed() const { return violations == 0; }
};

VpReport verify_vp(const VpModel& model, const VpOptions& opt);

}  // namespace mdk
