#pragma once

// Rate-distortion for a finite source and codebook: minimise I(X;Y) over
// channels nu(y|x) subject to E rho(X, Y) <= target. Blahut-Arimoto at a
// fixed multiplier s, bisection on s for the target.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mdk {

struct RDOptions {
  double s_max_factor = 50.0;    // s in [0, s_max_factor / target]
  double distortion_tol = 1e-8;  // outer stop: target - D <= tol
  int max_outer = 200;
  int max_inner = 20000;
  double inner_tol = 1e-10;      // inner stop on the Blahut-Arimoto gap at the final multiplier
  int search_inner = 2000;       // inner iteration cap while searching for the multiplier
  double search_tol = 1e-7;      // inner stop while searching
  double gap_tol = 1e-6;         // flag results whose certified gap exceeds this
  bool keep_channel = false;
};

enum class RDStatus { Ok, Trivial, Infeasible, NotConverged };

std::string rd_status_name(RDStatus s);

struct RDResult {
  double eps = 0.0;         // nominal distortion level (set by callers)
  double target = 0.0;      // constraint actually imposed on E rho
  double rate = 0.0;        // I(X;Y) of the returned channel, nats
  double lower_bound = 0.0; // certified lower bound on the optimum
  double s = 0.0;
  double distortion = 0.0;  // E rho of the returned channel, <= target
  double gap = 0.0;         // rate - lower_bound
  int iterations = 0;       // inner iterations, all multipliers
  int outer_iterations = 0;
  RDStatus status = RDStatus::Ok;
  std::vector<double> channel;  // |X| x |Y| when requested
};

// p: source pmf over |X| points (zeros allowed); rho: |X| x ny distortions.
RDResult solve_rd(std::span<const double> p, std::span<const double> rho, std::size_t ny, double target,
                  const RDOptions& opt = {});

// Mutual information of p(x) w(y|x) for a row-stochastic w.
double channel_information(std::span<const double> p, std::span<const double> w, std::size_t ny);

}  // namespace mdk
