#pragma once

// Shift-invariant measures on finite-alphabet G-shifts, seen through their
// marginals on finite windows, and the coordinate quantizer P.

#include <memory>
#include <string>
#include <vector>

#include "mdimkit/infotheory.hpp"
#include "mdimkit/spaces.hpp"

namespace mdk {

// Marginal on A^F restricted to its support, sorted by configuration index.
struct WindowPmf {
  PointSet support;
  std::vector<double> prob;

  std::size_t size() const { return prob.size(); }
};

class InvariantMeasure {
 public:
  virtual ~InvariantMeasure() = default;
  virtual std::string name() const = 0;
  virtual std::string kind() const = 0;
  // Marginal on `window`. Positions follow the sorted order of the window.
  virtual WindowPmf marginal(const FiniteSubset& window) const = 0;
};

using MeasurePtr = std::shared_ptr<const InvariantMeasure>;

// i.i.d. symbols with the given single-site law; works for any group.
MeasurePtr product_measure(Pmf site, std::string name = "product");

// Stationary Markov chain on Z; marginals need an interval window. The
// stationary law is computed from the transition matrix.
MeasurePtr markov_measure(Channel transition, std::string name = "markov");

// mu_n = (1/|F_n|) sum_{g in F_n} nu_n o g^{-1}, nu_n uniform on `s`.
// `model.window` is F_n (a box in Z^d) and shifts wrap periodically over it.
// Marginals are available on any box window of the same lattice.
MeasurePtr empirical_measure(const SystemModel& model, std::vector<Configuration> s, std::string name = "empirical");

// Stationary law of a row-stochastic matrix (power iteration from uniform).
Pmf stationary_law(const Channel& transition);

// Partition of the alphabet into cells of diameter < eps; the representative
// of a cell is its first member.
struct Partition {
  std::vector<std::size_t> cell_of;  // symbol -> cell
  std::vector<std::uint32_t> reps;   // cell -> representative symbol

  std::uint32_t operator()(std::uint32_t a) const { return reps[cell_of[a]]; }
  Configuration apply(const Configuration& x) const;
};

// Greedy partition in symbol order: each cell starts at the first unassigned
// symbol and takes every later unassigned symbol within eps of all members.
Partition partition_map(const Alphabet& a, double eps);

}  // namespace mdk
