#pragma once

// Concrete countable discrete amenable groups, finite subsets, and Følner
// sequences. Elements are canonical integer vectors; every group here keeps
// its encodings canonical so equality of encodings is equality of elements.
//
// Side conventions are fixed throughout the toolkit:
//   invariance     uses the left product  K·A
//   temperedness   uses                   F_k^{-1}·F_n
//   tile translates are                   S·c  (shape times center)

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mdk {

using Coord = std::int64_t;
using Element = std::vector<Coord>;

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

class Group {
 public:
  virtual ~Group() = default;

  virtual std::string name() const = 0;
  // Length of the integer-vector encoding.
  virtual std::size_t rank() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element inverse(const Element& a) const = 0;

  // Rank of the lattice when the group is Z^d (encoding = coordinates),
  // zero otherwise.
  virtual std::size_t lattice_rank() const { return 0; }

  bool is_lattice() const { return lattice_rank() > 0; }
};

using GroupPtr = std::shared_ptr<const Group>;

// Z^d with componentwise addition.
GroupPtr make_lattice(std::size_t d);

// A group given by a user multiplication rule on canonical encodings.
struct GroupRule {
  std::string name;
  std::size_t rank = 0;
  Element identity;
  std::function<Element(const Element&, const Element&)> multiply;
  std::function<Element(const Element&)> inverse;
};
GroupPtr make_rule_group(GroupRule rule);

// Discrete Heisenberg group: (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b').
GroupPtr make_heisenberg();

// "Z", "Z2", "Z3", "Zd:<d>", "Heisenberg". Throws std::invalid_argument.
GroupPtr make_group(const std::string& name);

// Nonempty finite set of group elements, stored sorted and deduplicated.
class FiniteSubset {
 public:
  // Throws std::invalid_argument when `elements` is empty or the encodings
  // have inconsistent lengths.
  explicit FiniteSubset(std::vector<Element> elements);

  std::size_t size() const { return elements_.size(); }
  bool contains(const Element& e) const;
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t rank() const { return elements_.front().size(); }
  // Position of `e` in sorted order, or size() when absent.
  std::size_t index_of(const Element& e) const;

  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  friend bool operator==(const FiniteSubset&, const FiniteSubset&) = default;

 private:
  std::vector<Element> elements_;
};

FiniteSubset singleton(const Element& e);
// Integer box prod_i [lo_i, hi_i) in Z^d.
FiniteSubset box(const std::vector<Coord>& lo, const std::vector<Coord>& hi);
// [0, side)^d.
FiniteSubset cube(std::size_t d, Coord side);

// {k·a : k in K, a in A}
FiniteSubset product_set(const Group& g, const FiniteSubset& k, const FiniteSubset& a);
// {a·t : a in A}
FiniteSubset right_translate(const Group& g, const FiniteSubset& a, const Element& t);
// {a^{-1} : a in A}
FiniteSubset inverse_set(const Group& g, const FiniteSubset& a);
// |A Δ B| on sorted sets.
std::size_t symmetric_difference_size(const FiniteSubset& a, const FiniteSubset& b);

// |KA Δ A| / |A|.
double invariance_defect(const Group& g, const FiniteSubset& a, const FiniteSubset& k);

// True iff invariance_defect(A, K) < delta.
bool is_invariant(const Group& g, const FiniteSubset& a, const FiniteSubset& k, double delta);

// n -> F_n for n >= 1.
struct FolnerSequence {
  std::string name;
  std::function<FiniteSubset(int)> generator;

  FiniteSubset operator()(int n) const;
};

// n -> [0, n)^d on Z^d. Throws for non-lattice groups.
FolnerSequence folner_boxes(const Group& g);
// n -> [0, n)^{d-1} x [0, 2n) on Z^d; a second family for cross-checks.
FolnerSequence folner_stretched(const Group& g);
// "boxes" or "stretched".
FolnerSequence make_folner(const Group& g, const std::string& name);

// max over 2 <= n <= up_to_n of |U_{k<n} F_k^{-1} F_n| / |F_n|.
double tempered_constant(const Group& g, const FolnerSequence& f, int up_to_n);

// Greedy tempered subsequence: scans n = 1..up_to_n and keeps n whenever
// |U_{kept k} F_k^{-1} F_n| <= c |F_n|.
std::vector<int> tempered_subsequence(const Group& g, const FolnerSequence& f, int up_to_n, double c);

// max over s in `generators` of |F_n Δ s F_n| / |F_n|.
double folner_defect(const Group& g, const FiniteSubset& fn, const std::vector<Element>& generators);

}  // namespace mdk
