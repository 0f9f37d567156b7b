#include <doctest.h>

#include <set>

#include "mdimkit/groups.hpp"
#include "support.hpp"

using namespace mdk;

namespace {

FiniteSubset interval(Coord lo, Coord hi) {
  std::vector<Element> es;
  for (Coord i = lo; i < hi; ++i) es.push_back({i});
  return FiniteSubset(es);
}

// |U_{k<n} F_k^{-1} F_n| / |F_n| for lattice boxes, by listing differences.
double tempered_oracle(const FolnerSequence& f, int n) {
  std::set<Element> acc;
  const FiniteSubset fn = f(n);
  for (int k = 1; k < n; ++k) {
    for (const auto& a : f(k)) {
      for (const auto& b : fn) {
        Element d(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) d[i] = b[i] - a[i];
        acc.insert(d);
      }
    }
  }
  return static_cast<double>(acc.size()) / static_cast<double>(fn.size());
}

}  // namespace

TEST_CASE("invariance defect examples") {
  const GroupPtr z = make_group("Z");
  CHECK(invariance_defect(*z, interval(0, 100), interval(-1, 2)) == 0.02);
  CHECK(invariance_defect(*z, singleton({0}), singleton({0})) == 0.0);

  const GroupPtr z2 = make_group("Z2");
  const FiniteSubset a = box({0, 0}, {10, 10});
  const FiniteSubset k({{0, 0}, {1, 0}, {0, 1}});
  CHECK(invariance_defect(*z2, a, k) == 0.2);

  CHECK(is_invariant(*z, interval(0, 100), interval(-1, 2), 0.05));
  CHECK_FALSE(is_invariant(*z, interval(0, 100), interval(-1, 2), 0.01));
  CHECK(is_invariant(*z, interval(0, 100), singleton({0}), 1e-12));
}

TEST_CASE("empty subsets are rejected") {
  CHECK_THROWS_AS(FiniteSubset(std::vector<Element>{}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteSubset({{0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("tempered constant") {
  const GroupPtr z = make_group("Z");
  const FolnerSequence f = folner_boxes(*z);
  // k < n: F_1^{-1} F_2 = {0, 1}.
  CHECK(tempered_constant(*z, f, 2) == doctest::Approx(1.0));
  CHECK(tempered_constant(*z, f, 3) == doctest::Approx(4.0 / 3.0));

  const FolnerSequence trivial{"trivial", [](int) { return singleton({0}); }};
  CHECK(tempered_constant(*z, trivial, 5) == doctest::Approx(1.0));

  const GroupPtr z2 = make_group("Z2");
  const FolnerSequence f2 = folner_boxes(*z2);
  double oracle = 0.0;
  for (int n = 2; n <= 4; ++n) oracle = std::max(oracle, tempered_oracle(f2, n));
  CHECK(tempered_constant(*z2, f2, 4) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(36.0 / 16.0));

  double prev = 0.0;
  for (int up = 2; up <= 8; ++up) {
    const double c = tempered_constant(*z, f, up);
    CHECK(c >= prev);
    prev = c;
  }
  for (int n : tempered_subsequence(*z, f, 20, 2.0)) {
    CHECK(n >= 1);
  }
}

TEST_CASE("folner boxes") {
  const GroupPtr z = make_group("Z");
  const GroupPtr z2 = make_group("Z2");
  CHECK(folner_boxes(*z)(3) == interval(0, 3));
  CHECK(folner_boxes(*z)(1) == singleton({0}));
  CHECK(folner_boxes(*z2)(2) == box({0, 0}, {2, 2}));
  CHECK(folner_stretched(*z2)(2) == box({0, 0}, {2, 4}));
  CHECK_THROWS(folner_boxes(*make_heisenberg()));

  // Defect decreases along doubling once n exceeds the diameter of K.
  const FiniteSubset k({{-1, 0}, {0, 0}, {2, 1}});
  const FolnerSequence f = folner_boxes(*z2);
  for (int n = 3; n <= 12; ++n) {
    CHECK(invariance_defect(*z2, f(2 * n), k) <= invariance_defect(*z2, f(n), k));
  }
}

TEST_CASE("defect is invariant under right translation") {
  test::Gen gen(11);
  for (const char* name : {"Z", "Z2", "Heisenberg"}) {
    const GroupPtr g = make_group(name);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Element> as, ks;
      for (int i = 0; i < 12; ++i) {
        Element e(g->rank());
        for (auto& c : e) c = gen.between(-3, 3);
        as.push_back(e);
      }
      for (int i = 0; i < 3; ++i) {
        Element e(g->rank());
        for (auto& c : e) c = gen.between(-2, 2);
        ks.push_back(e);
      }
      Element t(g->rank());
      for (auto& c : t) c = gen.between(-5, 5);
      const FiniteSubset a(as), k(ks);
      CHECK(invariance_defect(*g, right_translate(*g, a, t), k) == doctest::Approx(invariance_defect(*g, a, k)));
    }
  }
}

TEST_CASE("group axioms on random triples") {
  test::Gen gen(5);
  for (const char* name : {"Z", "Z2", "Z3", "Heisenberg"}) {
    const GroupPtr g = make_group(name);
    auto draw = [&] {
      Element e(g->rank());
      for (auto& c : e) c = gen.between(-20, 20);
      return e;
    };
    for (int i = 0; i < 500; ++i) {
      const Element a = draw(), b = draw(), c = draw();
      CHECK(g->multiply(g->multiply(a, b), c) == g->multiply(a, g->multiply(b, c)));
      CHECK(g->multiply(a, g->inverse(a)) == g->identity());
      CHECK(g->multiply(g->inverse(a), a) == g->identity());
      CHECK(g->multiply(a, g->identity()) == a);
    }
  }
  // Heisenberg is not abelian.
  const GroupPtr h = make_heisenberg();
  CHECK(h->multiply({1, 0, 0}, {0, 1, 0}) != h->multiply({0, 1, 0}, {1, 0, 0}));
}

TEST_CASE("named groups") {
  CHECK(make_group("Z")->lattice_rank() == 1);
  CHECK(make_group("Zd:4")->lattice_rank() == 4);
  CHECK(make_group("Heisenberg")->lattice_rank() == 0);
  CHECK_THROWS_AS(make_group("Q"), std::invalid_argument);
}

TEST_CASE("user rule groups") {
  // Z/5 written additively on {0..4}.
  GroupRule rule{"Z5", 1, {0},
                 [](const Element& a, const Element& b) { return Element{(a[0] + b[0]) % 5}; },
                 [](const Element& a) { return Element{(5 - a[0]) % 5}; }};
  const GroupPtr g = make_rule_group(rule);
  CHECK(g->multiply({3}, {4}) == Element{2});
  CHECK(g->inverse({2}) == Element{3});
  const FiniteSubset all({{0}, {1}, {2}, {3}, {4}});
  CHECK(invariance_defect(*g, all, FiniteSubset({{1}, {2}})) == 0.0);
}
