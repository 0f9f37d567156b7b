#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "mdimkit/kernels.hpp"
#include "mdimkit/spaces.hpp"
#include "support.hpp"

using namespace mdk;
using namespace mdk::kernels;

namespace {

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (const KernelTable* t = isa_table(isa)) out.push_back(t);
  }
  return out;
}

std::vector<double> randoms(test::Gen& gen, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * gen.uniform();
  return v;
}

}  // namespace

TEST_CASE("selection") {
  CHECK(isa_table(Isa::Scalar) == &scalar_table());
  const char* env = std::getenv("MDK_KERNELS");
  if (env && std::string(env) == "scalar") CHECK(active().isa == Isa::Scalar);
  MESSAGE("active kernels: " << isa_name(active().isa));
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const KernelTable& ref = scalar_table();
  test::Gen gen(42);
  for (const KernelTable* t : vector_tables()) {
    INFO(isa_name(t->isa));
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 100u, 1023u}) {
      const auto a = randoms(gen, n, -1.0, 1.0);
      const auto b = randoms(gen, n, -1.0, 1.0);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * (mag + 1.0));

      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      t->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15);

      auto m1 = a, m2 = a;
      ref.mul_inplace(m1.data(), b.data(), n);
      t->mul_inplace(m2.data(), b.data(), n);
      CHECK(m1 == m2);

      CHECK(t->max_value(a.data(), n) == ref.max_value(a.data(), n));

      const auto lut = randoms(gen, 17, 0.0, 2.0);
      std::vector<std::uint32_t> idx(n);
      for (auto& i : idx) i = static_cast<std::uint32_t>(gen.below(lut.size()));
      auto g1 = a, g2 = a;
      ref.gather_add(g1.data(), lut.data(), idx.data(), n);
      t->gather_add(g2.data(), lut.data(), idx.data(), n);
      CHECK(g1 == g2);
      auto h1 = a, h2 = a;
      ref.gather_max(h1.data(), lut.data(), idx.data(), n);
      t->gather_max(h2.data(), lut.data(), idx.data(), n);
      CHECK(h1 == h2);
    }
  }
}

TEST_CASE("orbit metric rows are identical under every table") {
  test::Gen gen(8);
  const Alphabet a = grid_alphabet(12);
  const PointSet pts = PointSet::all(a.size(), 2);
  std::vector<std::vector<double>> rows;
  std::vector<Isa> isas{Isa::Scalar};
  for (const KernelTable* t : vector_tables()) isas.push_back(t->isa);
  const Isa original = active().isa;
  for (MetricKind kind : {MetricKind::Max, MetricKind::Average}) {
    const OrbitMetric m(kind, a, 2);
    const Configuration x{static_cast<std::uint32_t>(gen.below(13)), static_cast<std::uint32_t>(gen.below(13))};
    std::vector<double> base;
    for (Isa isa : isas) {
      REQUIRE(select(isa));
      std::vector<double> out(pts.size());
      m.row(x, pts, out);
      if (base.empty()) {
        base = out;
      } else {
        CHECK(out == base);
      }
    }
  }
  select(original);
}
