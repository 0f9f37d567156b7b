#include "kernels_impl.hpp"

#include <algorithm>

namespace mdk::kernels::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_scalar(double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void gather_add_scalar(double* out, const double* lut, const std::uint32_t* idx, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] += lut[idx[j]];
}

void gather_max_scalar(double* out, const double* lut, const std::uint32_t* idx, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = std::max(out[j], lut[idx[j]]);
}

double max_scalar(const double* a, std::size_t n) {
  double m = a[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

}  // namespace

const KernelTable kScalarTable{
    Isa::Scalar, dot_scalar, axpy_scalar, mul_scalar, gather_add_scalar, gather_max_scalar, max_scalar,
};

}  // namespace mdk::kernels::detail
