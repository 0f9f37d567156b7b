#include "kernels_impl.hpp"

#include <arm_neon.h>

#include <algorithm>

namespace mdk::kernels::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul_neon(double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) a[i] *= b[i];
}

// NEON has no gather; the lanes are loaded individually.
void gather_add_neon(double* out, const double* lut, const std::uint32_t* idx, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t g = vsetq_lane_f64(lut[idx[j + 1]], vdupq_n_f64(lut[idx[j]]), 1);
    vst1q_f64(out + j, vaddq_f64(vld1q_f64(out + j), g));
  }
  for (; j < n; ++j) out[j] += lut[idx[j]];
}

void gather_max_neon(double* out, const double* lut, const std::uint32_t* idx, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t g = vsetq_lane_f64(lut[idx[j + 1]], vdupq_n_f64(lut[idx[j]]), 1);
    vst1q_f64(out + j, vmaxq_f64(vld1q_f64(out + j), g));
  }
  for (; j < n; ++j) out[j] = std::max(out[j], lut[idx[j]]);
}

double max_neon(const double* a, std::size_t n) {
  double m = a[0];
  std::size_t i = 1;
  if (n >= 2) {
    float64x2_t acc = vld1q_f64(a);
    for (i = 2; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(a + i));
    m = vmaxvq_f64(acc);
  }
  for (; i < n; ++i) m = std::max(m, a[i]);
  return m;
}

}  // namespace

const KernelTable kNeonTable{
    Isa::Neon, dot_neon, axpy_neon, mul_neon, gather_add_neon, gather_max_neon, max_neon,
};

}  // namespace mdk::kernels::detail
