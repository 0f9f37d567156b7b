#pragma once

// Data-parallel inner loops shared by the orbit-metric and rate-distortion
// code. Every kernel has a scalar reference implementation; AVX2 (x86-64)
// and NEON (aarch64) variants are selected at runtime and must agree with
// the reference (exactly for gathers, to rounding for reductions).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace mdk::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // a[i] *= b[i]
  void (*mul_inplace)(double* a, const double* b, std::size_t n);
  // out[j] += lut[idx[j]]
  void (*gather_add)(double* out, const double* lut, const std::uint32_t* idx, std::size_t n);
  // out[j] = max(out[j], lut[idx[j]])
  void (*gather_max)(double* out, const double* lut, const std::uint32_t* idx, std::size_t n);
  // max_i a[i]; n >= 1
  double (*max_value)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();

// Null when the ISA was not compiled in or the CPU lacks it.
const KernelTable* isa_table(Isa isa);

// The table used by the library. Defaults to the best ISA the CPU supports;
// the MDK_KERNELS environment variable ("scalar", "avx2", "neon") overrides.
const KernelTable& active();

// Forces a specific ISA for the rest of the process. Returns false (and
// leaves the selection unchanged) when the ISA is unavailable.
bool select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void mul_inplace(std::span<double> a, std::span<const double> b) {
  active().mul_inplace(a.data(), b.data(), a.size());
}

inline void gather_add(std::span<double> out, std::span<const double> lut,
                       std::span<const std::uint32_t> idx) {
  active().gather_add(out.data(), lut.data(), idx.data(), idx.size());
}

inline void gather_max(std::span<double> out, std::span<const double> lut,
                       std::span<const std::uint32_t> idx) {
  active().gather_max(out.data(), lut.data(), idx.data(), idx.size());
}

inline double max_value(std::span<const double> a) {
  return active().max_value(a.data(), a.size());
}

}  // namespace mdk::kernels
