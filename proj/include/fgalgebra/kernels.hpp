#pragma once

// Dense double-precision inner loops used by the algebra and statistics
// layers. Each kernel has a portable scalar reference and, on x86-64, an
// AVX2/FMA variant; the variant is picked once at runtime from CPUID.
//
// Setting FGALGEBRA_KERNELS=scalar in the environment forces the reference
// path. Results agree across variants up to summation-order rounding;
// a given variant is deterministic for a fixed input.

#include <cstddef>
#include <span>
#include <string_view>

namespace fga::kernels {

struct KernelTable {
  std::string_view name;
  // sum |x_i|
  double (*sum_abs)(const double* x, std::size_t n);
  // sum x_i * y_i
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y_i += a * x_i
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out_i = x_i - y_i
  void (*subtract)(const double* x, const double* y, double* out, std::size_t n);
};

const KernelTable& scalar() noexcept;

// nullptr when the build has no AVX2 variant or the CPU cannot run it.
const KernelTable* avx2() noexcept;

const KernelTable& active() noexcept;

inline double sum_abs(std::span<const double> x) { return active().sum_abs(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

inline void subtract(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  active().subtract(x.data(), y.data(), out.data(), x.size());
}

}  // namespace fga::kernels
