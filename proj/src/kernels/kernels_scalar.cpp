#include "kernels_internal.hpp"

#include <cmath>

namespace fga::kernels::detail {

namespace {

double sum_abs_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void subtract_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{"scalar", sum_abs_scalar, dot_scalar, axpy_scalar, subtract_scalar};
  return table;
}

}  // namespace fga::kernels::detail
