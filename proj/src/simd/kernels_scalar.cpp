#include <algorithm>
#include <cmath>
#include <limits>

#include "evbreak/simd/kernels.hpp"
#include "exp_floor.hpp"

namespace evbreak::simd {
namespace {

double floored_exp(double x) {
  if (x < detail::kExpFloor) return 0.0;
  return std::exp(std::min(x, detail::kExpCeil));
}

void exp_scaled_max_scalar(const double* const* cols, const double* coefs, std::size_t ncols,
                           std::size_t count, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    // exp is monotone, so the max is taken on the exponents.
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!std::isfinite(coefs[j])) continue;
      best = std::max(best, coefs[j] * cols[j][i]);
    }
    out[i] = floored_exp(best);
  }
}

void accumulate_scalar(const double* w, std::size_t w_stride, std::size_t rows, const double* xi,
                       std::size_t xi_stride, std::size_t count, std::size_t width, double* acc,
                       std::size_t acc_stride) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* a = acc + r * acc_stride;
    const double* wr = w + r * w_stride;
    for (std::size_t i = 0; i < count; ++i) {
      const double wi = wr[i];
      const double* x = xi + i * xi_stride;
      for (std::size_t b = 0; b < width; ++b) a[b] += wi * x[b];
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &exp_scaled_max_scalar, &accumulate_scalar};
  return table;
}

}  // namespace evbreak::simd
