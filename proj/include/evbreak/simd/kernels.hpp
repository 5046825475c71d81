#pragma once

#include <cstddef>
#include <string_view>

namespace evbreak::simd {

// Hot loops of the estimators. Every table entry has a scalar reference
// implementation; vector variants must agree with it to a few ulp.
struct KernelTable {
  std::string_view name;

  // out[i] = max_j exp(coefs[j] * cols[j][i]) for i < count, and 0 when no
  // coefficient is finite.
  // A non-finite coefficient marks a column whose contribution is 0 (the
  // u^{1/0} = 0 convention). Inputs are logarithms of values in (0,1).
  void (*exp_scaled_max)(const double* const* cols, const double* coefs, std::size_t ncols,
                         std::size_t count, double* out);

  // acc[r * acc_stride + b] += sum_{i < count} w[r * w_stride + i] * xi[i * xi_stride + b]
  // for r < rows and b < width.
  void (*accumulate)(const double* w, std::size_t w_stride, std::size_t rows, const double* xi,
                     std::size_t xi_stride, std::size_t count, std::size_t width, double* acc,
                     std::size_t acc_stride);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA variant, or nullptr when the CPU or build lacks it.
const KernelTable* avx2_kernels();

/// Kernels used by the library: the best available variant, unless the
/// EVBREAK_KERNELS environment variable is set to "scalar".
const KernelTable& active_kernels();

}  // namespace evbreak::simd
