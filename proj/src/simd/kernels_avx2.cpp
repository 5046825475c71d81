// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "evbreak/simd/kernels.hpp"
#include "exp_floor.hpp"

namespace evbreak::simd {
namespace avx2 {
namespace {

// Cephes-style exp: range reduction by ln 2 in two parts, rational
// approximation on [-ln2/2, ln2/2], exponent rebuilt from integer bits.
inline __m256d exp_pd(__m256d x) {
  const __m256d floor_v = _mm256_set1_pd(detail::kExpFloor);
  const __m256d dead = _mm256_cmp_pd(x, floor_v, _CMP_LT_OQ);
  x = _mm256_max_pd(x, floor_v);
  x = _mm256_min_pd(x, _mm256_set1_pd(detail::kExpCeil));

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  __m256d n = _mm256_floor_pd(_mm256_add_pd(_mm256_mul_pd(x, log2e), _mm256_set1_pd(0.5)));
  x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125e-1)));
  x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212e-6)));

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009e0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(r, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // 2^n via the 1.5 * 2^52 trick: n + 1023 lands in the low mantissa bits.
  const __m256d shifted = _mm256_add_pd(n, _mm256_set1_pd(6755399441055744.0 + 1023.0));
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(shifted), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(dead, r);
}

inline __m256d max_block(const double* const* cols, const double* coefs, std::size_t ncols,
                         std::size_t i) {
  __m256d best = _mm256_set1_pd(-HUGE_VAL);
  for (std::size_t j = 0; j < ncols; ++j) {
    if (!std::isfinite(coefs[j])) continue;
    const __m256d x = _mm256_mul_pd(_mm256_set1_pd(coefs[j]), _mm256_loadu_pd(cols[j] + i));
    best = _mm256_max_pd(best, x);
  }
  return exp_pd(best);
}

void exp_scaled_max(const double* const* cols, const double* coefs, std::size_t ncols,
                    std::size_t count, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) _mm256_storeu_pd(out + i, max_block(cols, coefs, ncols, i));
  if (i == count) return;

  // Tail goes through the same vector path on a padded copy, so each element's
  // value does not depend on its position in the array.
  constexpr std::size_t kMaxCols = 64;
  const std::size_t rest = count - i;
  alignas(32) double pad[kMaxCols][4];
  const double* pad_cols[kMaxCols];
  for (std::size_t j = 0; j < ncols && j < kMaxCols; ++j) {
    pad[j][0] = pad[j][1] = pad[j][2] = pad[j][3] = 0.0;
    std::memcpy(pad[j], cols[j] + i, rest * sizeof(double));
    pad_cols[j] = pad[j];
  }
  alignas(32) double res[4];
  _mm256_store_pd(res, max_block(pad_cols, coefs, ncols < kMaxCols ? ncols : kMaxCols, 0));
  std::memcpy(out + i, res, rest * sizeof(double));
}

void accumulate(const double* w, std::size_t w_stride, std::size_t rows, const double* xi,
                std::size_t xi_stride, std::size_t count, std::size_t width, double* acc,
                std::size_t acc_stride) {
  std::size_t b = 0;
  // 3 rows x 12 columns: nine accumulators stay in registers.
  for (; b + 12 <= width; b += 12) {
    std::size_t r = 0;
    for (; r + 3 <= rows; r += 3) {
      double* a0 = acc + r * acc_stride + b;
      double* a1 = a0 + acc_stride;
      double* a2 = a1 + acc_stride;
      __m256d c00 = _mm256_loadu_pd(a0), c01 = _mm256_loadu_pd(a0 + 4), c02 = _mm256_loadu_pd(a0 + 8);
      __m256d c10 = _mm256_loadu_pd(a1), c11 = _mm256_loadu_pd(a1 + 4), c12 = _mm256_loadu_pd(a1 + 8);
      __m256d c20 = _mm256_loadu_pd(a2), c21 = _mm256_loadu_pd(a2 + 4), c22 = _mm256_loadu_pd(a2 + 8);
      const double* w0 = w + r * w_stride;
      const double* w1 = w0 + w_stride;
      const double* w2 = w1 + w_stride;
      for (std::size_t i = 0; i < count; ++i) {
        const double* x = xi + i * xi_stride + b;
        const __m256d x0 = _mm256_loadu_pd(x), x1 = _mm256_loadu_pd(x + 4), x2 = _mm256_loadu_pd(x + 8);
        __m256d s = _mm256_broadcast_sd(w0 + i);
        c00 = _mm256_fmadd_pd(s, x0, c00);
        c01 = _mm256_fmadd_pd(s, x1, c01);
        c02 = _mm256_fmadd_pd(s, x2, c02);
        s = _mm256_broadcast_sd(w1 + i);
        c10 = _mm256_fmadd_pd(s, x0, c10);
        c11 = _mm256_fmadd_pd(s, x1, c11);
        c12 = _mm256_fmadd_pd(s, x2, c12);
        s = _mm256_broadcast_sd(w2 + i);
        c20 = _mm256_fmadd_pd(s, x0, c20);
        c21 = _mm256_fmadd_pd(s, x1, c21);
        c22 = _mm256_fmadd_pd(s, x2, c22);
      }
      _mm256_storeu_pd(a0, c00), _mm256_storeu_pd(a0 + 4, c01), _mm256_storeu_pd(a0 + 8, c02);
      _mm256_storeu_pd(a1, c10), _mm256_storeu_pd(a1 + 4, c11), _mm256_storeu_pd(a1 + 8, c12);
      _mm256_storeu_pd(a2, c20), _mm256_storeu_pd(a2 + 4, c21), _mm256_storeu_pd(a2 + 8, c22);
    }
    for (; r < rows; ++r) {
      double* a = acc + r * acc_stride + b;
      __m256d c0 = _mm256_loadu_pd(a), c1 = _mm256_loadu_pd(a + 4), c2 = _mm256_loadu_pd(a + 8);
      const double* wr = w + r * w_stride;
      for (std::size_t i = 0; i < count; ++i) {
        const double* x = xi + i * xi_stride + b;
        const __m256d s = _mm256_broadcast_sd(wr + i);
        c0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(x), c0);
        c1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(x + 4), c1);
        c2 = _mm256_fmadd_pd(s, _mm256_loadu_pd(x + 8), c2);
      }
      _mm256_storeu_pd(a, c0), _mm256_storeu_pd(a + 4, c1), _mm256_storeu_pd(a + 8, c2);
    }
  }
  for (; b + 4 <= width; b += 4) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* a = acc + r * acc_stride + b;
      __m256d c = _mm256_loadu_pd(a);
      const double* wr = w + r * w_stride;
      for (std::size_t i = 0; i < count; ++i)
        c = _mm256_fmadd_pd(_mm256_broadcast_sd(wr + i), _mm256_loadu_pd(xi + i * xi_stride + b), c);
      _mm256_storeu_pd(a, c);
    }
  }
  for (; b < width; ++b) {
    for (std::size_t r = 0; r < rows; ++r) {
      double c = acc[r * acc_stride + b];
      const double* wr = w + r * w_stride;
      for (std::size_t i = 0; i < count; ++i) c = std::fma(wr[i], xi[i * xi_stride + b], c);
      acc[r * acc_stride + b] = c;
    }
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", &exp_scaled_max, &accumulate};
  return t;
}

}  // namespace avx2
}  // namespace evbreak::simd
