#pragma once

// Shared inner loops of the Pickands, CUSUM and bootstrap code. Everything
// works on log pseudo-observations so that every power U^c becomes exp(c log U).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "evbreak/ranks.hpp"
#include "evbreak/simd/kernels.hpp"

namespace evbreak::detail {

/// Log pseudo-observations of one window, column-major.
struct LogBlock {
  const double* logs = nullptr;
  std::size_t rows = 0;
  std::size_t dim = 0;

  const double* column(std::size_t j) const { return logs + j * rows; }
};

inline constexpr std::size_t kMaxDim = 64;

/// Neumaier-compensated mean.
inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  double carry = 0.0;
  for (double v : x) {
    const double next = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - next) + v : (v - next) + sum;
    sum = next;
  }
  return (sum + carry) / static_cast<double>(x.size());
}

/// (t_1, ..., t_d) from (t_2, ..., t_d); t_1 = 1 - sum, accumulated from 0.
inline void full_coordinates(std::span<const double> t, double* full) {
  double rest = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    rest += t[j];
    full[j + 1] = t[j];
  }
  full[0] = std::max(0.0, 1.0 - rest);
}

/// out[i] = max_j U_ij^{1/t_j}.
inline void maxima(const simd::KernelTable& k, const LogBlock& b, std::span<const double> t, double* out) {
  double full[kMaxDim];
  double coefs[kMaxDim];
  const double* cols[kMaxDim];
  full_coordinates(t, full);
  for (std::size_t j = 0; j < b.dim; ++j) {
    coefs[j] = full[j] > 0.0 ? 1.0 / full[j] : std::numeric_limits<double>::infinity();
    cols[j] = b.column(j);
  }
  k.exp_scaled_max(cols, coefs, b.dim, b.rows, out);
}

/// out[i] = exp(coef * log U_ij); a non-finite coefficient gives 0.
inline void powered(const simd::KernelTable& k, const LogBlock& b, std::size_t j, double coef, double* out) {
  const double* col = b.column(j);
  k.exp_scaled_max(&col, &coef, 1, b.rows, out);
}

inline double s_value(const simd::KernelTable& k, const LogBlock& b, std::span<const double> t,
                      std::vector<double>& scratch) {
  if (b.rows == 0) return 0.0;
  scratch.resize(b.rows);
  maxima(k, b, t, scratch.data());
  return mean({scratch.data(), b.rows});
}

inline double a_from_s(double s) { return s / (1.0 - s); }

inline double a_value(const simd::KernelTable& k, const LogBlock& b, std::span<const double> t,
                      std::vector<double>& scratch) {
  return a_from_s(s_value(k, b, t, scratch));
}

inline double clamp_unit(double x) { return std::min(std::max(x, -1.0), 1.0); }

/// d = 2 stencil: centre clamp(t, h, 1 - h), step h.
inline double derivative_bivariate(const simd::KernelTable& k, const LogBlock& b, double t, double h,
                                   std::vector<double>& scratch) {
  const double c = std::clamp(t, h, 1.0 - h);
  const double hi = c + h;
  const double lo = c - h;
  const double a_hi = a_value(k, b, {&hi, 1}, scratch);
  const double a_lo = a_value(k, b, {&lo, 1}, scratch);
  return clamp_unit((a_hi - a_lo) / (2.0 * h));
}

/// General stencil along coordinate `axis` of (t_2, ..., t_d). The coordinate
/// can move within [0, room] where room = 1 - (other coordinates of t);
/// the centre is clamped to [h, room - h], and when room < 2h the stencil
/// shrinks to the whole admissible segment.
inline double derivative_axis(const simd::KernelTable& k, const LogBlock& b, std::span<const double> t,
                              std::size_t axis, double h, std::vector<double>& scratch) {
  double others = 0.0;
  for (std::size_t c = 0; c < t.size(); ++c)
    if (c != axis) others += t[c];
  const double room = 1.0 - others;
  double centre = 0.0;
  double step = h;
  if (room <= 0.0) return 0.0;
  if (room < 2.0 * h) {
    centre = 0.5 * room;
    step = 0.5 * room;
  } else {
    centre = std::clamp(t[axis], h, room - h);
  }
  double point[kMaxDim];
  std::copy(t.begin(), t.end(), point);
  point[axis] = centre + step;
  const double a_hi = a_value(k, b, {point, t.size()}, scratch);
  point[axis] = centre - step;
  const double a_lo = a_value(k, b, {point, t.size()}, scratch);
  return clamp_unit((a_hi - a_lo) / (2.0 * step));
}

/// Log pseudo-observations of a block as an owned buffer.
inline std::vector<double> block_logs(const PseudoObsBlock& block) {
  std::vector<double> logs(block.values.size());
  std::transform(block.values.begin(), block.values.end(), logs.begin(), [](double u) { return std::log(u); });
  return logs;
}

}  // namespace evbreak::detail
