#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "evbreak/pickands.hpp"
#include "evbreak/ranks.hpp"
#include "evbreak/sample.hpp"

namespace evbreak {

/// Finite measure sum_p weights[p] * delta_{grid point p}.
struct GridMeasure {
  SimplexGrid grid;
  std::vector<double> weights;

  void validate() const;
  std::size_t dim() const { return grid.dim(); }
  std::size_t size() const { return grid.size(); }

  /// Equal weights 1/T on the points of `grid`.
  static GridMeasure uniform(SimplexGrid grid);
  /// d = 2: uniform on {0.1, ..., 0.9}. d > 2: uniform on the simplex points
  /// whose d coordinates are all positive multiples of 0.1.
  static GridMeasure default_for(std::size_t d);
};

/// Sum_p w_p D_p^2, accumulated in grid order.
double integrate_squared(const GridMeasure& mu, const double* values);

/// CUSUM process on {k/n : k = 1..n-1} x grid.
struct CusumField {
  std::size_t n = 0;
  GridMeasure measure;
  std::vector<double> values;      // row k - 1 holds D(k/n, .) over the grid
  std::vector<double> integrated;  // entry k - 1 is the mu-integral of D(k/n, .)^2
  double statistic = 0.0;
  std::size_t argmax_k = 0;

  double at(std::size_t k, std::size_t p) const { return values[(k - 1) * measure.size() + p]; }
};

struct MaxStatistic {
  double value = 0.0;
  std::size_t argmax_k = 0;
};

/// D(k/n, t) = k(n - k)/n^{3/2} {A_{1:k}(t) - A_{k+1:n}(t)} for k = 1..n-1, with
/// break-adapted pseudo-observations when `breaks` is non-null and non-empty.
/// Throws std::invalid_argument for n < 2 or a grid of the wrong dimension.
CusumField cusum_field(const Sample& sample, const GridMeasure& mu, const BreakSpec* breaks = nullptr);

/// Max over k of the integrated squares; ties go to the smallest k.
MaxStatistic statistic_max(const CusumField& field);
/// The integrated square at k_star alone. Throws std::out_of_range unless 1 <= k_star < n.
double statistic_at(const CusumField& field, std::size_t k_star);

/// Long format, one line per (k, grid point): s = k/n, the point's
/// coordinates t2..td, and D.
void write_field_csv(const CusumField& field, std::ostream& out);

}  // namespace evbreak
