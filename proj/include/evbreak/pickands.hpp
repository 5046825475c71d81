#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evbreak/ranks.hpp"
#include "evbreak/sample.hpp"

namespace evbreak {

/// Points of the unit simplex for dimension d, each stored as its last d - 1
/// coordinates (t_2, ..., t_d). For d = 2 a point is the scalar t.
class SimplexGrid {
 public:
  SimplexGrid() = default;
  /// `coords` is row-major, (dim - 1) entries per point. Validates every point.
  SimplexGrid(std::size_t dim, std::vector<double> coords);
  static SimplexGrid bivariate(std::vector<double> ts);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ < 2 ? 0 : coords_.size() / (dim_ - 1); }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * (dim_ - 1), dim_ - 1};
  }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_ = 2;
  std::vector<double> coords_;
};

/// 0.01 / sqrt(n).
double default_bandwidth(std::size_t n);
/// Throws std::invalid_argument unless 0 < h < 1/2.
void check_bandwidth(double h);

struct PickandsEstimate {
  Window window;
  SimplexGrid grid;
  std::vector<double> s_values;
  std::vector<double> a_values;  // s / (1 - s) pointwise
};

struct DerivativeEstimate {
  Window window;
  SimplexGrid grid;
  double bandwidth = 0.0;
  /// Row-major, d - 1 partial derivatives per grid point, each in [-1, 1].
  std::vector<double> values;
};

/// Mean over the block of max_j U_ij^{1/t_j} with u^{1/0} = 0. Empty block gives 0.
double subsample_S(const PseudoObsBlock& block, std::span<const double> t);
inline double subsample_S(const PseudoObsBlock& block, double t) {
  return subsample_S(block, std::span<const double>(&t, 1));
}

/// S / (1 - S). Throws std::domain_error for an empty block.
double subsample_A(const PseudoObsBlock& block, std::span<const double> t);
inline double subsample_A(const PseudoObsBlock& block, double t) {
  return subsample_A(block, std::span<const double>(&t, 1));
}

/// Batch evaluation over a grid; shares the log-transform of the block across points.
PickandsEstimate estimate_pickands(const PseudoObsBlock& block, const SimplexGrid& grid);

/// Break-adapted estimator as a convex combination of plain estimators on the
/// pieces of the window, weighted by piece size.
double subsample_S_theta(const Sample& sample, const BreakSpec& breaks, Window w, std::span<const double> t);
inline double subsample_S_theta(const Sample& sample, const BreakSpec& breaks, Window w, double t) {
  return subsample_S_theta(sample, breaks, w, std::span<const double>(&t, 1));
}
double subsample_A_theta(const Sample& sample, const BreakSpec& breaks, Window w, std::span<const double> t);
inline double subsample_A_theta(const Sample& sample, const BreakSpec& breaks, Window w, double t) {
  return subsample_A_theta(sample, breaks, w, std::span<const double>(&t, 1));
}

/// Central difference of A at clamp(t, h, 1 - h) with step h, clamped to [-1, 1].
double derivative_A(const PseudoObsBlock& block, double t, double h);

/// Partial derivative along coordinate `axis` of (t_2, ..., t_d) (axis 0 is
/// margin 2), with t_1 absorbing the change. The stencil centre is clamped so
/// that both stencil points stay in the simplex; the result is clamped to [-1, 1].
double derivative_A_d(const PseudoObsBlock& block, std::span<const double> t, std::size_t axis, double h);

DerivativeEstimate estimate_derivatives(const PseudoObsBlock& block, const SimplexGrid& grid, double h);

}  // namespace evbreak
