#include "evbreak/pickands.hpp"

#include <cmath>
#include <stdexcept>

#include "estimator_core.hpp"
#include "evbreak/copula_lab.hpp"

namespace evbreak {

SimplexGrid::SimplexGrid(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim < 2 || dim > detail::kMaxDim) throw std::invalid_argument("grid dimension must lie in [2, 64]");
  if (coords_.size() % (dim - 1) != 0) throw std::invalid_argument("grid coordinates do not split into points");
  for (std::size_t i = 0; i < size(); ++i) check_simplex_point(point(i));
}

SimplexGrid SimplexGrid::bivariate(std::vector<double> ts) { return SimplexGrid(2, std::move(ts)); }

double default_bandwidth(std::size_t n) {
  if (n == 0) throw std::invalid_argument("bandwidth needs n >= 1");
  return 0.01 / std::sqrt(static_cast<double>(n));
}

void check_bandwidth(double h) {
  if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("bandwidth must lie in (0, 1/2)");
}

namespace {

void check_point(const PseudoObsBlock& block, std::span<const double> t) {
  if (block.dim < 2 || block.dim > detail::kMaxDim) throw std::invalid_argument("block dimension must lie in [2, 64]");
  if (t.size() + 1 != block.dim) throw std::invalid_argument("simplex point dimension does not match the block");
  check_simplex_point(t);
}

detail::LogBlock view(const PseudoObsBlock& block, const std::vector<double>& logs) {
  return {logs.data(), block.rows(), block.dim};
}

}  // namespace

double subsample_S(const PseudoObsBlock& block, std::span<const double> t) {
  check_point(block, t);
  if (block.empty()) return 0.0;
  const auto logs = detail::block_logs(block);
  std::vector<double> scratch;
  return detail::s_value(simd::active_kernels(), view(block, logs), t, scratch);
}

double subsample_A(const PseudoObsBlock& block, std::span<const double> t) {
  if (block.empty()) throw std::domain_error("Pickands estimator on an empty window");
  return detail::a_from_s(subsample_S(block, t));
}

PickandsEstimate estimate_pickands(const PseudoObsBlock& block, const SimplexGrid& grid) {
  if (grid.dim() != block.dim) throw std::invalid_argument("grid dimension does not match the block");
  if (block.empty()) throw std::domain_error("Pickands estimator on an empty window");
  PickandsEstimate est{block.window, grid, {}, {}};
  const auto logs = detail::block_logs(block);
  const auto& kernels = simd::active_kernels();
  std::vector<double> scratch;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double s = detail::s_value(kernels, view(block, logs), grid.point(p), scratch);
    est.s_values.push_back(s);
    est.a_values.push_back(detail::a_from_s(s));
  }
  return est;
}

double subsample_S_theta(const Sample& sample, const BreakSpec& breaks, Window w, std::span<const double> t) {
  if (w.empty()) return 0.0;
  const double total = static_cast<double>(w.size());
  double s = 0.0;
  for (const Window& piece : breaks.split(w))
    s += static_cast<double>(piece.size()) / total * subsample_S(pseudo_obs(sample, piece), t);
  return s;
}

double subsample_A_theta(const Sample& sample, const BreakSpec& breaks, Window w, std::span<const double> t) {
  if (w.empty()) throw std::domain_error("Pickands estimator on an empty window");
  return detail::a_from_s(subsample_S_theta(sample, breaks, w, t));
}

double derivative_A(const PseudoObsBlock& block, double t, double h) {
  check_bandwidth(h);
  check_point(block, {&t, 1});
  if (block.empty()) throw std::domain_error("derivative on an empty window");
  const auto logs = detail::block_logs(block);
  std::vector<double> scratch;
  return detail::derivative_bivariate(simd::active_kernels(), view(block, logs), t, h, scratch);
}

double derivative_A_d(const PseudoObsBlock& block, std::span<const double> t, std::size_t axis, double h) {
  check_bandwidth(h);
  check_point(block, t);
  if (axis >= t.size()) throw std::out_of_range("derivative axis exceeds the dimension");
  if (block.empty()) throw std::domain_error("derivative on an empty window");
  const auto logs = detail::block_logs(block);
  std::vector<double> scratch;
  return detail::derivative_axis(simd::active_kernels(), view(block, logs), t, axis, h, scratch);
}

DerivativeEstimate estimate_derivatives(const PseudoObsBlock& block, const SimplexGrid& grid, double h) {
  check_bandwidth(h);
  if (grid.dim() != block.dim) throw std::invalid_argument("grid dimension does not match the block");
  if (block.empty()) throw std::domain_error("derivative on an empty window");
  DerivativeEstimate est{block.window, grid, h, {}};
  const auto logs = detail::block_logs(block);
  const auto& kernels = simd::active_kernels();
  std::vector<double> scratch;
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (std::size_t axis = 0; axis + 1 < grid.dim(); ++axis)
      est.values.push_back(detail::derivative_axis(kernels, view(block, logs), grid.point(p), axis, h, scratch));
  return est;
}

}  // namespace evbreak
