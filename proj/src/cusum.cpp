#include "evbreak/cusum.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "estimator_core.hpp"

namespace evbreak {

void GridMeasure::validate() const {
  if (grid.size() == 0) throw std::invalid_argument("grid measure has no support points");
  if (weights.size() != grid.size()) throw std::invalid_argument("grid measure needs one weight per point");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("grid weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("grid weights must not all vanish");
}

GridMeasure GridMeasure::uniform(SimplexGrid grid) {
  const std::size_t T = grid.size();
  if (T == 0) throw std::invalid_argument("grid measure has no support points");
  return {std::move(grid), std::vector<double>(T, 1.0 / static_cast<double>(T))};
}

namespace {

// All compositions of `remaining` tenths into `slots` positive parts.
void lattice(std::size_t slots, int remaining, std::vector<int>& current, std::vector<double>& coords) {
  if (slots == 1) {
    // current holds parts 2..d; the implicit first part is `remaining`.
    if (remaining < 1) return;
    for (int part : current) coords.push_back(part / 10.0);
    return;
  }
  for (int part = 1; part < remaining; ++part) {
    current.push_back(part);
    lattice(slots - 1, remaining - part, current, coords);
    current.pop_back();
  }
}

}  // namespace

GridMeasure GridMeasure::default_for(std::size_t d) {
  if (d < 2) throw std::invalid_argument("grid dimension must be at least 2");
  if (d > 10) throw std::invalid_argument("the default lattice with step 0.1 has no interior point for d > 10");
  std::vector<double> coords;
  std::vector<int> current;
  lattice(d, 10, current, coords);
  return uniform(SimplexGrid(d, std::move(coords)));
}

double integrate_squared(const GridMeasure& mu, const double* values) {
  double acc = 0.0;
  for (std::size_t p = 0; p < mu.weights.size(); ++p) acc += mu.weights[p] * (values[p] * values[p]);
  return acc;
}

CusumField cusum_field(const Sample& sample, const GridMeasure& mu, const BreakSpec* breaks) {
  mu.validate();
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();
  if (n < 2) throw std::invalid_argument("the CUSUM process needs n >= 2");
  if (mu.dim() != d) throw std::invalid_argument("grid dimension does not match the sample");
  if (breaks != nullptr && breaks->empty()) breaks = nullptr;
  if (breaks != nullptr && breaks->n() != n) throw std::invalid_argument("break specification was built for another n");

  const RankIndex index(sample);
  const auto& kernels = simd::active_kernels();
  const std::size_t T = mu.size();
  CusumField field;
  field.n = n;
  field.measure = mu;
  field.values.resize((n - 1) * T);
  field.integrated.resize(n - 1);

  std::vector<double> logs_pre(n * d);
  std::vector<double> logs_suf(n * d);
  std::vector<std::size_t> scratch_rank(n + 1);
  std::vector<double> scratch;
  const double scale = static_cast<double>(n) * std::sqrt(static_cast<double>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const Window pre{1, k};
    const Window suf{k + 1, n};
    index.log_values(pre, breaks, logs_pre, scratch_rank);
    index.log_values(suf, breaks, logs_suf, scratch_rank);
    const detail::LogBlock bp{logs_pre.data(), k, d};
    const detail::LogBlock bs{logs_suf.data(), n - k, d};
    const double factor = static_cast<double>(k) * static_cast<double>(n - k) / scale;
    double* row = field.values.data() + (k - 1) * T;
    for (std::size_t p = 0; p < T; ++p) {
      const auto t = mu.grid.point(p);
      row[p] = factor * (detail::a_value(kernels, bp, t, scratch) - detail::a_value(kernels, bs, t, scratch));
    }
    field.integrated[k - 1] = integrate_squared(mu, row);
  }
  const MaxStatistic best = statistic_max(field);
  field.statistic = best.value;
  field.argmax_k = best.argmax_k;
  return field;
}

MaxStatistic statistic_max(const CusumField& field) {
  MaxStatistic best{-1.0, 0};
  for (std::size_t k = 1; k <= field.integrated.size(); ++k)
    if (field.integrated[k - 1] > best.value) best = {field.integrated[k - 1], k};
  return best;
}

double statistic_at(const CusumField& field, std::size_t k_star) {
  if (k_star < 1 || k_star >= field.n) throw std::out_of_range("k* must satisfy 1 <= k* < n");
  return field.integrated[k_star - 1];
}

void write_field_csv(const CusumField& field, std::ostream& out) {
  const std::size_t d = field.measure.dim();
  out << "s";
  if (d == 2) {
    out << ",t";
  } else {
    for (std::size_t j = 2; j <= d; ++j) out << ",t" << j;
  }
  out << ",D\n";
  out << std::setprecision(17);
  for (std::size_t k = 1; k < field.n; ++k)
    for (std::size_t p = 0; p < field.measure.size(); ++p) {
      out << static_cast<double>(k) / static_cast<double>(field.n);
      for (double c : field.measure.grid.point(p)) out << ',' << c;
      out << ',' << field.at(k, p) << '\n';
    }
}

}  // namespace evbreak
