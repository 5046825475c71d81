#include "evbreak/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evbreak {

Sample::Sample(std::size_t n, std::size_t d) : n_(n), d_(d), data_(n * d, 0.0) {}

Sample Sample::from_rows(std::size_t d, std::span<const double> row_major) {
  if (d == 0 || row_major.size() % d != 0)
    throw std::invalid_argument("row-major data size is not a multiple of the dimension");
  Sample s(row_major.size() / d, d);
  for (std::size_t i = 0; i < s.n_; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i, j) = row_major[i * d + j];
  return s;
}

void Sample::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n_)
    throw std::invalid_argument("label count does not match the number of rows");
  labels_ = std::move(labels);
}

Sample Sample::rows(std::size_t first, std::size_t count) const {
  if (first + count > n_) throw std::out_of_range("row range exceeds the sample");
  Sample out(count, d_);
  for (std::size_t j = 0; j < d_; ++j)
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(j * n_ + first), count,
                out.data_.begin() + static_cast<std::ptrdiff_t>(j * count));
  if (!labels_.empty())
    out.labels_.assign(labels_.begin() + static_cast<std::ptrdiff_t>(first),
                       labels_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

std::size_t index_floor(std::size_t n, double fraction) {
  // Absorbs representation error so that e.g. fraction 48/86 with n = 86 gives 48.
  const double x = std::max(0.0, static_cast<double>(n) * fraction);
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace evbreak
