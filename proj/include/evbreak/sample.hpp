#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace evbreak {

/// n x d matrix of raw observations in temporal order. Stored column-major so
/// per-margin rank computations read contiguous memory.
class Sample {
 public:
  Sample() = default;
  Sample(std::size_t n, std::size_t d);
  /// Builds from row-major values (n rows of d entries).
  static Sample from_rows(std::size_t d, std::span<const double> row_major);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }

  std::span<const double> column(std::size_t j) const { return {data_.data() + j * n_, n_}; }
  std::span<double> column(std::size_t j) { return {data_.data() + j * n_, n_}; }

  /// Optional per-row labels (e.g. the year of an annual maximum).
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels);

  /// Rows [first, first + count) as a new sample (0-based).
  Sample rows(std::size_t first, std::size_t count) const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> data_;
  std::vector<std::string> labels_;
};

/// floor(n * fraction), robust to representation error of the fraction.
std::size_t index_floor(std::size_t n, double fraction);

}  // namespace evbreak
