#include "evbreak/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evbreak {

BreakSpec::BreakSpec(std::vector<double> thetas, std::size_t n) : thetas_(std::move(thetas)), n_(n) {
  double previous = 0.0;
  for (double theta : thetas_) {
    if (!(theta > previous && theta < 1.0))
      throw std::invalid_argument("break fractions must be strictly increasing inside (0,1)");
    previous = theta;
  }
  std::size_t last = 0;
  for (double theta : thetas_) {
    const std::size_t m = index_floor(n, theta);
    if (m <= last || m >= n)
      throw std::invalid_argument("break fractions leave an empty marginal segment for n = " +
                                  std::to_string(n));
    indices_.push_back(m);
    last = m;
  }
}

std::vector<Window> BreakSpec::split(Window w) const {
  if (w.empty()) return {};
  std::vector<Window> pieces;
  std::size_t start = 1;
  for (std::size_t r = 0; r <= indices_.size(); ++r) {
    const std::size_t end = r < indices_.size() ? indices_[r] : std::max(n_, w.last);
    const Window piece{std::max(start, w.first), std::min(end, w.last)};
    if (!piece.empty()) pieces.push_back(piece);
    start = end + 1;
  }
  return pieces;
}

namespace {

void check_window(const Sample& sample, Window w) {
  if (!w.empty() && (w.first < 1 || w.last > sample.n()))
    throw std::out_of_range("window exceeds the sample");
}

// Reference path: per-piece sort and <=-count.
bool rank_piece(const Sample& sample, Window piece, Window w, std::vector<double>& values) {
  const std::size_t rows = w.size();
  const std::size_t size = piece.size();
  const double denom = static_cast<double>(size + 1);
  bool ties = false;
  std::vector<double> sorted(size);
  for (std::size_t j = 0; j < sample.d(); ++j) {
    const auto col = sample.column(j);
    std::copy(col.begin() + (piece.first - 1), col.begin() + piece.last, sorted.begin());
    std::sort(sorted.begin(), sorted.end());
    ties = ties || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    for (std::size_t i = piece.first; i <= piece.last; ++i) {
      const auto count = std::upper_bound(sorted.begin(), sorted.end(), col[i - 1]) - sorted.begin();
      values[j * rows + (i - w.first)] = static_cast<double>(count) / denom;
    }
  }
  return ties;
}

PseudoObsBlock make_block(const Sample& sample, Window w, std::vector<Window> pieces) {
  check_window(sample, w);
  PseudoObsBlock block;
  block.window = w;
  block.dim = sample.d();
  block.values.assign(w.size() * sample.d(), 0.0);
  for (const Window& piece : pieces) block.has_ties = rank_piece(sample, piece, w, block.values) || block.has_ties;
  block.pieces = std::move(pieces);
  return block;
}

}  // namespace

PseudoObsBlock pseudo_obs(const Sample& sample, Window w) {
  if (w.empty()) return make_block(sample, w, {});
  return make_block(sample, w, {w});
}

PseudoObsBlock pseudo_obs_breaks(const Sample& sample, const BreakSpec& breaks, Window w) {
  if (breaks.n() != sample.n() && !breaks.empty())
    throw std::invalid_argument("break specification was built for a different sample size");
  PseudoObsBlock block = make_block(sample, w, breaks.split(w));
  block.breaks = breaks;
  return block;
}

double empirical_copula(const PseudoObsBlock& block, std::span<const double> u) {
  if (block.empty()) return 0.0;
  if (u.size() != block.dim) throw std::invalid_argument("argument dimension does not match the block");
  std::size_t count = 0;
  for (std::size_t i = 0; i < block.rows(); ++i) {
    bool inside = true;
    for (std::size_t j = 0; j < block.dim && inside; ++j) inside = block(i, j) <= u[j];
    count += inside;
  }
  return static_cast<double>(count) / static_cast<double>(block.rows());
}

RankIndex::RankIndex(const Sample& sample) : n_(sample.n()), d_(sample.d()), ranks_(sample.n() * sample.d()) {
  std::vector<std::size_t> order(n_);
  for (std::size_t j = 0; j < d_; ++j) {
    const auto col = sample.column(j);
    for (double x : col)
      if (std::isnan(x)) throw std::invalid_argument("sample contains NaN");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    // Max-style: every member of a tie group gets the position of its last member.
    std::size_t pos = 0;
    while (pos < n_) {
      std::size_t end = pos + 1;
      while (end < n_ && col[order[end]] == col[order[pos]]) ++end;
      for (std::size_t q = pos; q < end; ++q) ranks_[j * n_ + order[q]] = end;
      pos = end;
    }
  }
}

bool RankIndex::fill_piece(Window piece, Window w, std::span<double> out, std::span<std::size_t> scratch,
                           bool take_log) const {
  const std::size_t rows = w.size();
  const double denom = static_cast<double>(piece.size() + 1);
  bool ties = false;
  for (std::size_t j = 0; j < d_; ++j) {
    const std::size_t* g = ranks_.data() + j * n_;
    std::fill(scratch.begin(), scratch.begin() + (n_ + 1), 0);
    for (std::size_t i = piece.first; i <= piece.last; ++i) ties = (scratch[g[i - 1]]++ > 0) || ties;
    for (std::size_t r = 1; r <= n_; ++r) scratch[r] += scratch[r - 1];
    for (std::size_t i = piece.first; i <= piece.last; ++i) {
      const double u = static_cast<double>(scratch[g[i - 1]]) / denom;
      out[j * rows + (i - w.first)] = take_log ? std::log(u) : u;
    }
  }
  return ties;
}

bool RankIndex::log_values(Window w, const BreakSpec* breaks, std::span<double> out,
                           std::span<std::size_t> scratch) const {
  if (w.empty()) return false;
  if (w.first < 1 || w.last > n_) throw std::out_of_range("window exceeds the sample");
  if (out.size() < w.size() * d_ || scratch.size() < n_ + 1) throw std::invalid_argument("buffer too small");
  bool ties = false;
  if (breaks == nullptr || breaks->empty()) return fill_piece(w, w, out, scratch, true);
  for (const Window& piece : breaks->split(w)) ties = fill_piece(piece, w, out, scratch, true) || ties;
  return ties;
}

PseudoObsBlock RankIndex::block(Window w, const BreakSpec* breaks) const {
  PseudoObsBlock block;
  block.window = w;
  block.dim = d_;
  block.values.assign(w.size() * d_, 0.0);
  if (w.empty()) return block;
  if (w.first < 1 || w.last > n_) throw std::out_of_range("window exceeds the sample");
  std::vector<std::size_t> scratch(n_ + 2);
  block.pieces = breaks != nullptr ? breaks->split(w) : std::vector<Window>{w};
  for (const Window& piece : block.pieces)
    block.has_ties = fill_piece(piece, w, block.values, scratch, false) || block.has_ties;
  if (breaks != nullptr) block.breaks = *breaks;
  return block;
}

}  // namespace evbreak
