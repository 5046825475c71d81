#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evbreak/sample.hpp"

namespace evbreak {

/// Observation window k..l, 1-based and inclusive. first > last is the empty window.
struct Window {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const { return first > last; }
  std::size_t size() const { return empty() ? 0 : last - first + 1; }
  friend bool operator==(const Window&, const Window&) = default;
};

/// Known break points in the margins. Fraction theta_r maps to the index
/// m_r = floor(n * theta_r); segment r covers rows m_r + 1 .. m_{r+1} with
/// m_0 = 0 and m_{R+1} = n. An empty list means no break.
class BreakSpec {
 public:
  BreakSpec() = default;
  /// Throws std::invalid_argument unless 0 < theta_1 < ... < theta_R < 1 and
  /// the induced indices are strictly increasing with 1 <= m_1 and m_R < n.
  BreakSpec(std::vector<double> thetas, std::size_t n);

  const std::vector<double>& thetas() const { return thetas_; }
  /// m_1, ..., m_R.
  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t n() const { return n_; }
  bool empty() const { return thetas_.empty(); }

  /// Intersections of `w` with the break segments, in temporal order, empty
  /// pieces dropped. Without breaks this is {w}.
  std::vector<Window> split(Window w) const;

 private:
  std::vector<double> thetas_;
  std::vector<std::size_t> indices_;
  std::size_t n_ = 0;
};

/// Scaled within-window ranks. Values are stored column-major, one column per
/// margin, row i corresponding to observation window.first + i.
struct PseudoObsBlock {
  Window window;
  std::size_t dim = 0;
  std::vector<double> values;
  /// Pieces over which ranks were computed (one piece unless breaks split the window).
  std::vector<Window> pieces;
  bool has_ties = false;
  std::optional<BreakSpec> breaks;

  std::size_t rows() const { return window.size(); }
  bool empty() const { return window.empty(); }
  double operator()(std::size_t i, std::size_t j) const { return values[j * rows() + i]; }
  std::span<const double> column(std::size_t j) const { return {values.data() + j * rows(), rows()}; }
};

/// Ranks every observation of `w` against the observations of `w` only:
/// U_i = #{j in w : X_j <= X_i} / (|w| + 1). Ties are counted with <= and
/// flagged. An empty window yields an empty block.
PseudoObsBlock pseudo_obs(const Sample& sample, Window w);

/// As pseudo_obs, but each observation is ranked within the intersection of
/// `w` with its own break segment.
PseudoObsBlock pseudo_obs_breaks(const Sample& sample, const BreakSpec& breaks, Window w);

/// (1/N) #{i : U_i <= u componentwise}; 0 for an empty block.
double empirical_copula(const PseudoObsBlock& block, std::span<const double> u);

/// Global max-style ranks per margin, from which the ranks within any window
/// follow by one counting pass instead of a sort. Immutable after
/// construction and safe to share between threads.
class RankIndex {
 public:
  explicit RankIndex(const Sample& sample);

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }

  /// Same values as pseudo_obs / pseudo_obs_breaks on the indexed sample.
  PseudoObsBlock block(Window w, const BreakSpec* breaks = nullptr) const;

  /// Writes log U for the window, column-major with stride w.size(). Returns
  /// true when ties were found. `scratch` must hold n + 1 entries.
  bool log_values(Window w, const BreakSpec* breaks, std::span<double> out,
                  std::span<std::size_t> scratch) const;

 private:
  bool fill_piece(Window piece, Window w, std::span<double> out, std::span<std::size_t> scratch,
                  bool take_log) const;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<std::size_t> ranks_;  // column-major, values in 1..n
};

}  // namespace evbreak
