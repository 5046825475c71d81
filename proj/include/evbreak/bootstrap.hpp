#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evbreak/cusum.hpp"
#include "evbreak/pickands.hpp"
#include "evbreak/ranks.hpp"
#include "evbreak/sample.hpp"

namespace evbreak {

/// B x n standard normal multipliers. Replicate b is drawn from its own
/// stream derive_seed(seed, b, multipliers), so replicates do not depend on B.
/// Stored observation-major: xi(i, b) lives at i * B + b.
class MultiplierSet {
 public:
  MultiplierSet() = default;
  MultiplierSet(std::size_t replicates, std::size_t n, std::uint64_t seed);
  /// Wraps given values (observation-major, n x replicates).
  static MultiplierSet from_values(std::size_t replicates, std::size_t n, std::vector<double> values);

  std::size_t replicates() const { return replicates_; }
  std::size_t n() const { return n_; }
  double operator()(std::size_t i, std::size_t b) const { return values_[i * replicates_ + b]; }
  const double* data() const { return values_.data(); }

 private:
  std::size_t replicates_ = 0;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Weights for d = 2 from the bivariate formula built on a, b, c, d-hat and
/// the clamped derivative of the block's own estimator with step h.
std::vector<double> weight_terms(const PseudoObsBlock& block, double t, double h);

/// Weights for any d >= 2 from the d-variate formula.
std::vector<double> weight_terms_d(const PseudoObsBlock& block, std::span<const double> t, double h);

/// Which full-sample estimator scales the replicates when breaks are given.
enum class Prefactor {
  adapted,  // break-adapted A_{1:n}
  plain,    // A_{1:n} from ordinary ranks
};

/// One replicate of the CUSUM process, computed directly from pseudo_obs
/// blocks and weight_terms_d. Slow; meant as a reference for run_test.
CusumField replicate_field(const Sample& sample, const GridMeasure& mu, const MultiplierSet& xi,
                           std::size_t b, double h, const BreakSpec* breaks = nullptr,
                           Prefactor prefactor = Prefactor::adapted);

struct TestOptions {
  GridMeasure measure = GridMeasure::default_for(2);
  std::optional<double> bandwidth;  // default 0.01 / sqrt(n)
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::vector<double> breaks;             // fractions in (0,1); empty for the plain test
  std::optional<std::size_t> k_star;      // fixed-k two-sample variant
  Prefactor prefactor = Prefactor::adapted;
  std::size_t workers = 1;                // threads over k; results do not depend on it

  void validate(std::size_t n, std::size_t d) const;
};

struct BootstrapReport {
  double observed = 0.0;
  std::vector<double> replicates;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  /// floor((1 - alpha) B)-th order statistic of the replicates; -inf when that index is 0.
  double threshold = 0.0;
  std::size_t argmax_k = 0;  // k_star for the fixed-k variant
  double bandwidth = 0.0;
  bool ties = false;         // some window had tied observations
};

/// Observed statistic, B multiplier replicates, p-value (share of replicates
/// >= observed) and the order-statistic decision.
BootstrapReport run_test(const Sample& sample, const TestOptions& options);

/// p-value, threshold and decision from an observed value and replicates.
void decide(BootstrapReport& report);

}  // namespace evbreak
