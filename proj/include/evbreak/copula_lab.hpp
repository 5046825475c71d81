#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evbreak/random.hpp"
#include "evbreak/sample.hpp"

namespace evbreak {

/// Pickands dependence function evaluated at a simplex point (t_2, ..., t_d);
/// t_1 = 1 - sum of the others is implicit.
using PickandsFunction = std::function<double(std::span<const double>)>;

struct GumbelHougaardParams {
  double vartheta = 1.0;  // >= 1; 1 is independence

  void validate() const;
  /// Kendall's tau of the bivariate copula, 1 - 1/vartheta.
  double kendall_tau() const { return 1.0 - 1.0 / vartheta; }
  static GumbelHougaardParams from_kendall_tau(double tau);
};

/// Khoudraji's device applied to a Gumbel-Hougaard base copula:
/// C(u) = prod_j u_j^{a_j} * C_base(u_1^{1-a_1}, ..., u_d^{1-a_d}).
struct KhoudrajiParams {
  std::vector<double> a;  // one entry per margin, each in [0,1]
  GumbelHougaardParams base;

  void validate() const;
  std::size_t dim() const { return a.size(); }
};

struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double gamma = 0.0;

  void validate() const;
};

/// Throws std::invalid_argument unless t = (t_2..t_d) lies in the closed unit simplex.
void check_simplex_point(std::span<const double> t);

/// Logistic Pickands function (sum_j t_j^vartheta)^{1/vartheta}.
double pickands_gumbel(std::span<const double> t, const GumbelHougaardParams& params);
inline double pickands_gumbel(double t, const GumbelHougaardParams& params) {
  return pickands_gumbel(std::span<const double>(&t, 1), params);
}

/// Pickands function of the Khoudraji copula built on the logistic base.
double pickands_khoudraji(std::span<const double> t, const KhoudrajiParams& params);

/// Extreme-value copula C(u) = exp{(sum log u_j) A(log u_2 / sum, ..., log u_d / sum)}.
double copula_cdf(std::span<const double> u, const PickandsFunction& pickands);

PickandsFunction gumbel_pickands_function(const GumbelHougaardParams& params);
PickandsFunction khoudraji_pickands_function(const KhoudrajiParams& params);

/// Positive-stable frailty sampler. Returns an n x d sample with uniform margins.
Sample sample_gumbel(std::size_t n, std::size_t d, const GumbelHougaardParams& params, Rng& rng);

/// Max-power construction V_j = max(W_j^{1/a_j}, U_j^{1/(1-a_j)}), W uniform and
/// U drawn from the base copula, with u^{1/0} = 0.
Sample khoudraji_sample(std::size_t n, const KhoudrajiParams& params, Rng& rng);

double gev_cdf(double x, const GevParams& params);
/// mu + sigma ((-ln p)^{-gamma} - 1) / gamma, with the Gumbel limit at gamma = 0.
double gev_quantile(double p, const GevParams& params);

// ---------------------------------------------------------------------------
// Data-generating scenarios

struct UniformMargin {};
struct GevMargin {
  GevParams params;
};
struct NormalMargin {
  double mean = 0.0;
  double sd = 1.0;
};
using MarginSpec = std::variant<UniformMargin, GevMargin, NormalMargin>;

double apply_margin(const MarginSpec& margin, double u);

struct ScenarioSegment {
  double end = 1.0;  // right end of the fraction interval; segments are contiguous from 0
  KhoudrajiParams copula;
  std::vector<MarginSpec> margins;  // empty means uniform margins
};

struct DgpScenario {
  std::size_t n = 0;
  std::vector<ScenarioSegment> segments;
  std::uint64_t seed = 0;

  std::size_t dim() const;
  /// Throws std::invalid_argument for malformed scenarios, including a
  /// segment that maps to zero rows.
  void validate() const;
  /// Half-open row ranges: segment r covers 0-based rows [starts[r], starts[r+1]).
  std::vector<std::size_t> row_boundaries() const;
};

/// Draws the scenario using the caller's stream.
Sample generate_scenario(const DgpScenario& scenario, Rng& rng);
/// Draws the scenario from its own seed.
Sample generate_scenario(const DgpScenario& scenario);

// ---------------------------------------------------------------------------
// Kendall's tau

struct TauEstimate {
  double tau = 0.0;
  double error_bound = 0.0;  // |tau(M) - tau(M/2)|, a resolution-dependent error proxy
};

/// Brute-force tau = 1 - 4 * integral of C_u C_v over the unit square, with
/// partial derivatives taken by finite differences of `copula` on an
/// M x M grid.
TauEstimate kendall_tau_oracle(const std::function<double(double, double)>& copula,
                               std::size_t resolution = 1024);

/// Tau of the bivariate Khoudraji copula via kendall_tau_oracle.
TauEstimate khoudraji_kendall_tau(const KhoudrajiParams& params, std::size_t resolution = 1024);

/// The base parameter vartheta giving the requested bivariate tau for
/// asymmetry a (closed form when a = 0, bisection otherwise).
double khoudraji_vartheta_for_tau(std::span<const double> a, double tau);

/// Sample Kendall tau of two columns (O(n^2) pair count).
double sample_kendall_tau(std::span<const double> x, std::span<const double> y);

}  // namespace evbreak
