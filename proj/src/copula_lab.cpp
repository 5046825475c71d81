#include "evbreak/copula_lab.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace evbreak {
namespace {

constexpr double kSimplexSlack = 1e-12;

// Keeps uniform draws strictly inside (0,1) after floating-point transforms.
double clamp_open(double u) {
  return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

// Full coordinates (t_1, ..., t_d) from (t_2, ..., t_d).
std::vector<double> full_coordinates(std::span<const double> t) {
  std::vector<double> full(t.size() + 1);
  double rest = 0.0;
  for (double x : t) rest += x;
  full[0] = std::max(0.0, 1.0 - rest);
  std::copy(t.begin(), t.end(), full.begin() + 1);
  return full;
}

double logistic(std::span<const double> full, double vartheta) {
  const double peak = *std::max_element(full.begin(), full.end());
  if (peak <= 0.0) return 1.0;
  double acc = 0.0;
  for (double x : full) acc += std::pow(x / peak, vartheta);
  return peak * std::pow(acc, 1.0 / vartheta);
}

// Kanter's representation of a positive stable variable with Laplace
// transform exp(-s^alpha), 0 < alpha < 1.
double positive_stable(double alpha, Rng& rng) {
  const double phi = std::numbers::pi * open_unit(rng);
  const double e = standard_exponential(rng);
  const double a = std::sin(alpha * phi) / std::pow(std::sin(phi), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * phi) / e, (1.0 - alpha) / alpha);
  return a * b;
}

}  // namespace

void GumbelHougaardParams::validate() const {
  if (!(vartheta >= 1.0) || !std::isfinite(vartheta))
    throw std::invalid_argument("Gumbel-Hougaard parameter must be a finite value >= 1");
}

GumbelHougaardParams GumbelHougaardParams::from_kendall_tau(double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("Kendall tau must lie in [0,1)");
  return {1.0 / (1.0 - tau)};
}

void KhoudrajiParams::validate() const {
  base.validate();
  if (a.size() < 2) throw std::invalid_argument("Khoudraji copula needs at least two margins");
  for (double x : a)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("Khoudraji asymmetry parameters must lie in [0,1]");
}

void GevParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu) || !std::isfinite(gamma))
    throw std::invalid_argument("GEV parameters must be finite with sigma > 0");
}

void check_simplex_point(std::span<const double> t) {
  double sum = 0.0;
  for (double x : t) {
    if (!(x >= -kSimplexSlack)) throw std::invalid_argument("simplex coordinate is negative");
    sum += x;
  }
  if (!(sum <= 1.0 + kSimplexSlack)) throw std::invalid_argument("point lies outside the unit simplex");
}

double pickands_gumbel(std::span<const double> t, const GumbelHougaardParams& params) {
  params.validate();
  check_simplex_point(t);
  const auto full = full_coordinates(t);
  return logistic(full, params.vartheta);
}

double pickands_khoudraji(std::span<const double> t, const KhoudrajiParams& params) {
  params.validate();
  if (t.size() + 1 != params.dim())
    throw std::invalid_argument("simplex point dimension does not match the copula");
  check_simplex_point(t);
  const auto full = full_coordinates(t);
  double linear = 0.0;
  double scale = 0.0;
  std::vector<double> inner(full.size());
  for (std::size_t j = 0; j < full.size(); ++j) {
    linear += params.a[j] * full[j];
    inner[j] = (1.0 - params.a[j]) * full[j];
    scale += inner[j];
  }
  if (scale <= 0.0) return linear;
  for (double& x : inner) x /= scale;
  return linear + scale * logistic(inner, params.base.vartheta);
}

double copula_cdf(std::span<const double> u, const PickandsFunction& pickands) {
  double total = 0.0;
  std::vector<double> logs(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!(u[j] >= 0.0 && u[j] <= 1.0)) throw std::invalid_argument("copula argument outside [0,1]");
    if (u[j] == 0.0) return 0.0;
    logs[j] = std::log(u[j]);
    total += logs[j];
  }
  if (total == 0.0) return 1.0;
  std::vector<double> t(u.size() - 1);
  double rest = 0.0;
  for (std::size_t j = 1; j < u.size(); ++j) {
    t[j - 1] = logs[j] / total;
    rest += t[j - 1];
  }
  // Rounding can push the point a hair outside the simplex.
  if (rest > 1.0)
    for (double& x : t) x /= rest;
  return std::exp(total * pickands(t));
}

PickandsFunction gumbel_pickands_function(const GumbelHougaardParams& params) {
  params.validate();
  return [params](std::span<const double> t) { return pickands_gumbel(t, params); };
}

PickandsFunction khoudraji_pickands_function(const KhoudrajiParams& params) {
  params.validate();
  return [params](std::span<const double> t) { return pickands_khoudraji(t, params); };
}

Sample sample_gumbel(std::size_t n, std::size_t d, const GumbelHougaardParams& params, Rng& rng) {
  params.validate();
  if (n == 0 || d == 0) throw std::invalid_argument("sample_gumbel needs n >= 1 and d >= 1");
  Sample out(n, d);
  if (params.vartheta == 1.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) out(i, j) = open_unit(rng);
    return out;
  }
  const double alpha = 1.0 / params.vartheta;
  for (std::size_t i = 0; i < n; ++i) {
    const double frailty = positive_stable(alpha, rng);
    for (std::size_t j = 0; j < d; ++j) {
      const double e = standard_exponential(rng);
      out(i, j) = clamp_open(std::exp(-std::pow(e / frailty, alpha)));
    }
  }
  return out;
}

Sample khoudraji_sample(std::size_t n, const KhoudrajiParams& params, Rng& rng) {
  params.validate();
  const std::size_t d = params.dim();
  Sample out = sample_gumbel(n, d, params.base, rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double aj = params.a[j];
      const double from_base = aj < 1.0 ? std::pow(out(i, j), 1.0 / (1.0 - aj)) : 0.0;
      const double from_noise = aj > 0.0 ? std::pow(open_unit(rng), 1.0 / aj) : 0.0;
      out(i, j) = clamp_open(std::max(from_base, from_noise));
    }
  }
  return out;
}

double gev_cdf(double x, const GevParams& params) {
  params.validate();
  const double z = (x - params.mu) / params.sigma;
  if (params.gamma == 0.0) return std::exp(-std::exp(-z));
  const double base = 1.0 + params.gamma * z;
  if (base <= 0.0) return params.gamma > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(params.gamma * z) / params.gamma));
}

double gev_quantile(double p, const GevParams& params) {
  params.validate();
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("GEV quantile needs p in (0,1)");
  const double y = std::log(-std::log(p));  // log of -ln p
  if (params.gamma == 0.0) return params.mu - params.sigma * y;
  return params.mu + params.sigma * std::expm1(-params.gamma * y) / params.gamma;
}

double apply_margin(const MarginSpec& margin, double u) {
  return std::visit(
      [u](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, UniformMargin>) {
          return u;
        } else if constexpr (std::is_same_v<M, GevMargin>) {
          return gev_quantile(u, m.params);
        } else {
          return boost::math::quantile(boost::math::normal_distribution<double>(m.mean, m.sd), u);
        }
      },
      margin);
}

std::size_t DgpScenario::dim() const {
  return segments.empty() ? 0 : segments.front().copula.dim();
}

void DgpScenario::validate() const {
  if (n == 0) throw std::invalid_argument("scenario sample size must be positive");
  if (segments.empty()) throw std::invalid_argument("scenario has no segments");
  const std::size_t d = dim();
  double previous = 0.0;
  for (const auto& seg : segments) {
    seg.copula.validate();
    if (seg.copula.dim() != d) throw std::invalid_argument("segments disagree on the dimension");
    if (!seg.margins.empty() && seg.margins.size() != d)
      throw std::invalid_argument("margin count does not match the dimension");
    for (const auto& m : seg.margins)
      if (const auto* g = std::get_if<GevMargin>(&m)) g->params.validate();
    if (!(seg.end > previous)) throw std::invalid_argument("segment ends must be increasing");
    previous = seg.end;
  }
  if (std::abs(segments.back().end - 1.0) > 1e-12)
    throw std::invalid_argument("segment fractions must cover [0,1]");
  const auto bounds = row_boundaries();
  for (std::size_t r = 0; r + 1 < bounds.size(); ++r)
    if (bounds[r + 1] <= bounds[r])
      throw std::invalid_argument("segment " + std::to_string(r) + " contains no observation");
}

std::vector<std::size_t> DgpScenario::row_boundaries() const {
  std::vector<std::size_t> bounds{0};
  for (std::size_t r = 0; r + 1 < segments.size(); ++r) bounds.push_back(index_floor(n, segments[r].end));
  bounds.push_back(n);
  return bounds;
}

Sample generate_scenario(const DgpScenario& scenario, Rng& rng) {
  scenario.validate();
  const std::size_t d = scenario.dim();
  const auto bounds = scenario.row_boundaries();
  Sample out(scenario.n, d);
  for (std::size_t r = 0; r < scenario.segments.size(); ++r) {
    const auto& seg = scenario.segments[r];
    const std::size_t rows = bounds[r + 1] - bounds[r];
    const Sample block = khoudraji_sample(rows, seg.copula, rng);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < d; ++j)
        out(bounds[r] + i, j) = seg.margins.empty() ? block(i, j) : apply_margin(seg.margins[j], block(i, j));
  }
  return out;
}

Sample generate_scenario(const DgpScenario& scenario) {
  Rng rng(scenario.seed);
  return generate_scenario(scenario, rng);
}

namespace {

double tau_on_grid(const std::vector<double>& grid, std::size_t full_m, std::size_t stride) {
  const std::size_t m = full_m / stride;
  auto g = [&](std::size_t i, std::size_t j) { return grid[(i * stride) * (full_m + 1) + j * stride]; };
  double integral = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double du = (g(i + 1, j) + g(i + 1, j + 1)) - (g(i, j) + g(i, j + 1));
      const double dv = (g(i, j + 1) + g(i + 1, j + 1)) - (g(i, j) + g(i + 1, j));
      row += du * dv;
    }
    integral += row;
  }
  // du and dv are 2h times the partials, so 4 * h^2 * C_u * C_v sums to du * dv.
  return 1.0 - integral;
}

}  // namespace

TauEstimate kendall_tau_oracle(const std::function<double(double, double)>& copula, std::size_t resolution) {
  if (resolution < 4 || resolution % 2 != 0) throw std::invalid_argument("resolution must be even and >= 4");
  const std::size_t m = resolution;
  std::vector<double> grid((m + 1) * (m + 1));
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = 0; j <= m; ++j)
      grid[i * (m + 1) + j] = copula(static_cast<double>(i) / m, static_cast<double>(j) / m);
  const double fine = tau_on_grid(grid, m, 1);
  const double coarse = tau_on_grid(grid, m, 2);
  return {fine, std::abs(fine - coarse)};
}

TauEstimate khoudraji_kendall_tau(const KhoudrajiParams& params, std::size_t resolution) {
  params.validate();
  if (params.dim() != 2) throw std::invalid_argument("Kendall tau oracle is bivariate");
  const auto pickands = khoudraji_pickands_function(params);
  return kendall_tau_oracle(
      [&](double u, double v) {
        const double uv[2] = {u, v};
        return copula_cdf(uv, pickands);
      },
      resolution);
}

double khoudraji_vartheta_for_tau(std::span<const double> a, double tau) {
  if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("Kendall tau must lie in [0,1)");
  if (std::all_of(a.begin(), a.end(), [](double x) { return x == 0.0; }))
    return GumbelHougaardParams::from_kendall_tau(tau).vartheta;
  KhoudrajiParams p{{a.begin(), a.end()}, {1.0}};
  auto tau_at = [&](double vartheta) {
    p.base.vartheta = vartheta;
    return khoudraji_kendall_tau(p, 512).tau;
  };
  double lo = 1.0;
  double hi = 60.0;
  if (tau_at(hi) < tau) throw std::invalid_argument("requested Kendall tau is not reachable for this asymmetry");
  for (int iter = 0; iter < 40 && hi - lo > 1e-6; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tau_at(mid) < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sample_kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need two equal columns of length >= 2");
  const std::size_t n = x.size();
  long long score = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (x[i] - x[j]) * (y[i] - y[j]);
      score += (s > 0.0) - (s < 0.0);
    }
  return static_cast<double>(score) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace evbreak
