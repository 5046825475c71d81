#include "evbreak/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "estimator_core.hpp"
#include "evbreak/random.hpp"

namespace evbreak {

MultiplierSet::MultiplierSet(std::size_t replicates, std::size_t n, std::uint64_t seed)
    : replicates_(replicates), n_(n), values_(replicates * n) {
  for (std::size_t b = 0; b < replicates; ++b) {
    Rng rng = make_stream(seed, b, StreamPurpose::multipliers);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) values_[i * replicates + b] = normal(rng);
  }
}

MultiplierSet MultiplierSet::from_values(std::size_t replicates, std::size_t n, std::vector<double> values) {
  if (values.size() != replicates * n) throw std::invalid_argument("multiplier values do not match n x B");
  MultiplierSet set;
  set.replicates_ = replicates;
  set.n_ = n;
  set.values_ = std::move(values);
  return set;
}

namespace {

struct WeightScratch {
  std::vector<double> maxima;
  std::vector<double> powered;
  std::vector<double> stencil;
};

// d-variate weights of one window at t. Returns the window's A(t).
double window_weights(const simd::KernelTable& k, const detail::LogBlock& b, std::span<const double> t,
                      double h, double* w, WeightScratch& s) {
  const std::size_t rows = b.rows;
  const std::size_t d = b.dim;
  s.maxima.resize(rows);
  s.powered.resize(rows);
  detail::maxima(k, b, t, s.maxima.data());
  const double m_bar = detail::mean(s.maxima);
  const double a = detail::a_from_s(m_bar);

  double full[detail::kMaxDim];
  double deriv[detail::kMaxDim];
  detail::full_coordinates(t, full);
  for (std::size_t c = 0; c + 1 < d; ++c) deriv[c] = detail::derivative_axis(k, b, t, c, h, s.stencil);

  double dot = 0.0;
  double complement_first = 0.0;
  for (std::size_t c = 0; c + 1 < d; ++c) {
    dot += t[c] * deriv[c];
    complement_first += t[c];
  }

  for (std::size_t i = 0; i < rows; ++i) w[i] = m_bar - s.maxima[i];
  for (std::size_t j = 0; j < d; ++j) {
    double aj = 0.0;
    double bj = 0.0;
    if (j == 0) {
      aj = a - dot;
      bj = a + complement_first;
    } else {
      const std::size_t c = j - 1;
      double others = 0.0;
      for (std::size_t q = 0; q + 1 < d; ++q)
        if (q != c) others += t[q] * deriv[q];
      aj = (a + (1.0 - t[c]) * deriv[c]) - others;
      bj = a + (1.0 - t[c]);
    }
    const double coef = full[j] > 0.0 ? bj / full[j] : std::numeric_limits<double>::infinity();
    const double ratio = bj != 0.0 ? aj / bj : 0.0;
    detail::powered(k, b, j, coef, s.powered.data());
    const double u_bar = detail::mean(s.powered);
    for (std::size_t i = 0; i < rows; ++i) w[i] += (s.powered[i] - u_bar) * ratio;
  }
  return a;
}

// Full-sample (1 + A_{1:n}(t))^2 per grid point.
std::vector<double> prefactors(const RankIndex& index, const GridMeasure& mu, const BreakSpec* breaks) {
  const std::size_t n = index.n();
  std::vector<double> logs(n * index.d());
  std::vector<std::size_t> scratch_rank(n + 1);
  index.log_values({1, n}, breaks, logs, scratch_rank);
  const detail::LogBlock block{logs.data(), n, index.d()};
  const auto& kernels = simd::active_kernels();
  std::vector<double> scratch;
  std::vector<double> out(mu.size());
  for (std::size_t p = 0; p < mu.size(); ++p) {
    const double a = detail::a_value(kernels, block, mu.grid.point(p), scratch);
    out[p] = (1.0 + a) * (1.0 + a);
  }
  return out;
}

const BreakSpec* active(const BreakSpec& breaks) { return breaks.empty() ? nullptr : &breaks; }

}  // namespace

std::vector<double> weight_terms(const PseudoObsBlock& block, double t, double h) {
  check_bandwidth(h);
  if (block.dim != 2) throw std::invalid_argument("bivariate weights need d = 2");
  if (block.empty()) throw std::domain_error("weights on an empty window");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in [0,1]");
  const auto& k = simd::active_kernels();
  const auto logs = detail::block_logs(block);
  const detail::LogBlock b{logs.data(), block.rows(), 2};
  const std::size_t rows = block.rows();

  std::vector<double> m(rows), u_hat(rows), v_hat(rows), scratch;
  detail::maxima(k, b, {&t, 1}, m.data());
  const double m_bar = detail::mean(m);
  const double a = detail::a_from_s(m_bar);
  const double slope = detail::derivative_bivariate(k, b, t, h, scratch);

  const double a_hat = a - t * slope;
  const double b_hat = a + t;
  const double c_hat = a + (1.0 - t) * slope;
  const double d_hat = a + (1.0 - t);
  const double inf = std::numeric_limits<double>::infinity();
  // Exponents b/(1-t) and d/t; a zero denominator means the power vanishes.
  detail::powered(k, b, 0, 1.0 - t > 0.0 ? b_hat / (1.0 - t) : inf, u_hat.data());
  detail::powered(k, b, 1, t > 0.0 ? d_hat / t : inf, v_hat.data());
  const double u_bar = detail::mean(u_hat);
  const double v_bar = detail::mean(v_hat);
  const double ab = b_hat != 0.0 ? a_hat / b_hat : 0.0;
  const double cd = d_hat != 0.0 ? c_hat / d_hat : 0.0;

  std::vector<double> w(rows);
  for (std::size_t i = 0; i < rows; ++i) w[i] = m_bar - m[i] + (u_hat[i] - u_bar) * ab + (v_hat[i] - v_bar) * cd;
  return w;
}

std::vector<double> weight_terms_d(const PseudoObsBlock& block, std::span<const double> t, double h) {
  check_bandwidth(h);
  if (block.dim < 2 || block.dim > detail::kMaxDim) throw std::invalid_argument("block dimension must lie in [2, 64]");
  if (t.size() + 1 != block.dim) throw std::invalid_argument("simplex point dimension does not match the block");
  if (block.empty()) throw std::domain_error("weights on an empty window");
  const auto logs = detail::block_logs(block);
  const detail::LogBlock b{logs.data(), block.rows(), block.dim};
  std::vector<double> w(block.rows());
  WeightScratch scratch;
  window_weights(simd::active_kernels(), b, t, h, w.data(), scratch);
  return w;
}

CusumField replicate_field(const Sample& sample, const GridMeasure& mu, const MultiplierSet& xi, std::size_t b,
                           double h, const BreakSpec* breaks, Prefactor prefactor) {
  mu.validate();
  const std::size_t n = sample.n();
  if (n < 2) throw std::invalid_argument("the CUSUM process needs n >= 2");
  if (mu.dim() != sample.d()) throw std::invalid_argument("grid dimension does not match the sample");
  if (xi.n() != n || b >= xi.replicates()) throw std::invalid_argument("multipliers do not match the sample");
  if (breaks != nullptr && breaks->empty()) breaks = nullptr;

  auto block_of = [&](Window w) { return breaks != nullptr ? pseudo_obs_breaks(sample, *breaks, w) : pseudo_obs(sample, w); };
  const PseudoObsBlock whole = prefactor == Prefactor::plain ? pseudo_obs(sample, {1, n}) : block_of({1, n});

  const std::size_t T = mu.size();
  CusumField field;
  field.n = n;
  field.measure = mu;
  field.values.resize((n - 1) * T);
  field.integrated.resize(n - 1);
  const double scale = static_cast<double>(n) * std::sqrt(static_cast<double>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const PseudoObsBlock pre = block_of({1, k});
    const PseudoObsBlock suf = block_of({k + 1, n});
    double* row = field.values.data() + (k - 1) * T;
    for (std::size_t p = 0; p < T; ++p) {
      const auto t = mu.grid.point(p);
      const double one_plus = 1.0 + subsample_A(whole, t);
      const auto w_pre = weight_terms_d(pre, t, h);
      const auto w_suf = weight_terms_d(suf, t, h);
      double sum_pre = 0.0;
      double sum_suf = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum_pre += xi(i, b) * w_pre[i];
      for (std::size_t i = k; i < n; ++i) sum_suf += xi(i, b) * w_suf[i - k];
      row[p] = one_plus * one_plus *
               (static_cast<double>(k) / scale * sum_suf - static_cast<double>(n - k) / scale * sum_pre);
    }
    field.integrated[k - 1] = integrate_squared(mu, row);
  }
  const MaxStatistic best = statistic_max(field);
  field.statistic = best.value;
  field.argmax_k = best.argmax_k;
  return field;
}

void TestOptions::validate(std::size_t n, std::size_t d) const {
  measure.validate();
  if (measure.dim() != d) throw std::invalid_argument("grid dimension does not match the sample");
  if (n < 2) throw std::invalid_argument("the test needs n >= 2");
  if (replicates < 1) throw std::invalid_argument("the bootstrap needs B >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (bandwidth) check_bandwidth(*bandwidth);
  if (k_star && (*k_star < 1 || *k_star >= n)) throw std::invalid_argument("k* must satisfy 1 <= k* < n");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  BreakSpec(breaks, n);
}

void decide(BootstrapReport& report) {
  const std::size_t B = report.replicates.size();
  if (B == 0) throw std::invalid_argument("no bootstrap replicates");
  std::size_t exceed = 0;
  for (double r : report.replicates) exceed += r >= report.observed;
  report.p_value = static_cast<double>(exceed) / static_cast<double>(B);
  std::vector<double> sorted = report.replicates;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t order = index_floor(B, 1.0 - report.alpha);
  report.threshold = order == 0 ? -std::numeric_limits<double>::infinity() : sorted[order - 1];
  report.reject = report.observed > report.threshold;
}

BootstrapReport run_test(const Sample& sample, const TestOptions& options) {
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();
  options.validate(n, d);
  const double h = options.bandwidth.value_or(default_bandwidth(n));
  const BreakSpec breaks(options.breaks, n);
  const BreakSpec* brk = active(breaks);
  const GridMeasure& mu = options.measure;
  const std::size_t T = mu.size();
  const std::size_t B = options.replicates;

  const RankIndex index(sample);
  const auto pref = prefactors(index, mu, options.prefactor == Prefactor::plain ? nullptr : brk);
  const MultiplierSet xi(B, n, options.seed);

  std::vector<std::size_t> ks;
  if (options.k_star) {
    ks.push_back(*options.k_star);
  } else {
    for (std::size_t k = 1; k < n; ++k) ks.push_back(k);
  }

  struct Partial {
    std::vector<double> rep_max;
    std::vector<double> observed;  // integrated square per entry of ks handled here, by position
    bool ties = false;
    std::exception_ptr error;
  };
  const std::size_t workers = std::min(options.workers, ks.size());
  std::vector<Partial> parts(workers);
  std::vector<double> observed(ks.size(), 0.0);
  const double scale = static_cast<double>(n) * std::sqrt(static_cast<double>(n));
  const auto& kernels = simd::active_kernels();

  auto work = [&](std::size_t wid) {
    Partial& part = parts[wid];
    try {
      part.rep_max.assign(B, -std::numeric_limits<double>::infinity());
      std::vector<double> logs_pre(n * d), logs_suf(n * d);
      std::vector<std::size_t> scratch_rank(n + 1);
      std::vector<double> w_pre(T * n), w_suf(T * n);
      std::vector<double> acc_pre(T * B), acc_suf(T * B);
      std::vector<double> row(T), stat(B);
      WeightScratch ws;
      for (std::size_t pos = wid; pos < ks.size(); pos += workers) {
        const std::size_t k = ks[pos];
        part.ties = index.log_values({1, k}, brk, logs_pre, scratch_rank) || part.ties;
        part.ties = index.log_values({k + 1, n}, brk, logs_suf, scratch_rank) || part.ties;
        const detail::LogBlock bp{logs_pre.data(), k, d};
        const detail::LogBlock bs{logs_suf.data(), n - k, d};
        const double factor = static_cast<double>(k) * static_cast<double>(n - k) / scale;
        for (std::size_t p = 0; p < T; ++p) {
          const auto t = mu.grid.point(p);
          const double a_pre = window_weights(kernels, bp, t, h, w_pre.data() + p * k, ws);
          const double a_suf = window_weights(kernels, bs, t, h, w_suf.data() + p * (n - k), ws);
          row[p] = factor * (a_pre - a_suf);
        }
        observed[pos] = integrate_squared(mu, row.data());

        std::fill(acc_pre.begin(), acc_pre.end(), 0.0);
        std::fill(acc_suf.begin(), acc_suf.end(), 0.0);
        kernels.accumulate(w_pre.data(), k, T, xi.data(), B, k, B, acc_pre.data(), B);
        kernels.accumulate(w_suf.data(), n - k, T, xi.data() + k * B, B, n - k, B, acc_suf.data(), B);
        const double c_suf = static_cast<double>(k) / scale;
        const double c_pre = static_cast<double>(n - k) / scale;
        std::fill(stat.begin(), stat.end(), 0.0);
        for (std::size_t p = 0; p < T; ++p) {
          const double wp = mu.weights[p];
          const double* sp = acc_pre.data() + p * B;
          const double* ss = acc_suf.data() + p * B;
          for (std::size_t b = 0; b < B; ++b) {
            const double v = pref[p] * (c_suf * ss[b] - c_pre * sp[b]);
            stat[b] += wp * (v * v);
          }
        }
        for (std::size_t b = 0; b < B; ++b) part.rep_max[b] = std::max(part.rep_max[b], stat[b]);
      }
    } catch (...) {
      part.error = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t wid = 0; wid < workers; ++wid) pool.emplace_back(work, wid);
  }
  for (const Partial& part : parts)
    if (part.error) std::rethrow_exception(part.error);

  BootstrapReport report;
  report.alpha = options.alpha;
  report.bandwidth = h;
  report.replicates.assign(B, -std::numeric_limits<double>::infinity());
  for (const Partial& part : parts) {
    report.ties = report.ties || part.ties;
    for (std::size_t b = 0; b < B; ++b) report.replicates[b] = std::max(report.replicates[b], part.rep_max[b]);
  }
  report.observed = -1.0;
  for (std::size_t pos = 0; pos < ks.size(); ++pos)
    if (observed[pos] > report.observed) {
      report.observed = observed[pos];
      report.argmax_k = ks[pos];
    }
  decide(report);
  return report;
}

}  // namespace evbreak
