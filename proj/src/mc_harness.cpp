#include "evbreak/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "evbreak/random.hpp"

namespace evbreak {

namespace {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string TestSpec::display_label() const {
  if (!label.empty()) return label;
  std::string s = "S";
  if (!breaks.empty()) {
    s += "^theta(";
    for (std::size_t r = 0; r < breaks.size(); ++r) s += (r ? ";" : "") + format_number(breaks[r]);
    s += ")";
  }
  if (k_star_fraction) s += "(k*=" + format_number(*k_star_fraction) + "n)";
  if (!breaks.empty() && prefactor == Prefactor::plain) s += "[plain prefactor]";
  return s;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::vartheta: return "vartheta";
    case SweepParameter::tau: return "tau";
    case SweepParameter::dvartheta: return "dvartheta";
    case SweepParameter::da: return "da";
    case SweepParameter::dmu: return "dmu";
    case SweepParameter::break_fraction: return "break_fraction";
    case SweepParameter::test_theta: return "test_theta";
  }
  return "unknown";
}

std::optional<SweepParameter> sweep_parameter_from_string(const std::string& s) {
  for (auto p : {SweepParameter::vartheta, SweepParameter::tau, SweepParameter::dvartheta, SweepParameter::da,
                 SweepParameter::dmu, SweepParameter::break_fraction, SweepParameter::test_theta})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (scenario.segments.empty()) throw std::invalid_argument("scenario has no segments");
  if (n_values.empty()) throw std::invalid_argument("n list is empty");
  if (tests.empty()) throw std::invalid_argument("no test variant given");
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (replicates < 1) throw std::invalid_argument("the bootstrap needs B >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  for (const auto& t : tests) {
    for (double theta : t.breaks)
      if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("test break fractions must lie in (0,1)");
    if (t.k_star_fraction && !(*t.k_star_fraction > 0.0 && *t.k_star_fraction < 1.0))
      throw std::invalid_argument("k* fraction must lie in (0,1)");
  }
  if (sweep && sweep->values.empty()) throw std::invalid_argument("sweep has no values");
  if (measure) measure->validate();
}

DgpScenario cell_scenario(const ExperimentConfig& config, std::size_t n, std::optional<double> sweep_value) {
  DgpScenario s = config.scenario;
  s.n = n;
  if (!config.sweep || !sweep_value) return s;
  const Sweep& sw = *config.sweep;
  const double v = *sweep_value;
  auto target = [&]() -> ScenarioSegment& {
    if (sw.segment >= s.segments.size()) throw std::invalid_argument("sweep target segment does not exist");
    return s.segments[sw.segment];
  };
  switch (sw.parameter) {
    case SweepParameter::vartheta:
      for (auto& seg : s.segments) seg.copula.base.vartheta = v;
      break;
    case SweepParameter::tau:
      for (auto& seg : s.segments) seg.copula.base.vartheta = khoudraji_vartheta_for_tau(seg.copula.a, v);
      break;
    case SweepParameter::dvartheta:
      target().copula.base.vartheta += v;
      break;
    case SweepParameter::da: {
      auto& seg = target();
      if (seg.copula.dim() != 2) throw std::invalid_argument("the da sweep is bivariate");
      seg.copula.a = {std::max(0.4 - v, 0.0), std::max(v - 0.4, 0.0)};
      seg.copula.base.vartheta = khoudraji_vartheta_for_tau(seg.copula.a, sw.tau);
      break;
    }
    case SweepParameter::dmu: {
      auto& seg = target();
      if (sw.margin >= seg.margins.size()) throw std::invalid_argument("dmu sweep needs explicit margins");
      auto* gev = std::get_if<GevMargin>(&seg.margins[sw.margin]);
      if (gev == nullptr) throw std::invalid_argument("dmu sweep needs a GEV margin");
      gev->params.mu += v;
      break;
    }
    case SweepParameter::break_fraction:
      if (s.segments.size() < 2) throw std::invalid_argument("break_fraction sweep needs two segments");
      s.segments.front().end = v;
      break;
    case SweepParameter::test_theta:
      break;
  }
  return s;
}

namespace {

struct Cell {
  std::optional<double> value;
  std::size_t n = 0;
};

// The test as run in one cell: a test_theta sweep moves the break of every adapted test.
TestSpec effective_test(const ExperimentConfig& config, const TestSpec& test, std::optional<double> sweep_value) {
  TestSpec t = test;
  if (config.sweep && config.sweep->parameter == SweepParameter::test_theta && sweep_value && !t.breaks.empty())
    t.breaks = {*sweep_value};
  return t;
}

TestOptions options_for(const ExperimentConfig& config, const TestSpec& spec, std::size_t n, std::size_t d,
                        std::optional<double> sweep_value) {
  const TestSpec test = effective_test(config, spec, sweep_value);
  TestOptions o;
  o.measure = config.measure ? *config.measure : GridMeasure::default_for(d);
  o.bandwidth = config.bandwidth;
  o.replicates = config.replicates;
  o.alpha = config.alpha;
  o.breaks = test.breaks;
  if (test.k_star_fraction) o.k_star = index_floor(n, *test.k_star_fraction);
  o.prefactor = test.prefactor;
  o.workers = 1;
  o.validate(n, d);
  return o;
}

void run_cell(const ExperimentConfig& config, const Cell& cell, ResultTable& table) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t nt = config.tests.size();
  const std::string parameter = config.sweep ? to_string(config.sweep->parameter) : "none";
  auto push_rows = [&](const std::vector<std::size_t>& rejections, const std::string& error) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t q = 0; q < nt; ++q) {
      ResultRow row;
      row.experiment = config.name;
      row.parameter = parameter;
      row.value = cell.value.value_or(0.0);
      row.n = cell.n;
      row.test = effective_test(config, config.tests[q], cell.value).display_label();
      row.replications = config.replications;
      row.error = error;
      if (error.empty()) {
        row.rejections = rejections[q];
        row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.replications);
        row.standard_error = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.replications));
      } else {
        row.rate = std::nan("");
        row.standard_error = std::nan("");
      }
      table.rows.push_back(row);
      table.seconds.push_back(seconds);
    }
  };

  DgpScenario scenario;
  std::vector<TestOptions> options;
  try {
    scenario = cell_scenario(config, cell.n, cell.value);
    scenario.validate();
    for (const auto& test : config.tests) options.push_back(options_for(config, test, cell.n, scenario.dim(), cell.value));
  } catch (const std::exception& e) {
    push_rows({}, e.what());
    return;
  }

  const std::size_t R = config.replications;
  std::vector<unsigned char> flags(R * nt, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string first_error;
  std::size_t first_error_rep = R;

  auto worker = [&] {
    std::vector<TestOptions> local = options;
    for (;;) {
      // Every claimed replication is finished, so the lowest failure is always seen.
      if (failed.load()) return;
      const std::size_t r = next.fetch_add(1);
      if (r >= R) return;
      try {
        Rng rng = make_stream(config.seed, r, StreamPurpose::data);
        const Sample sample = generate_scenario(scenario, rng);
        const std::uint64_t mult_seed = derive_seed(config.seed, r, StreamPurpose::multipliers);
        for (std::size_t q = 0; q < nt; ++q) {
          local[q].seed = mult_seed;
          flags[r * nt + q] = run_test(sample, local[q]).reject ? 1 : 0;
        }
      } catch (const std::exception& e) {
        const std::lock_guard lock(error_mutex);
        // Report the lowest failing replication so the message does not depend on scheduling.
        if (r < first_error_rep) {
          first_error_rep = r;
          first_error = "replication " + std::to_string(r) + ": " + e.what();
        }
        failed.store(true);
      }
    }
  };

  const std::size_t workers = std::min(config.workers, R);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failed.load()) {
    push_rows({}, first_error);
    return;
  }
  std::vector<std::size_t> rejections(nt, 0);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t q = 0; q < nt; ++q) rejections[q] += flags[r * nt + q];
  push_rows(rejections, "");
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.sweep) throw std::invalid_argument("run_experiment takes a config without a sweep; use power_curve");
  ResultTable table;
  for (std::size_t n : config.n_values) run_cell(config, {std::nullopt, n}, table);
  return table;
}

ResultTable power_curve(const ExperimentConfig& config) {
  if (!config.sweep || config.sweep->values.empty()) throw std::invalid_argument("power curve needs a non-empty sweep");
  config.validate();
  std::vector<double> values = config.sweep->values;
  std::stable_sort(values.begin(), values.end());
  ResultTable table;
  for (double v : values)
    for (std::size_t n : config.n_values) run_cell(config, {v, n}, table);
  return table;
}

bool ResultTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.ok(); });
}

void ResultTable::write_csv(std::ostream& out) const {
  out << "experiment,parameter,value,n,test,replications,rejections,rate,se,error\n";
  char buf[64];
  for (const auto& r : rows) {
    out << csv_field(r.experiment) << ',' << r.parameter << ',' << format_number(r.value) << ',' << r.n << ','
        << csv_field(r.test) << ',' << r.replications << ',';
    if (r.ok()) {
      out << r.rejections << ',';
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.rate, r.standard_error);
      out << buf << ',';
    } else {
      out << ",,,";
    }
    out << csv_field(r.error) << '\n';
  }
}

void ResultTable::write_timing_csv(std::ostream& out) const {
  out << "experiment,parameter,value,n,test,seconds\n";
  char buf[32];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::snprintf(buf, sizeof buf, "%.3f", i < seconds.size() ? seconds[i] : 0.0);
    out << csv_field(r.experiment) << ',' << r.parameter << ',' << format_number(r.value) << ',' << r.n << ','
        << csv_field(r.test) << ',' << buf << '\n';
  }
}

void ResultTable::write_pretty(std::ostream& out) const {
  std::size_t wexp = 10, wtest = 4;
  for (const auto& r : rows) {
    wexp = std::max(wexp, r.experiment.size());
    wtest = std::max(wtest, r.test.size());
  }
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-*s %-14s %8s %5s %-*s %8s %7s\n", static_cast<int>(wexp), "experiment",
                "parameter", "value", "n", static_cast<int>(wtest), "test", "rate(%)", "se(%)");
  out << buf;
  for (const auto& r : rows) {
    if (r.ok()) {
      std::snprintf(buf, sizeof buf, "%-*s %-14s %8s %5zu %-*s %8.1f %7.2f\n", static_cast<int>(wexp),
                    r.experiment.c_str(), r.parameter.c_str(), format_number(r.value).c_str(), r.n,
                    static_cast<int>(wtest), r.test.c_str(), 100.0 * r.rate, 100.0 * r.standard_error);
    } else {
      std::snprintf(buf, sizeof buf, "%-*s %-14s %8s %5zu %-*s  error: %s\n", static_cast<int>(wexp),
                    r.experiment.c_str(), r.parameter.c_str(), format_number(r.value).c_str(), r.n,
                    static_cast<int>(wtest), r.test.c_str(), r.error.c_str());
    }
    out << buf;
  }
}

}  // namespace evbreak
