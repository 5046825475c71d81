#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "evbreak/bootstrap.hpp"
#include "evbreak/config.hpp"
#include "evbreak/copula_lab.hpp"
#include "evbreak/cusum.hpp"
#include "evbreak/dataset.hpp"
#include "evbreak/mc_harness.hpp"
#include "evbreak/pickands.hpp"
#include "evbreak/ranks.hpp"
#include "evbreak/simd/kernels.hpp"

namespace evbreak::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::size_t kMinObservations = 8;

// Failure classes mapped onto exit codes.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text, const std::string& what) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) throw UsageError(what + ": '" + text + "' is not a number");
  return x;
}

// "0.4" or "48/86".
double parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text, "--break");
  const double num = parse_number(text.substr(0, slash), "--break");
  const double den = parse_number(text.substr(slash + 1), "--break");
  if (den == 0.0) throw UsageError("--break: zero denominator in '" + text + "'");
  return num / den;
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, delim))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

// d = 2: "0.1,0.5,0.9". d > 2: points separated by ',' with coordinates t2..td joined by ':'.
GridMeasure parse_grid(const std::string& text, std::size_t d) {
  std::vector<double> coords;
  for (const auto& point : split(text, ',')) {
    const auto parts = split(point, ':');
    if (parts.size() + 1 != d)
      throw UsageError("--grid: point '" + point + "' needs " + std::to_string(d - 1) + " coordinates");
    for (const auto& p : parts) coords.push_back(parse_number(p, "--grid"));
  }
  try {
    return GridMeasure::uniform(SimplexGrid(d, coords));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
}

std::size_t worker_count(std::size_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("EVBREAK_WORKERS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
      throw UsageError("EVBREAK_WORKERS must be a positive integer");
    return v;
  }
  return 0;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> a_curve(const PseudoObsBlock& block, const GridMeasure& mu) {
  return estimate_pickands(block, mu.grid).a_values;
}

struct TestArgs {
  std::string data;
  std::vector<std::string> breaks;
  std::size_t kstar = 0;
  std::string grid;
  std::string bandwidth = "auto";
  std::size_t B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool plot_data = false;
  std::string prefactor = "adapted";
  std::string columns;
  std::string index_column;
  std::string missing = "NA";
  std::string delimiter = ",";
  std::size_t workers = 0;
};

int cmd_test(const TestArgs& a, std::ostream& out, std::ostream& err) {
  DatasetOptions dopt;
  if (a.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
  dopt.delimiter = a.delimiter == "\\t" ? '\t' : a.delimiter[0];
  dopt.missing = a.missing;
  if (!a.index_column.empty()) dopt.index_column = a.index_column;
  dopt.columns = split(a.columns, ',');
  const Dataset ds = load_dataset(a.data, dopt);
  const Sample& sample = ds.sample;
  const std::size_t n = sample.n();
  const std::size_t d = sample.d();
  if (n < kMinObservations)
    throw DataError("need at least " + std::to_string(kMinObservations) + " complete observations, found " + std::to_string(n));

  TestOptions opt;
  opt.measure = a.grid.empty() ? GridMeasure::default_for(d) : parse_grid(a.grid, d);
  if (a.bandwidth != "auto") opt.bandwidth = parse_number(a.bandwidth, "--bandwidth");
  opt.replicates = a.B;
  opt.alpha = a.alpha;
  opt.seed = a.seed;
  for (const auto& b : a.breaks) opt.breaks.push_back(parse_fraction(b));
  if (a.kstar > 0) opt.k_star = a.kstar;
  if (a.prefactor == "plain") opt.prefactor = Prefactor::plain;
  else if (a.prefactor != "adapted") throw UsageError("--prefactor must be 'adapted' or 'plain'");
  const std::size_t workers = worker_count(a.workers);
  opt.workers = workers > 0 ? workers : 1;
  BreakSpec breaks;
  try {
    opt.validate(n, d);
    breaks = BreakSpec(opt.breaks, n);
  } catch (const std::logic_error& e) {
    throw UsageError(e.what());
  }

  const BootstrapReport rep = run_test(sample, opt);
  if (!std::isfinite(rep.observed)) throw NumericError("observed statistic is not finite");
  for (double r : rep.replicates)
    if (!std::isfinite(r)) throw NumericError("a bootstrap replicate is not finite");
  if (rep.ties) err << "warning: tied observations found; ranks use <= counting\n";

  const BreakSpec* brk = breaks.empty() ? nullptr : &breaks;
  auto block_of = [&](Window w) { return brk ? pseudo_obs_breaks(sample, *brk, w) : pseudo_obs(sample, w); };

  json curves = json::array();
  const std::size_t k = rep.argmax_k;
  curves.push_back({{"segment", "all"}, {"window", {1, n}}, {"A", a_curve(block_of({1, n}), opt.measure)}});
  curves.push_back({{"segment", "before"}, {"window", {1, k}}, {"A", a_curve(block_of({1, k}), opt.measure)}});
  curves.push_back({{"segment", "after"}, {"window", {k + 1, n}}, {"A", a_curve(block_of({k + 1, n}), opt.measure)}});

  std::string variant = breaks.empty() ? "plain" : "break-adapted";
  if (opt.k_star) variant += ", fixed k*";

  json report;
  report["tool"] = {{"name", "evbreak"}, {"version", kVersion}, {"kernels", simd::active_kernels().name}};
  report["input"] = {{"path", a.data},
                     {"sha256", file_sha256(a.data)},
                     {"columns", ds.column_names},
                     {"rows_read", ds.rows_read},
                     {"rows_dropped", ds.rows_dropped},
                     {"n", n},
                     {"d", d},
                     {"missing_token", a.missing}};
  report["parameters"] = {{"variant", variant},
                          {"grid", grid_to_json(opt.measure)},
                          {"bandwidth", rep.bandwidth},
                          {"bandwidth_mode", opt.bandwidth ? "fixed" : "auto"},
                          {"B", opt.replicates},
                          {"alpha", opt.alpha},
                          {"seed", opt.seed},
                          {"breaks", opt.breaks},
                          {"break_indices", breaks.indices()},
                          {"kstar", opt.k_star ? json(*opt.k_star) : json(nullptr)},
                          {"prefactor", a.prefactor}};
  json result = {{"statistic", rep.observed},
                 {"p_value", rep.p_value},
                 {"reject", rep.reject},
                 {"threshold", finite_or_null(rep.threshold)},
                 {"argmax_k", k},
                 {"argmax_fraction", static_cast<double>(k) / static_cast<double>(n)},
                 {"ties", rep.ties}};
  if (!sample.labels().empty()) result["argmax_label"] = sample.labels()[k - 1];
  report["result"] = result;
  report["pickands"] = curves;

  namespace fs = std::filesystem;
  const fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
  if (!a.out_dir.empty() || a.plot_data) fs::create_directories(dir);
  if (a.plot_data) {
    const CusumField field = cusum_field(sample, opt.measure, brk);
    std::ofstream fcsv(dir / "field.csv");
    write_field_csv(field, fcsv);
    std::ofstream pcsv(dir / "pickands.csv");
    pcsv << "segment,t,A\n" << std::setprecision(17);
    for (const auto& c : curves)
      for (std::size_t p = 0; p < opt.measure.size(); ++p) {
        pcsv << c["segment"].get<std::string>();
        for (double x : opt.measure.grid.point(p)) pcsv << ',' << x;
        pcsv << ',' << c["A"][p].get<double>() << '\n';
      }
    report["plot_data"] = {{"field", (dir / "field.csv").string()}, {"pickands", (dir / "pickands.csv").string()}};
    if (!fcsv || !pcsv) throw DataError("cannot write plot data to '" + dir.string() + "'");
  } else {
    report["plot_data"] = nullptr;
  }

  const std::string text = report.dump(2) + "\n";
  if (a.out_dir.empty()) {
    out << text;
  } else {
    std::ofstream f(dir / "report.json", std::ios::binary);
    f << text;
    if (!f) throw DataError("cannot write '" + (dir / "report.json").string() + "'");
    out << "p-value " << rep.p_value << ", statistic " << rep.observed << ", argmax k = " << k << "; report in "
        << (dir / "report.json").string() << "\n";
  }
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  std::size_t workers = 0;
  bool full = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SimulationFile file = load_simulation_file(a.config);
  const std::size_t workers = worker_count(a.workers);
  ResultTable all;
  for (auto& e : file.experiments) {
    ExperimentConfig& c = e.config;
    if (workers > 0) c.workers = workers;
    if (a.full) {
      if (e.full_replicates) c.replicates = *e.full_replicates;
      if (e.full_replications) c.replications = *e.full_replications;
    }
    ResultTable t = c.sweep ? power_curve(c) : run_experiment(c);
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
    all.seconds.insert(all.seconds.end(), t.seconds.begin(), t.seconds.end());
  }
  all.write_pretty(out);
  if (!a.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(a.out_dir);
    std::ofstream rc(fs::path(a.out_dir) / "results.csv", std::ios::binary);
    all.write_csv(rc);
    std::ofstream tc(fs::path(a.out_dir) / "timing.csv", std::ios::binary);
    all.write_timing_csv(tc);
    if (!rc || !tc) throw DataError("cannot write results to '" + a.out_dir + "'");
  }
  if (!all.all_ok()) {
    for (const auto& r : all.rows)
      if (!r.ok()) err << "error: " << r.experiment << " n=" << r.n << " " << r.test << ": " << r.error << "\n";
    return kNumeric;
  }
  return kOk;
}

struct GenerateArgs {
  std::string scenario;
  std::string out_file;
  std::string index_column;
};

// Writes a synthetic dataset drawn from a scenario JSON, in the format `test` reads.
int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  std::ifstream in(a.scenario);
  if (!in) throw DataError("cannot open '" + a.scenario + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(a.scenario + ": " + e.what());
  }
  const Sample s = generate_scenario(scenario_from_json(j));
  std::ostringstream csv;
  csv << std::setprecision(17);
  if (!a.index_column.empty()) csv << a.index_column << ',';
  for (std::size_t c = 0; c < s.d(); ++c) csv << (c ? "," : "") << 'x' << (c + 1);
  csv << '\n';
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (!a.index_column.empty()) csv << (i + 1) << ',';
    for (std::size_t c = 0; c < s.d(); ++c) csv << (c ? "," : "") << s(i, c);
    csv << '\n';
  }
  if (a.out_file.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(a.out_file, std::ios::binary);
    f << csv.str();
    if (!f) throw DataError("cannot write '" + a.out_file + "'");
  }
  return kOk;
}

}  // namespace

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point tests for extreme-value dependence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  TestArgs ta;
  CLI::App* test = app.add_subcommand("test", "Run the CUSUM test on a delimited data file");
  test->add_option("data", ta.data, "Data file with a header line")->required();
  test->add_option("--break", ta.breaks, "Known marginal break as a fraction in (0,1), e.g. 0.5 or 48/86 (repeatable)");
  test->add_option("--kstar", ta.kstar, "Fixed break index k* (1 <= k* < n) for the two-sample variant");
  test->add_option("--grid", ta.grid, "Grid points, e.g. 0.1,0.5,0.9 (d > 2: t2:t3,... per point)");
  test->add_option("--bandwidth", ta.bandwidth, "Derivative step: auto (0.01/sqrt(n)) or a value in (0, 1/2)");
  test->add_option("--B", ta.B, "Bootstrap replicates");
  test->add_option("--alpha", ta.alpha, "Significance level");
  test->add_option("--seed", ta.seed, "Multiplier seed");
  test->add_option("--out", ta.out_dir, "Output directory for report.json");
  test->add_flag("--plot-data", ta.plot_data, "Also write field.csv and pickands.csv");
  test->add_option("--prefactor", ta.prefactor, "Full-sample estimator scaling the replicates: adapted or plain");
  test->add_option("--columns", ta.columns, "Comma-separated data columns (default: all but the index column)");
  test->add_option("--index-column", ta.index_column, "Column holding row labels such as the year");
  test->add_option("--missing", ta.missing, "Missing-value token");
  test->add_option("--delimiter", ta.delimiter, "Field delimiter");
  test->add_option("--workers", ta.workers, "Threads (default: EVBREAK_WORKERS or 1)");

  SimulateArgs sa;
  CLI::App* sim = app.add_subcommand("simulate", "Run Monte Carlo experiments from a JSON config");
  sim->add_option("config", sa.config, "Experiment config file")->required();
  sim->add_option("--out", sa.out_dir, "Directory for results.csv and timing.csv");
  sim->add_option("--workers", sa.workers, "Threads (default: EVBREAK_WORKERS or the config value)");
  sim->add_flag("--full", sa.full, "Use the full-scale B and replication counts of the config");

  GenerateArgs ga;
  CLI::App* gen = app.add_subcommand("generate", "Draw a synthetic dataset from a scenario JSON");
  gen->add_option("scenario", ga.scenario, "Scenario file (n, seed, segments)")->required();
  gen->add_option("--out", ga.out_file, "Output CSV (default: stdout)");
  gen->add_option("--index-column", ga.index_column, "Also write a 1-based index column with this name");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (test->parsed()) return cmd_test(ta, out, err);
    if (gen->parsed()) return cmd_generate(ga, out);
    return cmd_simulate(sa, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return kData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace evbreak::cli
