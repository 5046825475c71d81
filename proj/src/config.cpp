#include "evbreak/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace evbreak {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

// Reads typed fields and records every problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void fail(const std::string& path, const std::string& what) { problems_.push_back((path.empty() ? "/" : path) + ": " + what); }

  const json* field(const json& obj, const std::string& path, const char* key, bool required) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "/" + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  bool read(const json& obj, const std::string& path, const char* key, T& out, bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return false;
    const std::string p = path + "/" + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) return fail(p, "expected a boolean"), false;
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v->is_number_unsigned()) return fail(p, "expected a nonnegative integer"), false;
    } else if constexpr (std::is_arithmetic_v<T>) {
      if (!v->is_number()) return fail(p, "expected a number"), false;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) return fail(p, "expected a string"), false;
    }
    out = v->get<T>();
    return true;
  }

  template <class T>
  bool read_list(const json& obj, const std::string& path, const char* key, std::vector<T>& out, bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return false;
    const std::string p = path + "/" + key;
    if (!v->is_array()) return fail(p, "expected an array"), false;
    std::vector<T> values;
    bool ok = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const bool good = std::is_unsigned_v<T> ? e.is_number_unsigned() : e.is_number();
      if (!good) {
        fail(p + "/" + std::to_string(i), std::is_unsigned_v<T> ? "expected a nonnegative integer" : "expected a number");
        ok = false;
        continue;
      }
      values.push_back(e.get<T>());
    }
    if (ok) out = std::move(values);
    return ok;
  }

  // Flags keys outside `allowed`; a misspelt field would otherwise be ignored silently.
  void known(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) return;
    for (const auto& [key, value] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(path + "/" + key, "unknown field");
    }
  }

  template <class F>
  void check(const std::string& path, F&& validate) {
    try {
      validate();
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }

 private:
  std::vector<std::string>& problems_;
};

MarginSpec margin_from_json(Reader& rd, const json& j, const std::string& path) {
  std::string type;
  if (!rd.read(j, path, "type", type, true)) return UniformMargin{};
  if (type == "uniform") {
    rd.known(j, path, {"type"});
    return UniformMargin{};
  }
  if (type == "gev") {
    rd.known(j, path, {"type", "mu", "sigma", "gamma"});
    GevMargin m;
    rd.read(j, path, "mu", m.params.mu, true);
    rd.read(j, path, "sigma", m.params.sigma, true);
    rd.read(j, path, "gamma", m.params.gamma, true);
    rd.check(path, [&] { m.params.validate(); });
    return m;
  }
  if (type == "normal") {
    NormalMargin m;
    rd.known(j, path, {"type", "mean", "sd"});
    rd.read(j, path, "mean", m.mean);
    rd.read(j, path, "sd", m.sd);
    if (!(m.sd > 0.0)) rd.fail(path + "/sd", "must be positive");
    return m;
  }
  rd.fail(path + "/type", "unknown margin type '" + type + "' (uniform, gev, normal)");
  return UniformMargin{};
}

json margin_to_json(const MarginSpec& m) {
  return std::visit(
      [](const auto& x) -> json {
        using M = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<M, UniformMargin>) {
          return {{"type", "uniform"}};
        } else if constexpr (std::is_same_v<M, GevMargin>) {
          return {{"type", "gev"}, {"mu", x.params.mu}, {"sigma", x.params.sigma}, {"gamma", x.params.gamma}};
        } else {
          return {{"type", "normal"}, {"mean", x.mean}, {"sd", x.sd}};
        }
      },
      m);
}

DgpScenario scenario_from(Reader& rd, const json& j, const std::string& path) {
  DgpScenario s;
  rd.known(j, path, {"n", "seed", "segments"});
  rd.read(j, path, "n", s.n);
  rd.read(j, path, "seed", s.seed);
  const json* segs = rd.field(j, path, "segments", true);
  if (segs == nullptr) return s;
  if (!segs->is_array() || segs->empty()) {
    rd.fail(path + "/segments", "expected a non-empty array");
    return s;
  }
  for (std::size_t r = 0; r < segs->size(); ++r) {
    const json& sj = (*segs)[r];
    const std::string p = path + "/segments/" + std::to_string(r);
    ScenarioSegment seg;
    rd.known(sj, p, {"end", "copula", "margins"});
    seg.end = r + 1 == segs->size() ? 1.0 : 0.0;
    rd.read(sj, p, "end", seg.end, r + 1 < segs->size());
    const json* cj = rd.field(sj, p, "copula", true);
    if (cj != nullptr) {
      const std::string cp = p + "/copula";
      rd.known(*cj, cp, {"a", "vartheta", "tau"});
      rd.read_list(*cj, cp, "a", seg.copula.a, true);
      const bool has_theta = cj->is_object() && cj->contains("vartheta");
      const bool has_tau = cj->is_object() && cj->contains("tau");
      if (has_theta == has_tau) {
        rd.fail(cp, "give exactly one of 'vartheta' and 'tau'");
      } else if (has_theta) {
        rd.read(*cj, cp, "vartheta", seg.copula.base.vartheta);
      } else {
        double tau = 0.0;
        if (rd.read(*cj, cp, "tau", tau))
          rd.check(cp + "/tau", [&] { seg.copula.base.vartheta = khoudraji_vartheta_for_tau(seg.copula.a, tau); });
      }
      rd.check(cp, [&] { seg.copula.validate(); });
    }
    if (const json* mj = rd.field(sj, p, "margins", false)) {
      if (!mj->is_array()) {
        rd.fail(p + "/margins", "expected an array");
      } else {
        for (std::size_t q = 0; q < mj->size(); ++q)
          seg.margins.push_back(margin_from_json(rd, (*mj)[q], p + "/margins/" + std::to_string(q)));
      }
    }
    s.segments.push_back(std::move(seg));
  }
  return s;
}

GridMeasure grid_from(Reader& rd, const json& j, const std::string& path, std::size_t dim) {
  GridMeasure mu = GridMeasure::default_for(std::max<std::size_t>(dim, 2));
  if (j.is_array()) {
    if (dim != 2) {
      rd.fail(path, "a flat list of grid points is only valid for d = 2");
      return mu;
    }
    std::vector<double> ts;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        rd.fail(path + "/" + std::to_string(i), "expected a number");
        return mu;
      }
      ts.push_back(j[i].get<double>());
    }
    rd.check(path, [&] { mu = GridMeasure::uniform(SimplexGrid::bivariate(ts)); });
    return mu;
  }
  if (!j.is_object()) {
    rd.fail(path, "expected a list of points or an object with 'points' and 'weights'");
    return mu;
  }
  rd.known(j, path, {"points", "weights"});
  const json* pj = rd.field(j, path, "points", true);
  if (pj == nullptr) return mu;
  std::vector<double> coords;
  if (!pj->is_array()) {
    rd.fail(path + "/points", "expected an array");
    return mu;
  }
  for (std::size_t i = 0; i < pj->size(); ++i) {
    const json& e = (*pj)[i];
    const std::string p = path + "/points/" + std::to_string(i);
    if (e.is_number() && dim == 2) {
      coords.push_back(e.get<double>());
    } else if (e.is_array() && e.size() + 1 == dim) {
      for (const auto& c : e) coords.push_back(c.is_number() ? c.get<double>() : std::nan(""));
    } else {
      rd.fail(p, "expected " + std::to_string(dim - 1) + " coordinates (t2..td)");
      return mu;
    }
  }
  std::vector<double> weights;
  const bool has_weights = rd.read_list(j, path, "weights", weights);
  rd.check(path, [&] {
    SimplexGrid grid(dim, coords);
    mu = has_weights ? GridMeasure{grid, weights} : GridMeasure::uniform(grid);
    mu.validate();
  });
  return mu;
}

TestSpec test_from(Reader& rd, const json& j, const std::string& path) {
  TestSpec t;
  if (j.is_string()) {
    // Shorthand: "plain".
    if (j.get<std::string>() != "plain") rd.fail(path, "unknown test shorthand (use an object or \"plain\")");
    return t;
  }
  rd.known(j, path, {"label", "breaks", "kstar_fraction", "prefactor"});
  rd.read(j, path, "label", t.label);
  rd.read_list(j, path, "breaks", t.breaks);
  double kf = 0.0;
  if (rd.read(j, path, "kstar_fraction", kf)) t.k_star_fraction = kf;
  std::string pf = "adapted";
  if (rd.read(j, path, "prefactor", pf)) {
    if (pf == "adapted") t.prefactor = Prefactor::adapted;
    else if (pf == "plain") t.prefactor = Prefactor::plain;
    else rd.fail(path + "/prefactor", "expected 'adapted' or 'plain'");
  }
  return t;
}

ExperimentConfig experiment_from(Reader& rd, const json& j, const std::string& path) {
  ExperimentConfig c;
  rd.known(j, path, {"name", "scenario", "n", "tests", "sweep", "grid", "bandwidth", "B", "alpha", "replications", "seed",
                     "workers", "full"});
  rd.read(j, path, "name", c.name);
  if (const json* sj = rd.field(j, path, "scenario", true)) c.scenario = scenario_from(rd, *sj, path + "/scenario");
  rd.read_list(j, path, "n", c.n_values, true);
  if (c.n_values.empty()) rd.fail(path + "/n", "must list at least one sample size");
  if (const json* tj = rd.field(j, path, "tests", false)) {
    if (!tj->is_array() || tj->empty()) {
      rd.fail(path + "/tests", "expected a non-empty array");
    } else {
      c.tests.clear();
      for (std::size_t q = 0; q < tj->size(); ++q) c.tests.push_back(test_from(rd, (*tj)[q], path + "/tests/" + std::to_string(q)));
    }
  }
  if (const json* wj = rd.field(j, path, "sweep", false)) {
    const std::string p = path + "/sweep";
    Sweep sw;
    rd.known(*wj, p, {"parameter", "values", "segment", "margin", "tau"});
    std::string name;
    if (rd.read(*wj, p, "parameter", name, true)) {
      if (auto param = sweep_parameter_from_string(name)) sw.parameter = *param;
      else rd.fail(p + "/parameter", "unknown sweep parameter '" + name + "'");
    }
    rd.read_list(*wj, p, "values", sw.values, true);
    if (sw.values.empty()) rd.fail(p + "/values", "sweep has no values");
    rd.read(*wj, p, "segment", sw.segment);
    rd.read(*wj, p, "margin", sw.margin);
    rd.read(*wj, p, "tau", sw.tau);
    c.sweep = sw;
  }
  const std::size_t dim = c.scenario.segments.empty() ? 2 : c.scenario.dim();
  if (const json* gj = rd.field(j, path, "grid", false)) c.measure = grid_from(rd, *gj, path + "/grid", dim);
  double h = 0.0;
  if (rd.read(j, path, "bandwidth", h)) {
    c.bandwidth = h;
    rd.check(path + "/bandwidth", [&] { check_bandwidth(h); });
  }
  rd.read(j, path, "B", c.replicates);
  rd.read(j, path, "alpha", c.alpha);
  rd.read(j, path, "replications", c.replications);
  rd.read(j, path, "seed", c.seed);
  rd.read(j, path, "workers", c.workers);
  rd.check(path, [&] { c.validate(); });
  return c;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems) : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

DgpScenario scenario_from_json(const json& j) {
  std::vector<std::string> problems;
  Reader rd(problems);
  DgpScenario s = scenario_from(rd, j, "");
  if (!problems.empty()) throw ConfigError(problems);
  return s;
}

json scenario_to_json(const DgpScenario& s) {
  json segs = json::array();
  for (const auto& seg : s.segments) {
    json margins = json::array();
    for (const auto& m : seg.margins) margins.push_back(margin_to_json(m));
    json o = {{"end", seg.end}, {"copula", {{"a", seg.copula.a}, {"vartheta", seg.copula.base.vartheta}}}};
    if (!margins.empty()) o["margins"] = margins;
    segs.push_back(o);
  }
  return {{"n", s.n}, {"seed", s.seed}, {"segments", segs}};
}

GridMeasure grid_from_json(const json& j, std::size_t dim) {
  std::vector<std::string> problems;
  Reader rd(problems);
  GridMeasure mu = grid_from(rd, j, "", dim);
  if (!problems.empty()) throw ConfigError(problems);
  return mu;
}

json grid_to_json(const GridMeasure& mu) {
  json points = json::array();
  for (std::size_t p = 0; p < mu.size(); ++p) {
    const auto t = mu.grid.point(p);
    if (mu.dim() == 2) points.push_back(t[0]);
    else points.push_back(std::vector<double>(t.begin(), t.end()));
  }
  return {{"points", points}, {"weights", mu.weights}};
}

ExperimentConfig experiment_from_json(const json& j) {
  std::vector<std::string> problems;
  Reader rd(problems);
  ExperimentConfig c = experiment_from(rd, j, "");
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

json experiment_to_json(const ExperimentConfig& c) {
  json tests = json::array();
  for (const auto& t : c.tests) {
    json o = json::object();
    if (!t.label.empty()) o["label"] = t.label;
    if (!t.breaks.empty()) o["breaks"] = t.breaks;
    if (t.k_star_fraction) o["kstar_fraction"] = *t.k_star_fraction;
    if (t.prefactor == Prefactor::plain) o["prefactor"] = "plain";
    tests.push_back(o);
  }
  json o = {{"name", c.name},        {"scenario", scenario_to_json(c.scenario)},
            {"n", c.n_values},       {"tests", tests},
            {"B", c.replicates},     {"alpha", c.alpha},
            {"replications", c.replications}, {"seed", c.seed},
            {"workers", c.workers}};
  if (c.sweep)
    o["sweep"] = {{"parameter", to_string(c.sweep->parameter)}, {"values", c.sweep->values},
                  {"segment", c.sweep->segment}, {"margin", c.sweep->margin}, {"tau", c.sweep->tau}};
  if (c.measure) o["grid"] = grid_to_json(*c.measure);
  if (c.bandwidth) o["bandwidth"] = *c.bandwidth;
  return o;
}

SimulationFile simulation_from_json(const json& j) {
  std::vector<std::string> problems;
  Reader rd(problems);
  SimulationFile file;
  auto entry = [&](const json& e, const std::string& path) {
    SimulationFile::Entry out;
    out.config = experiment_from(rd, e, path);
    if (const json* fj = rd.field(e, path, "full", false)) {
      std::size_t v = 0;
      rd.known(*fj, path + "/full", {"B", "replications"});
      if (rd.read(*fj, path + "/full", "B", v)) out.full_replicates = v;
      if (rd.read(*fj, path + "/full", "replications", v)) out.full_replications = v;
    }
    file.experiments.push_back(std::move(out));
  };
  if (j.is_object() && j.contains("experiments")) {
    rd.known(j, "", {"experiments"});
    const json& list = j["experiments"];
    if (!list.is_array() || list.empty()) {
      rd.fail("/experiments", "expected a non-empty array");
    } else {
      for (std::size_t i = 0; i < list.size(); ++i) entry(list[i], "/experiments/" + std::to_string(i));
    }
  } else {
    entry(j, "");
  }
  if (!problems.empty()) throw ConfigError(problems);
  return file;
}

SimulationFile load_simulation_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("/: not valid JSON: ") + e.what()});
  }
  return simulation_from_json(j);
}

}  // namespace evbreak
