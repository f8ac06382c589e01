#include "sobolab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace sobolab {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::basis_checks: return "basis_checks";
    case ExperimentKind::norm_equivalence: return "norm_equivalence";
    case ExperimentKind::goodbad: return "goodbad";
    case ExperimentKind::constants: return "constants";
    case ExperimentKind::t1: return "t1";
    case ExperimentKind::corona: return "corona";
    case ExperimentKind::energy: return "energy";
  }
  return "?";
}

const char* csv_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::basis_checks: return "basis_checks.csv";
    case ExperimentKind::norm_equivalence: return "norm_equivalence.csv";
    case ExperimentKind::goodbad: return "goodbad.csv";
    case ExperimentKind::constants: return "constants.csv";
    case ExperimentKind::t1: return "t1.csv";
    case ExperimentKind::corona: return "corona.csv";
    case ExperimentKind::energy: return "energy.csv";
  }
  return "?";
}

namespace {

struct Ctx {
  std::string source;

  [[noreturn]] void error(const YAML::Node& at, const std::string& msg) const {
    const int line = at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    fail(ErrorKind::config, source + ":" + std::to_string(line) + ": " + msg);
  }

  template <class T>
  T scalar(const YAML::Node& v, const std::string& field) const {
    if (!v.IsScalar()) error(v, "field '" + field + "' must be a scalar");
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      error(v, "field '" + field + "' has an invalid value '" + v.Scalar() + "'");
    }
  }

  // A scalar or a list of scalars.
  template <class T>
  std::vector<T> list(const YAML::Node& v, const std::string& field) const {
    std::vector<T> out;
    if (v.IsSequence()) {
      if (v.size() == 0) error(v, "field '" + field + "' must not be empty");
      for (const auto& e : v) out.push_back(scalar<T>(e, field));
    } else {
      out.push_back(scalar<T>(v, field));
    }
    return out;
  }

  void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
    for (const auto& kv : map) {
      const std::string key = kv.first.Scalar();
      if (!allowed.count(key)) error(kv.first, "unknown field '" + key + "' in " + where);
    }
  }

  MeasureSpec measure(const YAML::Node& v, const std::string& field) const {
    if (!v.IsMap()) error(v, "field '" + field + "' must be a mapping");
    check_keys(v, {"kind", "a", "seed", "lo", "hi", "path"}, field);
    MeasureSpec m;
    if (!v["kind"]) error(v, "field '" + field + ".kind' is required");
    const std::string kind = scalar<std::string>(v["kind"], field + ".kind");
    if (kind == "lebesgue") m.kind = MeasureKind::lebesgue;
    else if (kind == "power") m.kind = MeasureKind::power;
    else if (kind == "cascade") m.kind = MeasureKind::cascade;
    else if (kind == "table") m.kind = MeasureKind::table;
    else error(v["kind"], "field '" + field + ".kind' has unknown measure kind '" + kind + "'");
    if (v["a"]) {
      const auto a = list<double>(v["a"], field + ".a");
      if (a.size() > 2) error(v["a"], "field '" + field + ".a' takes at most two exponents");
      m.a = {a[0], a.size() > 1 ? a[1] : a[0]};
    }
    if (v["seed"]) m.seed = scalar<uint64_t>(v["seed"], field + ".seed");
    if (v["lo"]) m.lo = scalar<double>(v["lo"], field + ".lo");
    if (v["hi"]) m.hi = scalar<double>(v["hi"], field + ".hi");
    if (v["path"]) m.path = scalar<std::string>(v["path"], field + ".path");
    if (m.kind == MeasureKind::table && m.path.empty()) error(v, "field '" + field + ".path' is required for tables");
    if (m.kind == MeasureKind::power && !(m.a[0] > -1.0 && m.a[1] > -1.0))
      error(v, "field '" + field + ".a' must exceed -1");
    if (m.kind == MeasureKind::cascade && !(m.lo > 0.0 && m.lo <= m.hi && m.hi < 1.0))
      error(v, "field '" + field + "' needs 0 < lo <= hi < 1");
    return m;
  }

  KernelSpec kernel(const YAML::Node& v) const {
    if (!v.IsMap()) error(v, "field 'kernel' must be a mapping");
    check_keys(v, {"family", "alpha", "component", "delta", "R", "bump_order"}, "kernel");
    KernelSpec k;
    if (v["family"]) {
      const std::string fam = scalar<std::string>(v["family"], "kernel.family");
      try {
        k.family = parse_kernel_family(fam);
      } catch (const Error&) {
        error(v["family"], "field 'kernel.family' has unknown kernel family '" + fam + "'");
      }
    }
    if (v["alpha"]) k.alpha = scalar<double>(v["alpha"], "kernel.alpha");
    if (v["component"]) k.component = scalar<int>(v["component"], "kernel.component");
    if (v["delta"]) k.delta = scalar<double>(v["delta"], "kernel.delta");
    if (v["R"]) k.R = scalar<double>(v["R"], "kernel.R");
    if (v["bump_order"]) k.bump_order = scalar<int>(v["bump_order"], "kernel.bump_order");
    if (k.delta < 0.0 || k.R < 0.0) error(v, "field 'kernel': delta and R must be nonnegative");
    return k;
  }
};

const std::map<std::string, ExperimentKind> kKinds = {
    {"basis_checks", ExperimentKind::basis_checks}, {"norm_equivalence", ExperimentKind::norm_equivalence},
    {"goodbad", ExperimentKind::goodbad},           {"constants", ExperimentKind::constants},
    {"t1", ExperimentKind::t1},                     {"corona", ExperimentKind::corona},
    {"energy", ExperimentKind::energy}};

std::set<std::string> allowed_for(ExperimentKind k) {
  std::set<std::string> a{"kind", "name", "n", "depth"};
  auto add = [&](std::initializer_list<const char*> l) {
    for (const char* s : l) a.insert(s);
  };
  switch (k) {
    case ExperimentKind::basis_checks: add({"kappa", "measures", "shifted"}); break;
    case ExperimentKind::norm_equivalence: add({"kappa", "measures", "s", "count"}); break;
    case ExperimentKind::goodbad: add({"trials", "r", "eps", "depth_gap", "measures", "s", "kappa", "count"}); break;
    case ExperimentKind::constants: add({"sigma", "omega", "kernel", "s", "kappa", "mode", "strategy", "eps", "count"}); break;
    case ExperimentKind::t1: add({"sigma", "omega", "kernel", "s", "kappa", "suite"}); break;
    case ExperimentKind::corona: add({"sigma", "omega", "kernel", "kappa", "eps", "tau", "count"}); break;
    case ExperimentKind::energy: add({"measures", "kernel", "kappa", "s", "gamma", "delta", "count"}); break;
  }
  return a;
}

ExperimentSpec experiment(const Ctx& c, const YAML::Node& v, size_t index) {
  if (!v.IsMap()) c.error(v, "each experiment must be a mapping");
  ExperimentSpec e;
  e.line = v.Mark().line + 1;
  if (!v["kind"]) c.error(v, "field 'kind' is required");
  const std::string kind = c.scalar<std::string>(v["kind"], "kind");
  const auto it = kKinds.find(kind);
  if (it == kKinds.end()) c.error(v["kind"], "field 'kind' has unknown experiment kind '" + kind + "'");
  e.kind = it->second;
  c.check_keys(v, allowed_for(e.kind), "experiment '" + kind + "'");
  e.name = v["name"] ? c.scalar<std::string>(v["name"], "name") : kind + "_" + std::to_string(index);
  if (v["n"]) e.n = c.scalar<int>(v["n"], "n");
  if (e.n != 1 && e.n != 2) c.error(v["n"], "field 'n' must be 1 or 2");
  if (v["depth"]) e.depth = c.scalar<int>(v["depth"], "depth");
  if (e.depth < 2 || e.depth > 20) c.error(v["depth"] ? v["depth"] : v, "field 'depth' must lie in 2..20");
  if (v["kappa"]) {
    e.kappa = c.list<int>(v["kappa"], "kappa");
    for (int k : e.kappa)
      if (k < 1 || k > 4) c.error(v["kappa"], "field 'kappa' entries must lie in 1..4");
  }
  if (v["s"]) {
    e.s = c.list<double>(v["s"], "s");
    for (double s : e.s)
      if (!(std::abs(s) < 1.0)) c.error(v["s"], "field 's' entries must satisfy |s| < 1");
  }
  if (v["measures"]) {
    const YAML::Node m = v["measures"];
    if (!m.IsSequence() || m.size() == 0) c.error(m, "field 'measures' must be a non-empty list");
    e.measures.clear();
    for (size_t i = 0; i < m.size(); ++i) e.measures.push_back(c.measure(m[i], "measures[" + std::to_string(i) + "]"));
  }
  if (v["sigma"]) e.sigma = c.measure(v["sigma"], "sigma");
  if (v["omega"]) e.omega = c.measure(v["omega"], "omega");
  if (v["kernel"]) e.kernel = c.kernel(v["kernel"]);
  if (v["shifted"]) e.shifted = c.scalar<bool>(v["shifted"], "shifted");
  if (v["suite"]) e.suite = c.scalar<bool>(v["suite"], "suite");
  if (v["count"]) e.count = c.scalar<int>(v["count"], "count");
  if (e.count < 1) c.error(v["count"], "field 'count' must be positive");
  if (v["trials"]) e.trials = c.scalar<int>(v["trials"], "trials");
  if (e.trials < 1) c.error(v["trials"], "field 'trials' must be positive");
  if (v["r"]) e.r = c.list<int>(v["r"], "r");
  if (v["eps"]) e.eps = c.list<double>(v["eps"], "eps");
  for (double x : e.eps)
    if (!(x > 0.0 && x < 1.0)) c.error(v["eps"], "field 'eps' entries must lie in (0, 1)");
  if (v["depth_gap"]) e.depth_gap = c.scalar<int>(v["depth_gap"], "depth_gap");
  if (v["gamma"]) e.gamma = c.list<double>(v["gamma"], "gamma");
  if (v["tau"]) e.tau = c.list<int>(v["tau"], "tau");
  if (v["delta"]) e.delta = c.scalar<double>(v["delta"], "delta");
  if (v["mode"]) {
    e.mode = c.scalar<std::string>(v["mode"], "mode");
    if (e.mode != "cube" && e.mode != "triple" && e.mode != "global")
      c.error(v["mode"], "field 'mode' has unknown testing mode '" + e.mode + "'");
  }
  if (v["strategy"]) {
    e.strategy = c.scalar<std::string>(v["strategy"], "strategy");
    if (e.strategy != "uniform_depth" && e.strategy != "greedy_stopping" && e.strategy != "dyadic_optimal")
      c.error(v["strategy"], "field 'strategy' has unknown pivotal strategy '" + e.strategy + "'");
  }
  return e;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source_name) {
  const Ctx c{source_name};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& ex) {
    fail(ErrorKind::config, source_name + ":" + std::to_string(ex.mark.line + 1) + ": " + ex.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) c.error(root, "top level must be a mapping");
  c.check_keys(root, {"seed", "depth_cap", "experiments"}, "top level");
  if (root["seed"]) cfg.seed = c.scalar<uint64_t>(root["seed"], "seed");
  if (root["depth_cap"]) cfg.depth_cap = c.scalar<int>(root["depth_cap"], "depth_cap");
  if (root["experiments"]) {
    const YAML::Node ex = root["experiments"];
    if (ex.IsNull()) return cfg;
    if (!ex.IsSequence()) c.error(ex, "field 'experiments' must be a list");
    std::set<std::string> names;
    for (size_t i = 0; i < ex.size(); ++i) {
      cfg.experiments.push_back(experiment(c, ex[i], i));
      if (!names.insert(cfg.experiments.back().name).second)
        c.error(ex[i], "duplicate experiment name '" + cfg.experiments.back().name + "'");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace sobolab
