#include "sobolab/runner.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "sobolab/corona.hpp"
#include "sobolab/energy.hpp"
#include "sobolab/goodbad.hpp"
#include "sobolab/t1.hpp"

#ifndef SOBOLAB_VERSION
#define SOBOLAB_VERSION "unknown"
#endif

namespace sobolab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
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

namespace {

using json = nlohmann::ordered_json;

struct Out {
  std::vector<Row>& rows;
  void put(const std::string& c, const std::string& q, double v, const std::string& detail = "") {
    rows.push_back({c, q, v, "", detail});
  }
  void check(const std::string& c, const std::string& q, double v, bool ok, const std::string& detail) {
    rows.push_back({c, q, v, ok ? "pass" : "fail", detail});
  }
};

std::string sval(double s) { return format_double(s); }

Polynomial linear_poly(int n) {
  Polynomial p;
  p.n = n;
  if (n == 1) p.terms = {{{1, 0}, 2.0}, {{0, 0}, -1.0}};
  else p.terms = {{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}};
  return p;
}

Polynomial quadratic_poly(int n) {
  Polynomial p;
  p.n = n;
  // Double root at 1/2 in 1D; a circle of radius 1/sqrt(8) around the centre in 2D.
  if (n == 1) p.terms = {{{2, 0}, 4.0}, {{1, 0}, -4.0}, {{0, 0}, 1.0}};
  else p.terms = {{{2, 0}, 1.0}, {{1, 0}, -1.0}, {{0, 2}, 1.0}, {{0, 1}, -1.0}, {{0, 0}, 0.375}};
  return p;
}

void basis_checks(const ExperimentSpec& e, uint64_t seed, Out& o) {
  int mi = 0;
  for (const MeasureSpec& ms : e.measures) {
    const DiscreteMeasure mu = make_measure(ms, e.n, e.depth);
    const std::string ml = ms.label();
    const DoublingReport dr = doubling_exponents(mu, 1, e.depth - 1);
    o.put(ml, "C_doub", dr.C_doub);
    o.put(ml, "C_parent", dr.C_parent);
    o.put(ml, "theta_doub", dr.theta_doub);
    o.check(ml, "theta_rev", dr.theta_rev, dr.theta_rev > 0.0, "reverse doubling exponent positive");
    const DyadicGrid g0(e.n, e.depth);
    const Polynomial polys[2] = {linear_poly(e.n), quadratic_poly(e.n)};
    const char* pn[2] = {"halo_linear", "halo_quadratic"};
    for (int i = 0; i < 2; ++i) {
      const LinearFit f = halo_decay_fit(mu, g0.root(), polys[i]);
      o.check(ml, std::string(pn[i]) + "_theta", f.slope, f.slope > 0.0 && f.r2 >= 0.9,
              "fit r2 " + format_double(f.r2));
    }
    for (int kappa : e.kappa) {
      std::vector<DyadicGrid> grids{g0};
      if (e.shifted) grids.push_back(one_third_ensemble(e.n, e.depth)[1]);
      for (const DyadicGrid& g : grids) {
        const AlpertSystem sys(mu, g, kappa);
        const BasisReport br = check_basis(sys, derive_seed(seed, static_cast<uint64_t>(mi * 16 + kappa)));
        const double tol = g.shifted() ? 1e-8 : 1e-10;
        const double rt = g.shifted() ? 1e-8 : 1e-9;
        const std::string c = ml + " kappa=" + std::to_string(kappa) + (g.shifted() ? " shifted" : " standard");
        o.check(c, "gram_error", br.gram_error, br.gram_error <= tol, "tolerance " + format_double(tol));
        o.check(c, "moment_error", br.moment_error, br.moment_error <= tol, "tolerance " + format_double(tol));
        o.check(c, "telescoping_error", br.telescoping_error, br.telescoping_error <= tol,
                "tolerance " + format_double(tol));
        o.check(c, "roundtrip_error", br.roundtrip_error, br.roundtrip_error <= rt, "tolerance " + format_double(rt));
        o.check(c, "parseval_error", br.parseval_error, br.parseval_error <= rt, "tolerance " + format_double(rt));
        o.put(c, "reduced_cubes", br.reduced_cubes, std::to_string(br.cubes) + " cubes");
      }
    }
    ++mi;
  }
}

std::vector<double> full_norms(const AlpertSystem& sys, const std::vector<std::vector<double>>& ens, double s) {
  std::vector<double> out(ens.size());
  for (size_t i = 0; i < ens.size(); ++i)
    out[i] = sobolev_norm(sys, LeafFunction::from_values(sys.n(), sys.max_depth(), ens[i]), s).full();
  return out;
}

void equivalence_rows(Out& o, const std::string& c, const EquivalenceReport& r) {
  const bool ok = r.ratio_min >= 1.0 / 50.0 && r.ratio_max <= 50.0;
  o.check(c, r.description + " ratio_min", r.ratio_min, ok, std::to_string(r.count) + " functions");
  o.check(c, r.description + " ratio_max", r.ratio_max, ok, std::to_string(r.skipped) + " skipped");
}

void norm_equivalence(const ExperimentSpec& e, uint64_t seed, Out& o) {
  for (const MeasureSpec& ms : e.measures) {
    const DiscreteMeasure mu = make_measure(ms, e.n, e.depth);
    const auto ens = make_ensemble(mu, e.count, seed);
    const DyadicGrid g0(e.n, e.depth);
    const DyadicGrid g1 = one_third_ensemble(e.n, e.depth)[1];
    const int ka = e.kappa[0], kb = e.kappa.size() > 1 ? e.kappa[1] : e.kappa[0] + 1;
    const AlpertSystem sa(mu, g0, ka), sb(mu, g0, kb), sh(mu, g1, ka);
    for (double s : e.s) {
      const std::string c = ms.label() + " s=" + sval(s);
      const auto na = full_norms(sa, ens, s);
      equivalence_rows(o, c, equivalence_ratio(na, full_norms(sb, ens, s), "kappa" + std::to_string(ka) + "/kappa" + std::to_string(kb)));
      equivalence_rows(o, c, equivalence_ratio(na, full_norms(sh, ens, s), "standard/shifted"));
      if (s > 0.0) {
        std::vector<double> cont(ens.size()), diff(ens.size());
        const Eigen::MatrixXd W = continuous_weights(mu, s);
        for (size_t i = 0; i < ens.size(); ++i) {
          cont[i] = std::sqrt(continuous_norm_sq(W, ens[i]));
          diff[i] = norm_difference(sa.analyze(LeafFunction::from_values(e.n, e.depth, ens[i])), s);
        }
        equivalence_rows(o, c, equivalence_ratio(cont, diff, "continuous/difference"));
        if (e.n == 1 && ms.kind == MeasureKind::lebesgue) {
          // Alternating-sign family: the modulus gains a factor N^{2s} in W^{-s}.
          std::vector<double> x, y;
          for (int N = 1; 4 * N <= (1 << e.depth); N *= 2) {
            const auto f = alternating_family(e.depth, N);
            std::vector<double> af(f.size());
            for (size_t i = 0; i < f.size(); ++i) af[i] = std::abs(f[i]);
            const double r = std::pow(full_norms(sa, {af}, -s)[0] / full_norms(sa, {f}, -s)[0], 2.0);
            x.push_back(std::log(static_cast<double>(N)));
            y.push_back(std::log(r));
          }
          const LinearFit fit = fit_line(x, y);
          o.check(c, "asymmetry_slope", fit.slope, std::abs(fit.slope - 2.0 * s) <= 0.3 * 2.0 * s,
                  "target " + format_double(2.0 * s));
        }
      }
    }
  }
}

void goodbad(const ExperimentSpec& e, uint64_t seed, Out& o) {
  for (size_t ei = 0; ei < e.eps.size(); ++ei) {
    const double eps = e.eps[ei];
    const uint64_t sd = derive_seed(seed, ei);
    const std::string c = "n=" + std::to_string(e.n) + " eps=" + sval(eps);
    std::vector<double> x, y;
    for (int r : e.r) {
      const BadProbability b = bad_probability_mc(e.n, r, eps, e.depth_gap, e.trials, sd);
      o.put(c, "P_bad r=" + std::to_string(r), b.estimate(), std::to_string(b.bad) + "/" + std::to_string(b.trials));
      if (b.bad > 0) {
        x.push_back(r);
        y.push_back(std::log2(b.estimate()));
      }
    }
    if (x.size() >= 2) {
      const LinearFit f = fit_line(x, y);
      o.check(c, "log2_slope", f.slope, f.slope <= -eps * 0.7, "bound " + format_double(-eps * 0.7));
    }
    const BadProbability a = bad_probability_mc(e.n, e.r[0], eps, e.depth_gap, e.trials, sd);
    const BadProbability b = bad_probability_mc(e.n, e.r[0], eps, e.depth_gap, e.trials, sd);
    o.check(c, "determinism", a.bad == b.bad ? 1.0 : 0.0, a.bad == b.bad, "repeat with the same seed");
  }
  const DiscreteMeasure mu = make_measure(e.measures[0], e.n, e.depth);
  const auto ens = make_ensemble(mu, 1, seed);
  const GoodnessParams p{e.r[0], e.eps[0]};
  const auto ratios = bad_projection_norm_ratio(mu, ens[0], e.kappa[0], e.s, p, std::min(e.count, 64), seed);
  for (size_t i = 0; i < e.s.size(); ++i)
    o.put(e.measures[0].label(), "bad_projection_ratio s=" + sval(e.s[i]), ratios[i],
          "r=" + std::to_string(p.r) + " eps=" + format_double(p.eps));
}

void dense_cap(const DiscreteMeasure& mu) {
  if (mu.leaf_count() > 4096) fail(ErrorKind::resolution, "dense operator matrices are capped at 4096 leaves");
}

void constants(const ExperimentSpec& e, uint64_t seed, Out& o) {
  const DiscreteMeasure sigma = make_measure(e.sigma, e.n, e.depth);
  const DiscreteMeasure omega = make_measure(e.omega, e.n, e.depth);
  dense_cap(sigma);
  const int kappa = e.kappa[0];
  const OperatorSetup op = make_operator(e.kernel, sigma, omega);
  const auto ens = one_third_ensemble(e.n, e.depth);
  const std::string pair = e.sigma.label() + "/" + e.omega.label() + " " + to_string(op.kernel.family) +
                           " alpha=" + sval(op.kernel.alpha);
  const ConstantReport a2 = muckenhoupt_a2(sigma, omega, op.kernel.alpha, ens);
  o.put(pair, "A2", a2.value, a2.witness);
  PivotalParams pp;
  pp.alpha = op.kernel.alpha;
  pp.kappa = kappa;
  pp.eps = e.eps[0];
  pp.strategy = parse_pivotal_strategy(e.strategy);
  const ConstantReport piv = pivotal_constant(sigma, omega, pp);
  o.put(pair, "pivotal", piv.value, piv.witness + " (" + piv.note + ")");
  if (a2.value > 0.0) o.put(pair, "pivotal/A2", piv.value / a2.value);
  const ConstantReport dec = poisson_decay_sweep(sigma, kappa, op.kernel.alpha, e.eps[0], e.count, seed);
  o.check(pair, "poisson_decay_max", dec.value, dec.value <= 50.0,
          std::to_string(dec.iterations) + " triples; " + dec.witness);

  const DyadicGrid g(e.n, e.depth);
  const AlpertSystem ss(sigma, g, kappa), so(omega, g, kappa);
  const Eigen::MatrixXd M0 = assemble_matrix(op, ss, so);
  const TestingMode mode = parse_testing_mode(e.mode);
  for (double s : e.s) {
    const std::string c = pair + " s=" + sval(s);
    const Eigen::MatrixXd M = scale_matrix(M0, ss, so, s);
    const ConstantReport N = operator_norm(M);
    o.put(c, "operator_norm", N.value, std::to_string(N.iterations) + " iterations" + (N.converged ? "" : "; not converged"));
    if (M.rows() <= 512 && M.cols() <= 512) {
      const double top = M.size() ? Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0) : 0.0;
      const double rel = top > 0.0 ? std::abs(N.value - top) / top : std::abs(N.value);
      o.check(c, "operator_norm_vs_svd", rel, rel <= 1e-6, "dense SVD " + format_double(top));
    }
    const ConstantReport tf = testing_constant(op, so, ens, s, kappa, mode, false);
    const ConstantReport td = testing_constant(op, ss, ens, s, kappa, mode, true);
    o.put(c, std::string("testing_fwd_") + e.mode, tf.value, tf.witness);
    o.put(c, std::string("testing_dual_") + e.mode, td.value, td.witness);
    const ConstantReport tn = testing_constant(op, so, ens, s, 1, TestingMode::global, false, 0, &ss);
    const ConstantReport tdn = testing_constant(op, ss, ens, s, 1, TestingMode::global, true, 0, &so);
    const double lim = N.value * (1.0 + 1e-6) + 1e-300;
    o.check(c, "testing_fwd_normalized", tn.value, tn.value <= lim, "must not exceed the operator norm");
    o.check(c, "testing_dual_normalized", tdn.value, tdn.value <= lim, "must not exceed the operator norm");
    const ConstantReport wbp = wbp_constant(op, ens, s, kappa);
    o.put(c, "wbp", wbp.value, wbp.witness);
  }
}

void t1(const ExperimentSpec& e, uint64_t, Out& o) {
  std::vector<T1Config> cfgs;
  if (e.suite) {
    cfgs = t1_suite(e.n, e.depth);
  } else {
    for (double s : e.s) {
      T1Config c;
      c.n = e.n;
      c.depth = e.depth;
      c.sigma = e.sigma;
      c.omega = e.omega;
      c.kernel = e.kernel;
      c.s = s;
      c.kappa = e.kappa[0];
      c.label = e.sigma.label() + "/" + e.omega.label() + " " + to_string(e.kernel.family) + " s=" + sval(s);
      cfgs.push_back(c);
    }
  }
  for (const T1Config& c : cfgs) {
    dense_cap(make_measure(c.sigma, c.n, c.depth));
    const T1Report r = run_t1_experiment(c);
    const std::string l = c.label + " depth=" + std::to_string(c.depth);
    o.put(l, "N", r.N, r.witness_N);
    const double lim = r.N * (1.0 + 1e-6) + 1e-300;
    o.check(l, "T_fwd", r.T_fwd, r.T_fwd <= lim, r.witness_fwd);
    o.check(l, "T_dual", r.T_dual, r.T_dual <= lim, r.witness_dual);
    o.put(l, "sqrtA2", r.sqrtA2, r.witness_A2);
    o.put(l, "T_fwd_cube", r.T_fwd_cube);
    o.put(l, "T_dual_cube", r.T_dual_cube);
    o.put(l, "T_triple", r.T_triple);
    o.put(l, "ratio_lower", r.ratio_lower, r.applicable ? "" : "not applicable");
    o.check(l, "ratio_upper", r.ratio_upper, !r.applicable || std::isfinite(r.ratio_upper),
            r.applicable ? "finite" : "not applicable");
    o.put(l, "no_tails_C", r.no_tails_C, "eps2 = " + format_double(c.eps2));
  }
}

void corona(const ExperimentSpec& e, uint64_t seed, Out& o) {
  const DiscreteMeasure sigma = make_measure(e.sigma, e.n, e.depth);
  const DiscreteMeasure omega = make_measure(e.omega, e.n, e.depth);
  const int kappa = e.kappa[0];
  const double eps = e.eps[0];
  const double alpha = resolve_kernel(e.kernel, e.n, e.depth).alpha;
  PivotalParams pp;
  pp.alpha = alpha;
  pp.kappa = kappa;
  pp.eps = eps;
  const ConstantReport V = pivotal_constant(sigma, omega, pp);
  const double gamma = 2.02 * V.value;
  const std::string c = e.sigma.label() + "/" + e.omega.label() + " kappa=" + std::to_string(kappa) +
                        " eps=" + sval(eps);
  o.put(c, "pivotal_sup", V.value, V.witness);
  o.put(c, "gamma", gamma);
  const CoronaForest f = build_corona(sigma, omega, gamma, kappa, alpha);
  o.put(c, "stopping_cubes", static_cast<double>(f.nodes.size()), std::to_string(f.generations()) + " generations");
  const ConstantReport car = carleson_constant(f, sigma, eps);
  o.check(c, "carleson", car.value, car.value <= 2.0, car.witness);
  const double pc = pivotal_control_max(f, sigma, omega);
  o.check(c, "pivotal_control", pc, pc < 1.0, "inside coronas the stopping test fails");
  for (int tau : e.tau) {
    const ShiftedCorona sc = shifted_corona_assign(f, tau);
    o.check(c, "shifted_overlap tau=" + std::to_string(tau), sc.max_overlap, sc.max_overlap <= tau, "bound tau");
  }
  const auto ens = make_ensemble(sigma, e.count, seed);
  const double q = quasiorthogonality_ratio(f, ens, eps / 4.0, kappa, sigma);
  o.check(c, "quasiorthogonality", q, std::isfinite(q), "s = eps/4");
}

void energy(const ExperimentSpec& e, uint64_t seed, Out& o) {
  const DiscreteMeasure omega = make_measure(e.measures[0], e.n, e.depth);
  const int kappa = e.kappa[0];
  KernelSpec k = e.kernel;
  if (k.bump_order < kappa + 1) k.bump_order = kappa + 1;
  const DyadicGrid g(e.n, e.depth);
  const AlpertSystem sys(omega, g, kappa);
  for (double s : e.s) {
    const std::string c = e.measures[0].label() + " kappa=" + std::to_string(kappa) + " s=" + sval(s);
    const SweepResult m = monotonicity_sweep(omega, kappa, s, e.delta, k, e.count, seed);
    o.check(c, "monotonicity_max", m.value, std::isfinite(m.value), m.witness);
    const auto sw = energy_constant_sweep(omega, kappa, s, k, e.gamma, e.count, derive_seed(seed, 1));
    bool mono = true;
    for (size_t i = 0; i < sw.size(); ++i) {
      if (i > 0 && sw[i].value > sw[i - 1].value) mono = false;
      o.put(c, "C_gamma gamma=" + sval(e.gamma[i]), sw[i].value, std::to_string(sw[i].samples) + " samples; " + sw[i].witness);
    }
    o.check(c, "C_gamma_nonincreasing", mono ? 1.0 : 0.0, mono, "over the gamma list");
    double lo = INFINITY, hi = 0.0;
    for (int d = 0; d < e.depth; ++d)
      for (int64_t j = 0; j < g.cubes_at(d); ++j) {
        if (sys.basis(d, j).dim() == 0) continue;
        const double v = modulus_wavelet_ratio(sys, g.from_local(d, j), s);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (s == 0.0) {
      const double dev = std::max(std::abs(hi - 1.0), std::abs(lo - 1.0));
      o.check(c, "modulus_ratio_at_zero", dev, dev <= 1e-10, "max deviation from 1");
    } else {
      o.put(c, "modulus_ratio_min", lo);
      o.put(c, "modulus_ratio_max", hi);
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& e, uint64_t seed, int depth_cap) {
  ExperimentResult res;
  Out o{res.rows};
  try {
    if (e.depth > depth_cap)
      fail(ErrorKind::resolution, "depth " + std::to_string(e.depth) + " exceeds the depth cap " + std::to_string(depth_cap));
    switch (e.kind) {
      case ExperimentKind::basis_checks: basis_checks(e, seed, o); break;
      case ExperimentKind::norm_equivalence: norm_equivalence(e, seed, o); break;
      case ExperimentKind::goodbad: goodbad(e, seed, o); break;
      case ExperimentKind::constants: constants(e, seed, o); break;
      case ExperimentKind::t1: t1(e, seed, o); break;
      case ExperimentKind::corona: corona(e, seed, o); break;
      case ExperimentKind::energy: energy(e, seed, o); break;
    }
  } catch (const std::exception& ex) {
    res.failed = true;
    res.error = ex.what();
    res.rows.push_back({"", "error", std::nan(""), "error", ex.what()});
  }
  return res;
}

namespace {

json measure_json(const MeasureSpec& m) {
  json j;
  j["label"] = m.label();
  if (m.kind == MeasureKind::power) j["a"] = {m.a[0], m.a[1]};
  if (m.kind == MeasureKind::cascade) {
    j["seed"] = m.seed;
    j["lo"] = m.lo;
    j["hi"] = m.hi;
  }
  return j;
}

json spec_json(const ExperimentSpec& e, uint64_t seed) {
  json j;
  j["name"] = e.name;
  j["kind"] = to_string(e.kind);
  j["line"] = e.line;
  j["seed"] = seed;
  j["n"] = e.n;
  j["depth"] = e.depth;
  j["kappa"] = e.kappa;
  j["s"] = e.s;
  json ms = json::array();
  for (const auto& m : e.measures) ms.push_back(measure_json(m));
  j["measures"] = ms;
  j["sigma"] = measure_json(e.sigma);
  j["omega"] = measure_json(e.omega);
  j["kernel"] = {{"family", to_string(e.kernel.family)}, {"alpha", e.kernel.alpha}, {"component", e.kernel.component},
                 {"delta", e.kernel.delta}, {"R", e.kernel.R}, {"bump_order", e.kernel.bump_order}};
  j["shifted"] = e.shifted;
  j["count"] = e.count;
  j["trials"] = e.trials;
  j["r"] = e.r;
  j["eps"] = e.eps;
  j["depth_gap"] = e.depth_gap;
  j["gamma"] = e.gamma;
  j["tau"] = e.tau;
  j["delta"] = e.delta;
  j["mode"] = e.mode;
  j["strategy"] = e.strategy;
  j["suite"] = e.suite;
  return j;
}

}  // namespace

int run(const RunOptions& opt, std::string* diagnostics) {
  auto report = [&](const std::string& m) {
    if (diagnostics) *diagnostics += m + "\n";
  };
  RunConfig cfg;
  try {
    cfg = load_config(opt.config_path);
  } catch (const Error& ex) {
    report(ex.what());
    return 2;
  }
  const uint64_t seed = opt.seed ? *opt.seed : (cfg.seed ? *cfg.seed : kDefaultSeed);
  const int cap = opt.depth_cap ? *opt.depth_cap : (cfg.depth_cap ? *cfg.depth_cap : kDefaultDepthCap);
  const int jobs = std::max(1, opt.jobs);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) {
    report("cannot create output directory '" + opt.out_dir + "': " + ec.message());
    return 2;
  }

  const int64_t E = static_cast<int64_t>(cfg.experiments.size());
  std::vector<ExperimentResult> results(static_cast<size_t>(E));
  std::vector<uint64_t> seeds(static_cast<size_t>(E));
  for (int64_t i = 0; i < E; ++i) seeds[i] = derive_seed(seed, static_cast<uint64_t>(i));
  if (jobs > 1) {
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
    for (int64_t i = 0; i < E; ++i) results[i] = run_experiment(cfg.experiments[i], seeds[i], cap);
  } else {
    for (int64_t i = 0; i < E; ++i) results[i] = run_experiment(cfg.experiments[i], seeds[i], cap);
  }

  // Group rows per CSV, in config order.
  std::map<std::string, std::string> files;
  bool any_fail = false, any_error = false;
  json exps = json::array();
  for (int64_t i = 0; i < E; ++i) {
    const ExperimentSpec& e = cfg.experiments[i];
    const std::string file = csv_name(e.kind);
    std::string& body = files[file];
    if (body.empty()) body = "experiment,case,quantity,value,check,detail\n";
    int passed = 0, failed = 0;
    for (const Row& r : results[i].rows) {
      body += csv_field(e.name) + "," + csv_field(r.case_label) + "," + csv_field(r.quantity) + "," +
              format_double(r.value) + "," + r.check + "," + csv_field(r.detail) + "\n";
      if (r.check == "pass") ++passed;
      if (r.check == "fail") ++failed;
    }
    any_fail = any_fail || failed > 0;
    any_error = any_error || results[i].failed;
    json je = spec_json(e, seeds[i]);
    je["csv"] = file;
    je["status"] = results[i].failed ? "error" : (failed > 0 ? "check_failed" : "ok");
    je["rows"] = results[i].rows.size();
    je["checks_passed"] = passed;
    je["checks_failed"] = failed;
    if (results[i].failed) {
      je["error"] = results[i].error;
      report(e.name + ": " + results[i].error);
    }
    exps.push_back(je);
  }
  for (const auto& [name, body] : files) {
    std::ofstream out(fs::path(opt.out_dir) / name, std::ios::binary);
    out << body;
    if (!out) {
      report("cannot write " + name);
      return 2;
    }
  }
  json man;
  man["tool"] = "sobolab";
  man["version"] = SOBOLAB_VERSION;
  man["seed"] = seed;
  man["depth_cap"] = cap;
  man["experiments"] = exps;
  json fl = json::array();
  for (const auto& [name, body] : files) fl.push_back(name);
  man["files"] = fl;
  {
    std::ofstream out(fs::path(opt.out_dir) / "manifest.json", std::ios::binary);
    out << man.dump(2) << "\n";
    if (!out) {
      report("cannot write manifest.json");
      return 2;
    }
  }
  if (any_error) return 3;
  return any_fail ? 1 : 0;
}

}  // namespace sobolab
