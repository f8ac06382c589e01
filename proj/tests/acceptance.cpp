// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers above it.
// Exit status is the number of failed criteria, not counting those named with --known=ID
// (criteria whose literal statement is infeasible; they still print FAIL).

#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sobolab/corona.hpp"
#include "sobolab/energy.hpp"
#include "sobolab/goodbad.hpp"
#include "sobolab/t1.hpp"

using namespace sobolab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  std::string id;
  bool ok = true;
  Clock::time_point t0 = Clock::now();

  explicit Criterion(std::string name) : id(std::move(name)) {}

  void need(bool cond, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    std::printf("  %s %s\n", cond ? "ok  " : "FAIL", buf);
    ok = ok && cond;
  }
  void info(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    std::printf("  info %s\n", buf);
  }
};

int failures = 0, known_failures = 0;
std::vector<std::string> known;

void finish(const Criterion& c) {
  const bool is_known = std::find(known.begin(), known.end(), c.id) != known.end();
  std::printf("%s %s (%.1f s)%s\n", c.id.c_str(), c.ok ? "PASS" : "FAIL", seconds_since(c.t0),
              !c.ok && is_known ? " [known infeasible]" : "");
  std::fflush(stdout);
  if (!c.ok) ++(is_known ? known_failures : failures);
}

MeasureSpec spec(MeasureKind k, double a = 0.0, uint64_t seed = 1) {
  MeasureSpec m;
  m.kind = k;
  m.a = {a, a};
  m.seed = seed;
  return m;
}

std::vector<MeasureSpec> doubling_suite() {
  return {spec(MeasureKind::lebesgue), spec(MeasureKind::power, 1.0), spec(MeasureKind::power, -0.5),
          spec(MeasureKind::cascade, 0.0, 7)};
}

KernelSpec frac(double alpha, double delta = 0.0) {
  KernelSpec k;
  k.alpha = alpha;
  k.delta = delta;
  return k;
}

LinearFit fit(const std::vector<double>& x, const std::vector<double>& y) { return fit_line(x, y); }

double cube_sum(const DiscreteMeasure& mu, const DyadicGrid& g, const Cube& q) {
  IPoint a, b;
  g.clipped_range(q, a, b);
  double m = 0.0;
  for (int64_t i = a[0]; i < b[0]; ++i)
    for (int64_t j = a[1]; j < b[1]; ++j) m += mu.leaf_mass(mu.leaf_index({i, mu.n() == 2 ? j : 0}));
  return m;
}

// ---------------------------------------------------------------------------

void ac01() {
  Criterion c("AC01");
  double gram = 0, mom = 0, tel = 0, rt = 0, q_gram = 0, q_mom = 0, q_rt = 0;
  for (int n : {1, 2})
    for (const MeasureSpec& ms : doubling_suite())
      for (int kappa : {1, 2, 3}) {
        const int D = n == 1 ? 6 : 5;
        const DiscreteMeasure mu = make_measure(ms, n, D);
        const DyadicGrid g(n, D);
        const AlpertSystem sys(mu, g, kappa);
        const BasisReport r = check_basis(sys, 100 + kappa, 200);
        gram = std::max(gram, r.gram_error);
        mom = std::max(mom, r.moment_error);
        tel = std::max(tel, r.telescoping_error);
        rt = std::max(rt, r.roundtrip_error);
        // Independent quadrature on a few cubes per configuration.
        Rng rng(31 + kappa);
        for (int t = 0; t < 3; ++t) {
          const int d = static_cast<int>(rng.below(D - 1));
          const int64_t k = rng.below(g.cubes_at(d));
          const Cube q = g.from_local(d, k);
          const int dim = sys.basis(d, k).dim();
          std::vector<LeafFunction> hs;
          for (int a = 0; a < dim; ++a) hs.push_back(sys.wavelet(d, k, a));
          const Point ctr = g.center(q);
          const double l = g.side(q), rm = std::sqrt(cube_sum(mu, g, q));
          for (int a = 0; a < dim; ++a) {
            for (int b = a; b < dim; ++b)
              q_gram = std::max(q_gram, std::abs(th::integrate(mu, [&](const Point& x) { return hs[a](x) * hs[b](x); }) -
                                                 (a == b ? 1.0 : 0.0)));
            for (int e0 = 0; e0 < kappa; ++e0)
              for (int e1 = 0; e1 < (n == 2 ? kappa - e0 : 1); ++e1)
                q_mom = std::max(q_mom, std::abs(th::integrate(mu, [&](const Point& x) {
                                          return hs[a](x) * std::pow((x[0] - ctr[0]) / l, e0) *
                                                 (n == 2 ? std::pow((x[1] - ctr[1]) / l, e1) : 1.0);
                                        })) / rm);
          }
        }
        // Round trip of random leaf polynomials, compared pointwise.
        LeafFunction f = LeafFunction::zeros(n, D, sys.P());
        for (int64_t k = 0; k < mu.leaf_count(); ++k)
          for (int a = 0; a < sys.P(); ++a) f.c(a, k) = rng.uniform(-1, 1);
        const LeafFunction back = sys.synthesize(sys.analyze(f).v);
        double err = 0, scale = 0;
        for (int64_t k = 0; k < mu.leaf_count(); ++k) {
          if (mu.leaf_mass(k) == 0.0) continue;
          const Point p = mu.leaf_center(k);
          const Point p2{p[0] + 0.3 * mu.leaf_side(), n == 2 ? p[1] - 0.2 * mu.leaf_side() : 0.0};
          for (const Point& x : {p, p2}) {
            err = std::max(err, std::abs(back(x) - f(x)));
            scale = std::max(scale, std::abs(f(x)));
          }
        }
        q_rt = std::max(q_rt, err / scale);
      }
  c.need(gram <= 1e-10, "Gram error %.3g (self check)", gram);
  c.need(q_gram <= 1e-10, "Gram error %.3g (6-point Gauss quadrature)", q_gram);
  c.need(mom <= 1e-10, "moment error %.3g (self check)", mom);
  c.need(q_mom <= 1e-10, "moment error %.3g (6-point Gauss quadrature)", q_mom);
  c.need(tel <= 1e-10, "telescoping error %.3g", tel);
  c.need(rt <= 1e-9, "round-trip coefficient error %.3g", rt);
  c.need(q_rt <= 1e-9, "round-trip pointwise error %.3g", q_rt);
  c.need(seconds_since(c.t0) < 120.0, "runtime %.1f s < 120 s", seconds_since(c.t0));
  finish(c);
}

void ac02() {
  Criterion c("AC02");
  double worst = 0.0, C = 0.0;
  for (int n : {1, 2})
    for (const MeasureSpec& ms : doubling_suite()) {
      const int D = n == 1 ? 6 : 4;
      const DiscreteMeasure mu = make_measure(ms, n, D);
      const DyadicGrid g(n, D);
      for (int kappa : {1, 2}) {
        const AlpertSystem sys(mu, g, kappa);
        for (int d = 0; d < D; ++d)
          for (int64_t k = 0; k < g.cubes_at(d); ++k)
            for (int a = 0; a < sys.basis(d, k).dim(); ++a)
              for (double s : {-0.25, 0.0, 0.25}) {
                const double want = std::pow(g.side(d), -s);
                worst = std::max(worst, std::abs(sobolev_norm(sys, sys.wavelet(d, k, a), s).full() - want) / want);
              }
      }
      const AlpertSystem sys(mu, g, 1);
      for (double s : {-0.25, 0.25})
        for (int d = 1; d < D; ++d)
          for (int64_t k = 0; k < g.cubes_at(d); ++k) {
            const Cube q = g.from_local(d, k);
            std::vector<double> f(static_cast<size_t>(mu.leaf_count()), 0.0);
            IPoint a, b;
            g.clipped_range(q, a, b);
            for (int64_t i = a[0]; i < b[0]; ++i)
              for (int64_t j = a[1]; j < b[1]; ++j) f[mu.leaf_index({i, j})] = 1.0;
            const double m = cube_sum(mu, g, q);
            if (!(m > 0.0)) continue;
            const double r = sobolev_norm(sys, LeafFunction::from_values(n, D, f), s).full() /
                             (std::pow(g.side(q), -s) * std::sqrt(m));
            C = std::max({C, r, 1.0 / r});
          }
    }
  c.need(worst <= 1e-12, "max relative wavelet norm error %.3g", worst);
  c.need(C <= 10.0, "indicator two-sided constant %.3f", C);
  // Rescaled to [0,1): mu = Lebesgue, tops [0,1/2) and [1/2,1), f = 1 on the right top.
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 6);
  const AlpertSystem sys(mu, DyadicGrid(1, 6), 1, 1);
  std::vector<double> f(64, 0.0);
  for (int i = 32; i < 64; ++i) f[i] = 1.0;
  double h = 0.0;
  for (double s : {0.1, 0.25, 0.5}) h = std::max(h, sobolev_norm(sys, LeafFunction::from_values(1, 6, f), s).homogeneous_sq);
  c.need(h == 0.0, "degenerate homogeneous norm %.3g", h);
  finish(c);
}

std::vector<double> full_norms(const AlpertSystem& sys, const std::vector<std::vector<double>>& ens, double s) {
  std::vector<double> out;
  for (const auto& f : ens) out.push_back(sobolev_norm(sys, LeafFunction::from_values(sys.n(), sys.max_depth(), f), s).full());
  return out;
}

void ac03() {
  Criterion c("AC03");
  for (const MeasureSpec& ms : doubling_suite())
    for (double s : {-0.1, 0.1}) {
      EquivalenceReport prev[2];
      for (int D : {6, 7}) {
        const DiscreteMeasure mu = make_measure(ms, 1, D);
        const auto ens = make_ensemble(mu, 200, 500 + D);
        const DyadicGrid g0(1, D), g1 = one_third_ensemble(1, D)[1];
        const AlpertSystem a(mu, g0, 1), b(mu, g0, 2), sh(mu, g1, 1);
        const auto na = full_norms(a, ens, s);
        const EquivalenceReport r[2] = {equivalence_ratio(na, full_norms(b, ens, s), "kappa1/kappa2"),
                                        equivalence_ratio(na, full_norms(sh, ens, s), "standard/shifted")};
        for (int i = 0; i < 2; ++i) {
          c.need(r[i].ratio_min >= 1.0 / 50 && r[i].ratio_max <= 50.0, "%s s=%g D=%d %s [%.4f, %.4f]",
                 ms.label().c_str(), s, D, r[i].description.c_str(), r[i].ratio_min, r[i].ratio_max);
          if (D == 7) {
            const double m1 = r[i].ratio_min / prev[i].ratio_min, m2 = r[i].ratio_max / prev[i].ratio_max;
            c.need(m1 > 0.5 && m1 < 2.0 && m2 > 0.5 && m2 < 2.0, "  refinement moves endpoints by %.3f, %.3f", m1, m2);
          }
          prev[i] = r[i];
        }
        if (s > 0.0) {
          const Eigen::MatrixXd W = continuous_weights(mu, s);
          std::vector<double> cont, diff;
          for (const auto& f : ens) {
            cont.push_back(std::sqrt(continuous_norm_sq(W, f)));
            diff.push_back(norm_difference(a.analyze(LeafFunction::from_values(1, D, f)), s));
          }
          const EquivalenceReport r2 = equivalence_ratio(cont, diff, "continuous/difference");
          c.need(r2.ratio_min >= 1.0 / 50 && r2.ratio_max <= 50.0, "%s s=%g D=%d continuous/difference [%.4f, %.4f]",
                 ms.label().c_str(), s, D, r2.ratio_min, r2.ratio_max);
        }
      }
    }
  finish(c);
}

void ac04() {
  Criterion c("AC04");
  const int D = 10;
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, D);
  const AlpertSystem sys(mu, DyadicGrid(1, D), 1);
  for (double s : {0.1, 0.2}) {
    std::vector<double> x, y;
    for (int N = 1; 4 * N <= (1 << D); N *= 2) {
      // 2N alternating cells of width 1/(4N) on [0, 1/2).
      std::vector<double> f(1 << D, 0.0), af(1 << D, 0.0);
      const int w = (1 << D) / (4 * N);
      for (int i = 0; i < (1 << (D - 1)); ++i) {
        f[i] = (i / w) % 2 ? -1.0 : 1.0;
        af[i] = 1.0;
      }
      const double r = std::pow(sobolev_norm(sys, LeafFunction::from_values(1, D, af), -s).full() /
                                    sobolev_norm(sys, LeafFunction::from_values(1, D, f), -s).full(),
                                2.0);
      x.push_back(std::log(N));
      y.push_back(std::log(r));
    }
    const LinearFit lf = fit(x, y);
    c.need(std::abs(lf.slope - 2 * s) <= 0.3 * 2 * s, "s=%g slope %.4f target %.2f (r2 %.4f)", s, lf.slope, 2 * s, lf.r2);
  }
  finish(c);
}

Polynomial poly(int n, bool quadratic) {
  Polynomial p;
  p.n = n;
  if (!quadratic) {
    if (n == 1) p.terms = {{{1, 0}, 2.0}, {{0, 0}, -1.0}};
    else p.terms = {{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -1.0}};
  } else {
    if (n == 1) p.terms = {{{2, 0}, 4.0}, {{1, 0}, -4.0}, {{0, 0}, 1.0}};
    else p.terms = {{{2, 0}, 1.0}, {{1, 0}, -1.0}, {{0, 2}, 1.0}, {{0, 1}, -1.0}, {{0, 0}, 0.375}};
  }
  return p;
}

void ac05() {
  Criterion c("AC05");
  for (int n : {1, 2})
    for (const MeasureSpec& ms : doubling_suite()) {
      const int D = n == 1 ? 8 : 6;
      const DiscreteMeasure mu = make_measure(ms, n, D);
      const DyadicGrid g(n, D);
      for (bool quad : {false, true}) {
        const LinearFit f = halo_decay_fit(mu, g.root(), poly(n, quad));
        c.need(f.slope > 0.0 && f.r2 >= 0.9, "n=%d %s %s theta %.4f r2 %.4f", n, ms.label().c_str(),
               quad ? "quadratic" : "linear", f.slope, f.r2);
      }
    }
  finish(c);
}

void ac06() {
  Criterion c("AC06");
  for (double eps : {0.25, 0.5}) {
    std::vector<double> x, y;
    std::string probs;
    for (int r = 2; r <= 8; ++r) {
      const BadProbability b = bad_probability_mc(1, r, eps, 20, 10000, 20240917);
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.4f", b.estimate());
      probs += buf;
      if (b.bad > 0) {
        x.push_back(r);
        y.push_back(std::log2(b.estimate()));
      }
    }
    const LinearFit f = fit(x, y);
    c.info("eps=%g P_bad r=2..8:%s", eps, probs.c_str());
    c.need(f.slope <= -eps * 0.7, "eps=%g slope %.4f bound %.4f", eps, f.slope, -eps * 0.7);
    // Beyond r = 8 the definition is no longer saturated; reported only.
    std::vector<double> tx, ty;
    for (int r = 9; r <= 16; ++r) {
      const BadProbability b = bad_probability_mc(1, r, eps, 20, 10000, 20240917);
      if (b.bad > 0) {
        tx.push_back(r);
        ty.push_back(std::log2(b.estimate()));
      }
    }
    if (tx.size() >= 2) c.info("eps=%g tail slope over r=9..16: %.4f", eps, fit(tx, ty).slope);
    const BadProbability a1 = bad_probability_mc(1, 4, eps, 20, 10000, 5), a2 = bad_probability_mc(1, 4, eps, 20, 10000, 5);
    c.need(a1.bad == a2.bad, "eps=%g deterministic under a fixed seed", eps);
  }
  finish(c);
}

// Standard-grid A2 by direct leaf sums.
double a2_oracle(const DiscreteMeasure& s, const DiscreteMeasure& w, double alpha) {
  const int n = s.n(), D = s.depth();
  const DyadicGrid g(n, D);
  double best = 0.0;
  for (int d = 0; d <= D; ++d)
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const Cube q = g.from_local(d, k);
      const double vol = std::pow(g.side(q), n);
      best = std::max(best, cube_sum(s, g, q) * cube_sum(w, g, q) / std::pow(vol, 2.0 * (1.0 - alpha / n)));
    }
  return best;
}

void ac07() {
  Criterion c("AC07");
  // The criterion allows any eps in [0, theta_rev]; a grid over that range is checked.
  const double fractions[4] = {0.0, 0.25, 0.5, 1.0};
  double C[4] = {0, 0, 0, 0};
  for (int n : {1, 2}) {
    const int D = n == 1 ? 7 : 4;
    std::vector<std::pair<MeasureSpec, MeasureSpec>> pairs;
    for (const MeasureSpec& m : doubling_suite()) pairs.push_back({m, m});
    pairs.push_back({spec(MeasureKind::power, -0.5), spec(MeasureKind::power, 1.0)});
    for (const auto& [ss, ws] : pairs)
      for (double alpha : {0.0, 0.5}) {
        const DiscreteMeasure s = make_measure(ss, n, D), w = make_measure(ws, n, D);
        const DoublingReport ds = doubling_exponents(s, 1, D - 1);
        PivotalParams p;
        p.alpha = alpha;
        p.kappa = std::max(1, static_cast<int>(std::ceil(ds.theta_doub + alpha - n)) + 1);
        const double a2 = a2_oracle(s, w, alpha);
        std::string row;
        for (int i = 0; i < 4; ++i) {
          p.eps = fractions[i] * ds.theta_rev;
          const double ratio = pivotal_constant(s, w, p).value / a2;
          C[i] = std::max(C[i], ratio);
          char buf[48];
          std::snprintf(buf, sizeof buf, " %.3f", ratio);
          row += buf;
        }
        c.info("n=%d %s/%s alpha=%g kappa=%d theta_rev=%.3f pivotal/A2 at eps/theta_rev=0,1/4,1/2,1:%s", n,
               ss.label().c_str(), ws.label().c_str(), alpha, p.kappa, ds.theta_rev, row.c_str());
      }
  }
  for (int i = 0; i < 4; ++i)
    c.need(C[i] <= 100.0, "eps = %.2f theta_rev: suite-wide constant %.3f", fractions[i], C[i]);
  // Depth dependence for lebesgue n=1, alpha=0: growth like 2^{D eps} means no depth-free constant.
  for (double eps : {0.25, 0.5, 1.0}) {
    std::string row;
    for (int D = 5; D <= 9; ++D) {
      const DiscreteMeasure s = make_measure(MeasureSpec{}, 1, D);
      PivotalParams p;
      p.eps = eps;
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.3f", pivotal_constant(s, s, p).value / a2_oracle(s, s, 0.0));
      row += buf;
    }
    c.info("lebesgue n=1 eps=%.2f pivotal/A2 at D=5..9:%s", eps, row.c_str());
  }
  finish(c);
}

// Poisson integral over the annulus K \ I by direct leaf sums, 1D.
double annulus_poisson(const DiscreteMeasure& mu, const Cube& J, const Cube& I, const Cube& K, double m) {
  const double N = static_cast<double>(mu.leaves_per_axis());
  const double l = J.size / N, c = (J.lo[0] + 0.5 * J.size) / N;
  double s = 0.0;
  for (int64_t i = K.lo[0]; i < K.lo[0] + K.size; ++i) {
    if (i >= I.lo[0] && i < I.lo[0] + I.size) continue;
    s += std::pow(l, m) / std::pow(l + std::abs((i + 0.5) / N - c), m + 1) * mu.leaf_mass(i);
  }
  return s;
}

void ac08() {
  Criterion c("AC08");
  double worst = 0.0, oracle_err = 0.0;
  for (const MeasureSpec& ms : {spec(MeasureKind::lebesgue), spec(MeasureKind::power, 0.5), spec(MeasureKind::power, -0.5)})
    for (int m : {1, 2})
      for (double eps : {0.25, 0.5}) {
        // Admissible triples need dist(J, bd I) > 2 l(J)^eps l(I)^{1-eps}; small eps needs a deeper mesh.
        const DiscreteMeasure mu = make_measure(ms, 1, eps < 0.5 ? 14 : 10);
        const ConstantReport r = poisson_decay_sweep(mu, m, 0.0, eps, 1000, 77);
        worst = std::max(worst, r.value);
        c.need(r.iterations == 1000, "%s m=%d eps=%g: %d triples, max ratio %.4f", ms.label().c_str(), m, eps,
               r.iterations, r.value);
      }
  // Spot check of the ratio itself against direct sums.
  const DiscreteMeasure mu = make_measure(spec(MeasureKind::power, 0.5), 1, 10);
  const DyadicGrid g(1, 10);
  Rng rng(3);
  int checked = 0;
  for (int t = 0; t < 4000 && checked < 200; ++t) {
    const Cube K = g.from_local(1, rng.below(2));
    Cube I = g.child(K, static_cast<int>(rng.below(2)));
    Cube J = I;
    const int dj = I.depth + 2 + static_cast<int>(rng.below(6));
    while (J.depth < dj) J = g.child(J, static_cast<int>(rng.below(2)));
    if (!poisson_decay_admissible(g, J, I, K, 0.5)) continue;
    const double v = poisson_decay_ratio(g, J, I, K, mu, 1, 0.0, 0.5);
    const double lj = g.side(J), li = g.side(I);
    const double want = annulus_poisson(mu, J, I, K, 1) /
                        (std::pow(lj / li, 1 - 0.5 * 2) * annulus_poisson(mu, I, I, K, 1));
    oracle_err = std::max(oracle_err, std::abs(v - want) / want);
    ++checked;
  }
  c.need(checked > 50 && oracle_err < 1e-10, "%d triples match direct sums (rel err %.2g)", checked, oracle_err);
  c.need(worst <= 50.0, "single constant %.4f <= 50", worst);
  finish(c);
}

void ac09() {
  Criterion c("AC09");
  for (const MeasureSpec& ms : {spec(MeasureKind::lebesgue), spec(MeasureKind::power, 0.5)})
    for (int kappa : {1, 2}) {
      double v[2];
      for (int i = 0; i < 2; ++i) {
        const DiscreteMeasure mu = make_measure(ms, 1, 6 + i);
        v[i] = monotonicity_sweep(mu, kappa, 0.1, 0.5, frac(0.5, 0.0625), 1000, 11).value;
      }
      const double move = std::max(v[0], v[1]) / std::min(v[0], v[1]);
      c.need(std::isfinite(v[0]) && std::isfinite(v[1]) && v[0] > 0 && move < 2.0,
             "%s kappa=%d max lhs/(Phi^2+Psi^2): D6 %.4f D7 %.4f (x%.3f)", ms.label().c_str(), kappa, v[0], v[1], move);
    }
  for (int kappa : {1, 2}) {
    const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 7);
    const auto res = energy_constant_sweep(mu, kappa, 0.1, frac(0.5), {2.0, 4.0, 8.0}, 300, 13);
    c.need(res[0].value >= res[1].value && res[1].value >= res[2].value && res[2].samples > 0,
           "kappa=%d C_gamma at 2,4,8: %.4f %.4f %.4f (%d %d %d samples)", kappa, res[0].value, res[1].value,
           res[2].value, res[0].samples, res[1].samples, res[2].samples);
  }
  finish(c);
}

void ac10() {
  Criterion c("AC10");
  for (const auto& [ss, ws] : {std::pair{spec(MeasureKind::power, -0.5), spec(MeasureKind::power, 0.5)},
                               std::pair{spec(MeasureKind::lebesgue), spec(MeasureKind::power, 1.0)}}) {
    double q[2] = {0, 0};
    for (int i = 0; i < 2; ++i) {
      const int D = 7 + i;
      const DiscreteMeasure s = make_measure(ss, 1, D), w = make_measure(ws, 1, D);
      const double eps = 0.4;
      PivotalParams p;
      const double V = pivotal_constant(s, w, p).value;
      const CoronaForest f = build_corona(s, w, 2.02 * V, 1, 0.0);
      const double carl = carleson_constant(f, s, 0.0).value;
      c.need(carl <= 2.0, "%s/%s D=%d gamma=2.02*%.4f: %zu stopping cubes, Carleson %.4f", ss.label().c_str(),
             ws.label().c_str(), D, V, f.nodes.size(), carl);
      // A smaller threshold gives deeper trees for the overlap count.
      const CoronaForest deep = build_corona(s, w, 0.25 * V, 1, 0.0);
      for (int tau : {1, 2, 3}) {
        const int ov = shifted_corona_assign(deep, tau).max_overlap;
        c.need(ov <= tau, "  tau=%d overlap %d (%zu stopping cubes)", tau, ov, deep.nodes.size());
      }
      q[i] = quasiorthogonality_ratio(deep, make_ensemble(w, 40, 9), eps / 4, 1, w);
    }
    const double move = std::max(q[0], q[1]) / std::min(q[0], q[1]);
    c.need(std::isfinite(q[0]) && std::isfinite(q[1]) && move < 2.0, "  quasiorthogonality s=0.1: D7 %.4f D8 %.4f", q[0],
           q[1]);
  }
  finish(c);
}

void ac11() {
  Criterion c("AC11");
  const auto s5 = t1_suite(1, 5), s6 = t1_suite(1, 6);
  double a2max = 0.0;
  for (size_t i = 0; i < s5.size(); ++i) {
    const T1Report a = run_t1_experiment(s5[i]), b = run_t1_experiment(s6[i]);
    for (const T1Report* r : {&a, &b}) {
      const double t = std::max(r->T_fwd, r->T_dual) / r->N;
      c.need(t <= 1 + 1e-6 && r->converged, "%s D=%d testing/N %.6f", s5[i].label.c_str(), r == &a ? 5 : 6, t);
      a2max = std::max(a2max, r->sqrtA2 / r->N);
    }
    const double move = b.ratio_upper / a.ratio_upper - 1.0;
    c.need(std::isfinite(a.ratio_upper) && std::abs(move) <= 0.2, "  N/(T+T*+sqrtA2) D5 %.4f D6 %.4f (%+.1f%%)",
           a.ratio_upper, b.ratio_upper, 100 * move);
  }
  c.need(std::isfinite(a2max) && a2max > 0.0, "suite-wide sqrtA2/N constant %.4f", a2max);
  c.need(seconds_since(c.t0) < 900.0, "runtime %.1f s < 900 s", seconds_since(c.t0));
  finish(c);
}

void ac12() {
  Criterion c("AC12");
  std::vector<std::pair<std::string, Eigen::MatrixXd>> mats;
  for (int D : {5, 6})
    for (const T1Config& t : t1_suite(1, D)) {
      const DiscreteMeasure s = make_measure(t.sigma, 1, D), w = make_measure(t.omega, 1, D);
      const OperatorSetup op = make_operator(t.kernel, s, w);
      const DyadicGrid g(1, D);
      const AlpertSystem ss(s, g, t.kappa), so(w, g, t.kappa);
      mats.push_back({t.label + " D=" + std::to_string(D), scale_matrix(assemble_matrix(op, ss, so), ss, so, t.s)});
    }
  for (int kappa : {1, 2}) {
    const DiscreteMeasure s = make_measure(spec(MeasureKind::power, -0.5), 2, 4), w = make_measure(spec(MeasureKind::power, 0.5), 2, 4);
    const OperatorSetup op = make_operator(frac(1.0), s, w);
    const DyadicGrid g(2, 4);
    const AlpertSystem ss(s, g, kappa), so(w, g, kappa);
    mats.push_back({"2D fractional kappa=" + std::to_string(kappa), scale_matrix(assemble_matrix(op, ss, so), ss, so, 0.1)});
  }
  {
    const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 9);
    const AlpertSystem sys(mu, DyadicGrid(1, 9), 1);
    mats.push_back({"lebesgue D=9 fractional", scale_matrix(assemble_matrix(make_operator(frac(0.5), mu, mu), sys, sys), sys, sys, 0.1)});
  }
  Rng rng(12);
  for (int dim : {10, 100, 512}) {
    Eigen::MatrixXd R(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) R(i, j) = rng.normal();
    mats.push_back({"random " + std::to_string(dim), R});
  }
  double worst = 0.0;
  for (const auto& [name, M] : mats) {
    if (M.rows() > 512 || M.cols() > 512) continue;
    const double sv = Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues()(0);
    const double pw = operator_norm(M).value;
    const double e = std::abs(pw - sv) / sv;
    worst = std::max(worst, e);
    if (e > 1e-6) c.info("%s: power %.10g svd %.10g", name.c_str(), pw, sv);
  }
  c.need(worst <= 1e-6, "%zu matrices, max relative deviation %.3g", mats.size(), worst);
  finish(c);
}

}  // namespace

int main(int argc, char** argv) {
  // Plain arguments restrict the run to the named criteria, e.g. `acceptance AC07 AC08`.
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--known=", 0) == 0) known.push_back(a.substr(8));
    else only.push_back(a);
  }
  auto want = [&](const char* id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  const auto t0 = Clock::now();
  const std::pair<const char*, void (*)()> all[] = {{"AC01", ac01}, {"AC02", ac02}, {"AC03", ac03}, {"AC04", ac04},
                                                    {"AC05", ac05}, {"AC06", ac06}, {"AC07", ac07}, {"AC08", ac08},
                                                    {"AC09", ac09}, {"AC10", ac10}, {"AC11", ac11}, {"AC12", ac12}};
  int ran = 0;
  for (const auto& [id, fn] : all)
    if (want(id)) {
      fn();
      ++ran;
    }
  std::printf("%d of %d criteria failed (%d more known infeasible), total %.1f s\n", failures, ran, known_failures,
              seconds_since(t0));
  return failures;
}
