#include "sobolab/poisson.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace sobolab {

Region Region::inside(const Cube& q) {
  Region r;
  r.include = true;
  r.inc_lo = q.lo;
  r.inc_hi = {q.lo[0] + q.size, q.lo[1] + q.size};
  return r;
}

Region Region::annulus(const Cube& outer, const Cube& hole) {
  Region r = inside(outer);
  r.exclude = true;
  r.exc_lo = hole.lo;
  r.exc_hi = {hole.lo[0] + hole.size, hole.lo[1] + hole.size};
  return r;
}

bool Region::contains(const IPoint& leaf, int n) const {
  bool in_inc = true, in_exc = exclude;
  for (int a = 0; a < n; ++a) {
    if (include) in_inc = in_inc && leaf[a] >= inc_lo[a] && leaf[a] < inc_hi[a];
    if (exclude) in_exc = in_exc && leaf[a] >= exc_lo[a] && leaf[a] < exc_hi[a];
  }
  return in_inc && !in_exc;
}

double poisson_integral(const DyadicGrid& g, const Cube& J, const DiscreteMeasure& mu, double m, double alpha,
                        const Region& region) {
  if (m < 1) fail(ErrorKind::invalid_argument, "poisson: order m must be >= 1");
  const int n = mu.n();
  const double l = g.side(J);
  const Point c = g.center(J);
  const double p = m + n - alpha;
  IPoint a{0, 0}, b{mu.leaves_per_axis(), n == 2 ? mu.leaves_per_axis() : 1};
  if (region.include)
    for (int ax = 0; ax < n; ++ax) {
      a[ax] = std::max<int64_t>(a[ax], region.inc_lo[ax]);
      b[ax] = std::min<int64_t>(b[ax], region.inc_hi[ax]);
    }
  double s = 0.0;
  for (int64_t i = a[0]; i < b[0]; ++i)
    for (int64_t j = a[1]; j < b[1]; ++j) {
      const IPoint leaf{i, n == 2 ? j : 0};
      if (region.exclude && !region.contains(leaf, n)) continue;
      const int64_t k = mu.leaf_index(leaf);
      const double mass = mu.leaf_mass(k);
      if (mass == 0.0) continue;
      const Point y = mu.leaf_center(k);
      double r2 = 0.0;
      for (int ax = 0; ax < n; ++ax) r2 += (y[ax] - c[ax]) * (y[ax] - c[ax]);
      s += std::pow(l, m) / std::pow(l + std::sqrt(r2), p) * mass;
    }
  return s;
}

ConstantReport muckenhoupt_a2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, double alpha,
                              const std::vector<DyadicGrid>& ensemble) {
  const int n = sigma.n();
  ConstantReport r;
  for (const DyadicGrid& g : ensemble)
    for (int d = 0; d <= g.max_depth(); ++d)
      for (int64_t k = 0; k < g.cubes_at(d); ++k) {
        const Cube q = g.from_local(d, k);
        if (g.protrudes(q)) continue;
        const double vol = std::pow(g.side(q), n);
        const double v = omega.cube_mass(q) * sigma.cube_mass(q) / std::pow(vol, 2.0 * (1.0 - alpha / n));
        if (v > r.value) {
          r.value = v;
          char buf[160];
          std::snprintf(buf, sizeof buf, "grid(%lld,%lld) depth %d lo (%lld,%lld)", static_cast<long long>(g.shift()[0]),
                        static_cast<long long>(g.shift()[1]), q.depth, static_cast<long long>(q.lo[0]),
                        static_cast<long long>(q.lo[1]));
          r.witness = buf;
        }
      }
  return r;
}

const char* to_string(PivotalStrategy s) {
  switch (s) {
    case PivotalStrategy::uniform_depth: return "uniform_depth";
    case PivotalStrategy::greedy_stopping: return "greedy_stopping";
    case PivotalStrategy::dyadic_optimal: return "dyadic_optimal";
  }
  return "?";
}

PivotalStrategy parse_pivotal_strategy(const std::string& s) {
  if (s == "uniform_depth") return PivotalStrategy::uniform_depth;
  if (s == "greedy_stopping") return PivotalStrategy::greedy_stopping;
  if (s == "dyadic_optimal") return PivotalStrategy::dyadic_optimal;
  fail(ErrorKind::invalid_argument, "unknown pivotal strategy '" + s + "'");
}

ConstantReport pivotal_constant(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const PivotalParams& p) {
  const int n = sigma.n(), D = sigma.depth();
  const DyadicGrid g(n, D);
  std::vector<Cube> tops;
  for (int d = 0; d <= D; ++d)
    for (int64_t k = 0; k < g.cubes_at(d); ++k) tops.push_back(g.from_local(d, k));
  std::vector<double> vals(tops.size(), 0.0);

#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t t = 0; t < static_cast<int64_t>(tops.size()); ++t) {
    const Cube& Q = tops[t];
    const double mq = sigma.cube_mass(Q);
    if (!(mq > 0.0)) continue;
    const Region reg = Region::inside(Q);
    const double lq = g.side(Q);
    auto w = [&](const Cube& R) {
      const double P = poisson_integral(g, R, sigma, p.kappa, p.alpha, reg);
      return P * P * std::pow(lq / g.side(R), p.eps) * omega.cube_mass(R);
    };
    double best = w(Q);
    switch (p.strategy) {
      case PivotalStrategy::uniform_depth: {
        for (int rel = 1; rel <= p.depth_t && Q.depth + rel <= D; ++rel) {
          double s = 0.0;
          const int64_t per = int64_t{1} << rel;
          for (int64_t i = 0; i < per; ++i)
            for (int64_t j = 0; j < (n == 2 ? per : 1); ++j) {
              const int64_t sz = Q.size / per;
              s += w(Cube{Q.depth + rel, {Q.lo[0] + i * sz, n == 2 ? Q.lo[1] + j * sz : 0}, sz});
            }
          best = std::max(best, s);
        }
        break;
      }
      case PivotalStrategy::greedy_stopping: {
        double s = 0.0;
        std::vector<Cube> stack = Q.depth < D ? g.children(Q) : std::vector<Cube>{};
        while (!stack.empty()) {
          const Cube R = stack.back();
          stack.pop_back();
          const double P = poisson_integral(g, R, sigma, p.kappa, p.alpha, reg);
          if (P * P * omega.cube_mass(R) >= p.gamma * sigma.cube_mass(R)) {
            s += w(R);
          } else if (R.depth < D) {
            for (const Cube& c : g.children(R)) stack.push_back(c);
          }
        }
        best = std::max(best, s);
        break;
      }
      case PivotalStrategy::dyadic_optimal: {
        std::function<double(const Cube&)> dp = [&](const Cube& R) -> double {
          const double own = w(R);
          if (R.depth == D) return own;
          double s = 0.0;
          for (const Cube& c : g.children(R)) s += dp(c);
          return std::max(own, s);
        };
        best = dp(Q);
        break;
      }
    }
    vals[t] = best / mq;
  }
  ConstantReport r;
  for (size_t t = 0; t < tops.size(); ++t)
    if (vals[t] > r.value) {
      r.value = vals[t];
      char buf[128];
      std::snprintf(buf, sizeof buf, "top depth %d lo (%lld,%lld) strategy %s", tops[t].depth,
                    static_cast<long long>(tops[t].lo[0]), static_cast<long long>(tops[t].lo[1]), to_string(p.strategy));
      r.witness = buf;
    }
  r.note = "lower bound";
  return r;
}

bool poisson_decay_admissible(const DyadicGrid& g, const Cube& J, const Cube& I, const Cube& K, double eps) {
  const int n = g.n();
  if (!contains(I, J, n) || !contains(K, I, n)) return false;
  if (J == I) return true;
  const double lj = static_cast<double>(J.size), li = static_cast<double>(I.size);
  return static_cast<double>(dist_boundary(J, I, n)) > 2.0 * std::sqrt(static_cast<double>(n)) * std::pow(lj, eps) *
                                                           std::pow(li, 1.0 - eps);
}

double poisson_decay_ratio(const DyadicGrid& g, const Cube& J, const Cube& I, const Cube& K,
                           const DiscreteMeasure& sigma, int m, double alpha, double eps) {
  if (!poisson_decay_admissible(g, J, I, K, eps))
    fail(ErrorKind::precondition, "poisson decay: need J in I in K with J far from the boundary of I");
  const Region reg = Region::annulus(K, I);
  const double pi = poisson_integral(g, I, sigma, m, alpha, reg);
  if (!(pi > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double pj = poisson_integral(g, J, sigma, m, alpha, reg);
  const double n = g.n();
  const double scale = std::pow(g.side(J) / g.side(I), m - eps * (n + m - alpha));
  return pj / (scale * pi);
}

ConstantReport poisson_decay_sweep(const DiscreteMeasure& sigma, int m, double alpha, double eps, int count,
                                   uint64_t seed) {
  const int n = sigma.n(), D = sigma.depth();
  const DyadicGrid g(n, D);
  Rng rng(seed);
  ConstantReport r;
  r.iterations = 0;
  for (int64_t attempt = 0; attempt < 200LL * count && r.iterations < count; ++attempt) {
    const int dK = static_cast<int>(rng.below(std::max(1, D - 2)));
    const Cube K = g.from_local(dK, rng.below(g.cubes_at(dK)));
    const int dI = dK + 1 + static_cast<int>(rng.below(2));
    if (dI >= D) continue;
    // Random I inside K, then J inside I.
    Cube I = K;
    while (I.depth < dI) I = g.child(I, static_cast<int>(rng.below(g.child_count())));
    const int dJ = dI + 1 + static_cast<int>(rng.below(D - dI));
    Cube J = I;
    while (J.depth < dJ) J = g.child(J, static_cast<int>(rng.below(g.child_count())));
    if (!poisson_decay_admissible(g, J, I, K, eps)) continue;
    const double v = poisson_decay_ratio(g, J, I, K, sigma, m, alpha, eps);
    if (std::isnan(v)) continue;
    ++r.iterations;
    if (v > r.value) {
      r.value = v;
      char buf[160];
      std::snprintf(buf, sizeof buf, "J depth %d lo %lld, I depth %d lo %lld, K depth %d lo %lld", J.depth,
                    static_cast<long long>(J.lo[0]), I.depth, static_cast<long long>(I.lo[0]), K.depth,
                    static_cast<long long>(K.lo[0]));
      r.witness = buf;
    }
  }
  r.converged = r.iterations == count;
  if (!r.converged) r.note = "fewer admissible triples than requested";
  return r;
}

}  // namespace sobolab
