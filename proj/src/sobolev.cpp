#include "sobolab/sobolev.hpp"

#include <cmath>
#include <numbers>

namespace sobolab {

double NormParts::homogeneous() const { return std::sqrt(homogeneous_sq); }
double NormParts::full() const { return std::sqrt(homogeneous_sq + coarse_sq); }

void check_order(double s) {
  if (!(std::abs(s) < 1.0)) fail(ErrorKind::invalid_argument, "sobolev order must satisfy |s| < 1");
}

double side_weight(const DyadicGrid& g, int depth, double s) { return std::pow(g.side(depth), -2.0 * s); }

NormParts norm_dyadic(const WaveletCoefficients& c, double s) {
  check_order(s);
  const AlpertSystem& sys = *c.sys;
  const DyadicGrid& g = sys.grid();
  NormParts p;
  for (int d = sys.top_depth(); d < sys.max_depth(); ++d) {
    const double w = side_weight(g, d, s);
    double acc = 0.0;
    for (int64_t k = 0; k < sys.cubes_at(d); ++k) {
      const int dim = sys.basis(d, k).dim();
      if (dim > 0) acc += c.v.segment(sys.offset(d, k), dim).squaredNorm();
    }
    p.homogeneous_sq += w * acc;
  }
  const double wt = side_weight(g, sys.top_depth(), s);
  for (int64_t t = 0; t < sys.cubes_at(sys.top_depth()); ++t) p.coarse_sq += wt * c.coarse(t).squaredNorm();
  return p;
}

NormParts sobolev_norm(const AlpertSystem& sys, const LeafFunction& f, double s) {
  return norm_dyadic(sys.analyze(f), s);
}

double norm_difference(const WaveletCoefficients& c, double s) {
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "difference norm requires s > 0");
  check_order(s);
  const AlpertSystem& sys = *c.sys;
  const DyadicGrid& g = sys.grid();
  double total = 0.0, tower = 0.0;
  for (int d = sys.top_depth(); d < sys.max_depth(); ++d) {
    // Every cube containing a depth-d cube, from the tops down to itself.
    tower += side_weight(g, d, s);
    double acc = 0.0;
    for (int64_t k = 0; k < sys.cubes_at(d); ++k) {
      const int dim = sys.basis(d, k).dim();
      if (dim > 0) acc += c.v.segment(sys.offset(d, k), dim).squaredNorm();
    }
    total += tower * acc;
  }
  return std::sqrt(total);
}

double norm_difference_pairwise(const DiscreteMeasure& mu, const DyadicGrid& g, const std::vector<double>& f,
                                double s, int top_depth) {
  if (!(s > 0.0)) fail(ErrorKind::invalid_argument, "difference norm requires s > 0");
  const int n = mu.n();
  double total = 0.0;
  for (int d = top_depth; d < g.max_depth(); ++d) {
    const double w = side_weight(g, d, s);
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const Cube q = g.from_local(d, k);
      IPoint a, b;
      g.clipped_range(q, a, b);
      std::vector<int64_t> idx;
      for (int64_t i = a[0]; i < b[0]; ++i)
        for (int64_t j = a[1]; j < b[1]; ++j) idx.push_back(mu.leaf_index({i, n == 2 ? j : 0}));
      double mass = 0.0, acc = 0.0;
      for (int64_t x : idx) mass += mu.leaf_mass(x);
      if (mass <= 0.0) continue;
      for (size_t u = 0; u < idx.size(); ++u)
        for (size_t v = u + 1; v < idx.size(); ++v) {
          const double df = f[idx[u]] - f[idx[v]];
          acc += df * df * mu.leaf_mass(idx[u]) * mu.leaf_mass(idx[v]);
        }
      // Unordered pairs counted once, which absorbs the factor 1/2.
      total += w * acc / mass;
    }
  }
  return std::sqrt(total);
}

double norm_continuous(const DiscreteMeasure& mu, const std::vector<double>& f, double s, ContinuousOptions opt) {
  const Eigen::MatrixXd W = continuous_weights(mu, s, opt);
  return std::sqrt(continuous_norm_sq(W, f));
}

DualityResult duality_pairing(const WaveletCoefficients& f, const WaveletCoefficients& g, double s) {
  if (f.sys != g.sys) fail(ErrorKind::invalid_argument, "duality: coefficients from different systems");
  DualityResult r;
  r.pairing = f.v.dot(g.v);
  r.bound = norm_dyadic(f, s).full() * norm_dyadic(g, -s).full();
  return r;
}

EquivalenceReport equivalence_ratio(const std::vector<double>& a, const std::vector<double>& b,
                                    const std::string& description) {
  if (a.size() != b.size() || a.empty()) fail(ErrorKind::invalid_argument, "equivalence: empty or mismatched ensemble");
  EquivalenceReport r;
  r.description = description;
  r.ratio_min = INFINITY;
  r.ratio_max = 0.0;
  double scale = 0.0;
  for (size_t i = 0; i < a.size(); ++i) scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  for (size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 1e-13 * scale) || !(b[i] > 1e-13 * scale)) {
      ++r.skipped;
      continue;
    }
    const double q = a[i] / b[i];
    r.ratio_min = std::min(r.ratio_min, q);
    r.ratio_max = std::max(r.ratio_max, q);
    ++r.count;
  }
  if (r.count == 0) fail(ErrorKind::invalid_argument, "equivalence: every ensemble member has zero norm");
  return r;
}

std::vector<std::vector<double>> make_ensemble(const DiscreteMeasure& mu, int count, uint64_t seed) {
  const int n = mu.n(), D = mu.depth();
  const int64_t N = mu.leaves_per_axis(), L = mu.leaf_count();
  const DyadicGrid g(n, D);
  const AlpertSystem haar(mu, g, 1);
  std::vector<std::vector<double>> out;
  for (int m = 0; m < count; ++m) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(m)));
    std::vector<double> f(static_cast<size_t>(L), 0.0);
    switch (m % 4) {
      case 0: {
        const double t = rng.uniform(0.0, 0.5);
        Eigen::VectorXd v(haar.dimension());
        for (int64_t k = 0; k < v.size(); ++k) {
          const double side = static_cast<double>(haar.entry_side(k)) / N;
          v(k) = rng.normal() * std::pow(side, t);
        }
        const LeafFunction lf = haar.synthesize(v);
        for (int64_t k = 0; k < L; ++k) f[k] = lf.c(0, k);
        break;
      }
      case 1: {
        const int d = static_cast<int>(rng.below(D + 1));
        const Cube q = g.from_local(d, rng.below(g.cubes_at(d)));
        IPoint a, b;
        g.clipped_range(q, a, b);
        for (int64_t i = a[0]; i < b[0]; ++i)
          for (int64_t j = a[1]; j < b[1]; ++j) f[mu.leaf_index({i, n == 2 ? j : 0})] = 1.0;
        break;
      }
      case 2: {
        IPoint a{0, 0}, b{1, 1};
        for (int ax = 0; ax < n; ++ax) {
          int64_t u = rng.below(N), v = rng.below(N);
          if (u > v) std::swap(u, v);
          a[ax] = u;
          b[ax] = v + 1;
        }
        for (int64_t i = a[0]; i < b[0]; ++i)
          for (int64_t j = a[1]; j < b[1]; ++j) f[mu.leaf_index({i, n == 2 ? j : 0})] = 1.0;
        break;
      }
      default: {
        const double k0 = 1 + rng.below(8), k1 = 1 + rng.below(8), ph = rng.uniform(0, 2 * std::numbers::pi);
        const double amp = rng.uniform(0.2, 1.0);
        for (int64_t k = 0; k < L; ++k) {
          const Point x = mu.leaf_center(k);
          f[k] = std::sin(2 * std::numbers::pi * k0 * x[0] + ph) + amp * std::cos(2 * std::numbers::pi * k1 * x[n - 1]);
        }
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> alternating_family(int depth, int N) {
  const int64_t L = int64_t{1} << depth;
  if (N < 1 || 4 * static_cast<int64_t>(N) > L) fail(ErrorKind::invalid_argument, "alternating family: need 4N <= 2^depth");
  const int64_t w = L / (4 * N);
  std::vector<double> f(static_cast<size_t>(L), 0.0);
  for (int64_t k = 0; k < 2 * N; ++k)
    for (int64_t i = 0; i < w; ++i) f[k * w + i] = (k % 2 == 0) ? -1.0 : 1.0;
  return f;
}

double tower_sum(const DiscreteMeasure& mu, const DyadicGrid& g, const Cube& I, double s) {
  const double mI = mu.cube_mass(I);
  double t = 0.0;
  for (int m = 0; m <= I.depth; ++m) {
    const Cube A = g.ancestor(I, m);
    t += std::pow(2.0, m * std::abs(s)) * mI / mu.cube_mass(A);
  }
  return t;
}

}  // namespace sobolab
