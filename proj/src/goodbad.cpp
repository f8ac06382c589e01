#include "sobolab/goodbad.hpp"

#include <cmath>

namespace sobolab {

bool unit_cube_bad(int n, const IPoint& shift, int r, double eps, int depth_gap) {
  for (int k = r; k <= depth_gap; ++k) {
    const int64_t side = int64_t{1} << k;
    const double thresh = 0.5 * std::pow(static_cast<double>(side), 1.0 - eps);
    int64_t d = INT64_MAX;
    for (int a = 0; a < n; ++a) {
      const int64_t m = shift[a] & (side - 1);
      const int64_t lo = m == 0 ? 0 : m - side;
      for (int64_t c : {lo, lo + side / 2, lo + side}) {
        const int64_t gap = c <= 0 ? -c : (c >= 1 ? c - 1 : 0);
        d = std::min(d, gap);
      }
    }
    if (static_cast<double>(d) <= thresh) return true;
  }
  return false;
}

BadProbability bad_probability_mc(int n, int r, double eps, int depth_gap, int trials, uint64_t seed) {
  if (depth_gap < 1 || depth_gap > 60) fail(ErrorKind::invalid_argument, "goodbad: depth_gap must be in 1..60");
  if (!(eps > 0.0 && eps < 1.0) || r < 1) fail(ErrorKind::invalid_argument, "goodbad: need r >= 1 and 0 < eps < 1");
  BadProbability out;
  out.r = r;
  out.trials = trials;
  const uint64_t stream = derive_seed(seed, static_cast<uint64_t>(r));
  const uint64_t mask = depth_gap == 64 ? ~0ULL : ((1ULL << depth_gap) - 1);
  int64_t bad = 0;
#pragma omp parallel for reduction(+ : bad) schedule(static)
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(stream, static_cast<uint64_t>(t)));
    IPoint shift{0, 0};
    for (int a = 0; a < n; ++a) shift[a] = static_cast<int64_t>(rng.next() & mask);
    if (unit_cube_bad(n, shift, r, eps, depth_gap)) ++bad;
  }
  out.bad = bad;
  return out;
}

ProjectionSplit split_good_bad(const WaveletCoefficients& c, const GoodnessParams& p) {
  const AlpertSystem& sys = *c.sys;
  ProjectionSplit out;
  out.good = c.v;
  out.bad = Eigen::VectorXd::Zero(c.v.size());
  const DyadicGrid& g = sys.grid();
  for (int d = sys.top_depth(); d < sys.max_depth(); ++d)
    for (int64_t k = 0; k < sys.cubes_at(d); ++k) {
      const int dim = sys.basis(d, k).dim();
      if (dim == 0) continue;
      if (is_good(sys.basis(d, k).cube, g, p, g.min_depth())) continue;
      const int64_t o = sys.offset(d, k);
      out.bad.segment(o, dim) = c.v.segment(o, dim);
      out.good.segment(o, dim).setZero();
    }
  return out;
}

std::vector<double> bad_projection_norm_ratio(const DiscreteMeasure& mu, const std::vector<double>& f, int kappa,
                                              const std::vector<double>& orders, const GoodnessParams& p, int trials,
                                              uint64_t seed) {
  const int n = mu.n();
  const int64_t N = mu.leaves_per_axis();
  const LeafFunction lf = LeafFunction::from_values(n, mu.depth(), f);
  std::vector<std::vector<double>> per(static_cast<size_t>(trials), std::vector<double>(orders.size(), 0.0));
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
    IPoint shift{0, 0};
    for (int a = 0; a < n; ++a) shift[a] = rng.below(N);
    const DyadicGrid g(n, mu.depth(), shift);
    const AlpertSystem sys(mu, g, kappa);
    WaveletCoefficients c = sys.analyze(lf);
    const ProjectionSplit sp = split_good_bad(c, p);
    for (size_t i = 0; i < orders.size(); ++i) {
      const double all = norm_dyadic(c, orders[i]).homogeneous();
      WaveletCoefficients cb = c;
      cb.v = sp.bad;
      const double bad = norm_dyadic(cb, orders[i]).homogeneous();
      per[t][i] = all > 0.0 ? bad / all : 0.0;
    }
  }
  std::vector<double> mean(orders.size(), 0.0);
  for (const auto& row : per)
    for (size_t i = 0; i < orders.size(); ++i) mean[i] += row[i] / trials;
  return mean;
}

}  // namespace sobolab
