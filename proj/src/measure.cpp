#include "sobolab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sobolab {

std::string MeasureSpec::label() const {
  char buf[128];
  switch (kind) {
    case MeasureKind::lebesgue: return "lebesgue";
    case MeasureKind::power:
      std::snprintf(buf, sizeof buf, "power(%g,%g)", a[0], a[1]);
      return buf;
    case MeasureKind::cascade:
      std::snprintf(buf, sizeof buf, "cascade(%llu,%g,%g)", static_cast<unsigned long long>(seed), lo, hi);
      return buf;
    case MeasureKind::table: return "table(" + path + ")";
  }
  return "?";
}

DiscreteMeasure::DiscreteMeasure(int n, int depth, std::vector<double> masses)
    : n_(n), D_(depth), mass_(std::move(masses)) {
  if (n != 1 && n != 2) fail(ErrorKind::invalid_argument, "measure: dimension must be 1 or 2");
  if (depth <= 0) fail(ErrorKind::invalid_argument, "measure: depth must be positive");
  N_ = int64_t{1} << depth;
  const int64_t expect = n == 1 ? N_ : N_ * N_;
  if (static_cast<int64_t>(mass_.size()) != expect)
    fail(ErrorKind::invalid_argument, "measure: leaf count does not match depth");
  for (double m : mass_)
    if (!(m >= 0.0) || !std::isfinite(m)) fail(ErrorKind::invalid_argument, "measure: negative or non-finite leaf mass");
  if (n == 1) {
    prefix_.assign(N_ + 1, 0.0L);
    for (int64_t i = 0; i < N_; ++i) prefix_[i + 1] = prefix_[i] + mass_[i];
  } else {
    const int64_t S = N_ + 1;
    prefix_.assign(S * S, 0.0L);
    for (int64_t i = 0; i < N_; ++i)
      for (int64_t j = 0; j < N_; ++j)
        prefix_[(i + 1) * S + j + 1] =
            mass_[i * N_ + j] + prefix_[i * S + j + 1] + prefix_[(i + 1) * S + j] - prefix_[i * S + j];
  }
  total_ = static_cast<double>(n == 1 ? prefix_[N_] : prefix_[(N_ + 1) * (N_ + 1) - 1]);
  if (!(total_ > 0.0)) fail(ErrorKind::degenerate_measure, "measure: total mass must be positive");
}

double DiscreteMeasure::leaf_volume() const { return std::pow(leaf_side(), n_); }

IPoint DiscreteMeasure::leaf_coords(int64_t idx) const {
  if (n_ == 1) return {idx, 0};
  return {idx / N_, idx % N_};
}

Point DiscreteMeasure::leaf_center(int64_t idx) const {
  const IPoint c = leaf_coords(idx);
  const double h = leaf_side();
  return {(c[0] + 0.5) * h, n_ == 2 ? (c[1] + 0.5) * h : 0.0};
}

long double DiscreteMeasure::prefix(int64_t i, int64_t j) const {
  if (n_ == 1) return prefix_[i];
  return prefix_[i * (N_ + 1) + j];
}

double DiscreteMeasure::box_mass(const IPoint& lo, const IPoint& hi) const {
  IPoint a{0, 0}, b{1, 1};
  for (int i = 0; i < n_; ++i) {
    a[i] = std::clamp<int64_t>(lo[i], 0, N_);
    b[i] = std::clamp<int64_t>(hi[i], 0, N_);
    if (b[i] <= a[i]) return 0.0;
  }
  if (n_ == 1) return static_cast<double>(prefix(b[0], 0) - prefix(a[0], 0));
  return static_cast<double>(prefix(b[0], b[1]) - prefix(a[0], b[1]) - prefix(b[0], a[1]) + prefix(a[0], a[1]));
}

double DiscreteMeasure::cumulative(const Point& x) const {
  // Bilinear inside each cell for a piecewise-constant density.
  double t[2] = {0, 0};
  int64_t k[2] = {0, 0};
  double f[2] = {0, 0};
  for (int i = 0; i < n_; ++i) {
    t[i] = std::clamp(x[i], 0.0, 1.0) * static_cast<double>(N_);
    k[i] = std::min<int64_t>(static_cast<int64_t>(std::floor(t[i])), N_ - 1);
    f[i] = t[i] - static_cast<double>(k[i]);
  }
  if (n_ == 1) return static_cast<double>(prefix(k[0], 0)) + f[0] * mass_[k[0]];
  const long double p00 = prefix(k[0], k[1]);
  const long double p10 = prefix(k[0] + 1, k[1]);
  const long double p01 = prefix(k[0], k[1] + 1);
  return static_cast<double>(p00 + f[0] * (p10 - p00) + f[1] * (p01 - p00)) + f[0] * f[1] * mass_[k[0] * N_ + k[1]];
}

double DiscreteMeasure::box_mass(const Point& lo, const Point& hi) const {
  if (n_ == 1) {
    if (hi[0] <= lo[0]) return 0.0;
    return cumulative({hi[0], 0}) - cumulative({lo[0], 0});
  }
  if (hi[0] <= lo[0] || hi[1] <= lo[1]) return 0.0;
  return cumulative(hi) - cumulative({lo[0], hi[1]}) - cumulative({hi[0], lo[1]}) + cumulative(lo);
}

double DiscreteMeasure::cube_mass(const Cube& q) const {
  IPoint a{0, 0}, b{1, 1};
  for (int i = 0; i < n_; ++i) {
    a[i] = std::clamp<int64_t>(q.lo[i], 0, N_);
    b[i] = std::clamp<int64_t>(q.lo[i] + q.size, 0, N_);
  }
  double s = 0.0;
  if (n_ == 1) {
    for (int64_t i = a[0]; i < b[0]; ++i) s += mass_[i];
  } else {
    for (int64_t i = a[0]; i < b[0]; ++i)
      for (int64_t j = a[1]; j < b[1]; ++j) s += mass_[i * N_ + j];
  }
  return s;
}

void DiscreteMeasure::write_table(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "measure: cannot write " + path);
  char buf[40];
  const double vol = leaf_volume();
  for (double m : mass_) {
    std::snprintf(buf, sizeof buf, "%.17g\n", m / vol);
    out << buf;
  }
}

double cube_mass(const DiscreteMeasure& mu, const Cube& q) { return mu.cube_mass(q); }

namespace {

double power_integral(double a, double x0, double x1) {
  return (std::pow(x1, a + 1.0) - std::pow(x0, a + 1.0)) / (a + 1.0);
}

std::vector<double> cascade_masses(int n, int depth, uint64_t seed, double lo, double hi) {
  Rng rng(seed);
  std::vector<double> cur{1.0};
  int64_t side = 1;
  for (int d = 0; d < depth; ++d) {
    const int64_t ns = side * 2;
    std::vector<double> next(n == 1 ? ns : ns * ns, 0.0);
    if (n == 1) {
      for (int64_t i = 0; i < side; ++i) {
        const double p = rng.uniform(lo, hi);
        next[2 * i] = cur[i] * p;
        next[2 * i + 1] = cur[i] * (1.0 - p);
      }
    } else {
      for (int64_t i = 0; i < side; ++i)
        for (int64_t j = 0; j < side; ++j) {
          const double m = cur[i * side + j];
          const double p = rng.uniform(lo, hi);
          const double q1 = rng.uniform(lo, hi);
          const double q2 = rng.uniform(lo, hi);
          next[(2 * i) * ns + 2 * j] = m * p * q1;
          next[(2 * i) * ns + 2 * j + 1] = m * p * (1.0 - q1);
          next[(2 * i + 1) * ns + 2 * j] = m * (1.0 - p) * q2;
          next[(2 * i + 1) * ns + 2 * j + 1] = m * (1.0 - p) * (1.0 - q2);
        }
    }
    cur.swap(next);
    side = ns;
  }
  return cur;
}

}  // namespace

DiscreteMeasure make_measure(const MeasureSpec& spec, int n, int depth) {
  if (n != 1 && n != 2) fail(ErrorKind::invalid_argument, "measure: dimension must be 1 or 2");
  if (depth <= 0 || depth > 14) fail(ErrorKind::invalid_argument, "measure: depth out of range");
  const int64_t N = int64_t{1} << depth;
  const int64_t L = n == 1 ? N : N * N;
  const double h = 1.0 / static_cast<double>(N);
  std::vector<double> m(static_cast<size_t>(L), 0.0);
  switch (spec.kind) {
    case MeasureKind::lebesgue:
      std::fill(m.begin(), m.end(), std::pow(h, n));
      break;
    case MeasureKind::power: {
      for (int i = 0; i < n; ++i)
        if (!(spec.a[i] > -1.0)) fail(ErrorKind::invalid_argument, "measure: power exponent must exceed -1");
      std::vector<double> ax0(N), ax1(N);
      for (int64_t k = 0; k < N; ++k) {
        ax0[k] = power_integral(spec.a[0], k * h, (k + 1) * h);
        if (n == 2) ax1[k] = power_integral(spec.a[1], k * h, (k + 1) * h);
      }
      for (int64_t idx = 0; idx < L; ++idx)
        m[idx] = n == 1 ? ax0[idx] : ax0[idx / N] * ax1[idx % N];
      break;
    }
    case MeasureKind::cascade:
      if (!(spec.lo > 0.0 && spec.hi < 1.0 && spec.lo <= spec.hi))
        fail(ErrorKind::invalid_argument, "measure: cascade range must lie inside (0,1)");
      m = cascade_masses(n, depth, spec.seed, spec.lo, spec.hi);
      break;
    case MeasureKind::table: {
      std::ifstream in(spec.path);
      if (!in) fail(ErrorKind::io, "measure: cannot read table " + spec.path);
      int64_t k = 0;
      double v;
      const double vol = std::pow(h, n);
      while (in >> v) {
        if (k >= L) fail(ErrorKind::invalid_argument, "measure: table has more entries than leaves");
        if (!(v >= 0.0)) fail(ErrorKind::invalid_argument, "measure: negative table entry");
        m[k++] = v * vol;
      }
      if (!in.eof()) fail(ErrorKind::invalid_argument, "measure: unparsable table entry");
      if (k != L) fail(ErrorKind::invalid_argument, "measure: table has fewer entries than leaves");
      break;
    }
  }
  return DiscreteMeasure(n, depth, std::move(m));
}

double monomial_moment(const DiscreteMeasure& mu, const Cube& q, const MultiIndex& beta, const Point& center,
                       double scale) {
  const int n = mu.n();
  const int64_t N = mu.leaves_per_axis();
  const double h = mu.leaf_side();
  IPoint a{0, 0}, b{1, 1};
  for (int i = 0; i < n; ++i) {
    a[i] = std::clamp<int64_t>(q.lo[i], 0, N);
    b[i] = std::clamp<int64_t>(q.lo[i] + q.size, 0, N);
  }
  auto axis = [&](int ax, int64_t k) {
    const int e = beta[ax];
    const double x0 = (k * h - center[ax]) / scale, x1 = ((k + 1) * h - center[ax]) / scale;
    return scale * (std::pow(x1, e + 1) - std::pow(x0, e + 1)) / (e + 1);
  };
  const double vol = mu.leaf_volume();
  double s = 0.0;
  if (n == 1) {
    for (int64_t i = a[0]; i < b[0]; ++i) s += mu.leaf_mass(i) / vol * axis(0, i);
  } else {
    for (int64_t i = a[0]; i < b[0]; ++i) {
      const double f0 = axis(0, i);
      for (int64_t j = a[1]; j < b[1]; ++j) s += mu.leaf_mass(i * N + j) / vol * f0 * axis(1, j);
    }
  }
  return s;
}

DoublingReport doubling_exponents(const DiscreteMeasure& mu, int dmin, int dmax) {
  const int n = mu.n();
  const int64_t N = mu.leaves_per_axis();
  DyadicGrid g(n, mu.depth());
  DoublingReport r;
  r.theta_doub = 0.0;
  r.theta_rev = INFINITY;
  const double l3 = std::log(3.0);
  for (int d = std::max(dmin, 0); d <= std::min(dmax, mu.depth()); ++d) {
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const Cube q = g.from_local(d, k);
      const double mq = mu.box_mass(q.lo, IPoint{q.lo[0] + q.size, q.lo[1] + q.size});
      if (!(mq > 0.0)) fail(ErrorKind::degenerate_measure, "doubling: zero-mass cube encountered");
      if (d >= 1) {
        const Cube p = g.parent(q);
        r.C_parent = std::max(r.C_parent, mu.box_mass(p.lo, IPoint{p.lo[0] + p.size, p.lo[1] + p.size}) / mq);
      }
      IPoint lo3{0, 0}, hi3{1, 1};
      bool interior3 = true;
      for (int i = 0; i < n; ++i) {
        lo3[i] = q.lo[i] - q.size;
        hi3[i] = q.lo[i] + 2 * q.size;
        interior3 = interior3 && lo3[i] >= 0 && hi3[i] <= N;
      }
      if (interior3) {
        const double t = std::log(mu.box_mass(lo3, hi3) / mq) / l3;
        r.theta_doub = std::max(r.theta_doub, t);
        r.theta_rev = std::min(r.theta_rev, t);
        ++r.cubes;
      }
      if (q.size >= 2) {
        IPoint lo2{0, 0}, hi2{1, 1};
        bool interior2 = true;
        for (int i = 0; i < n; ++i) {
          lo2[i] = q.lo[i] - q.size / 2;
          hi2[i] = q.lo[i] + q.size + q.size / 2;
          interior2 = interior2 && lo2[i] >= 0 && hi2[i] <= N;
        }
        if (interior2) r.C_doub = std::max(r.C_doub, mu.box_mass(lo2, hi2) / mq);
      }
    }
  }
  if (r.cubes == 0) r.theta_rev = 0.0;
  return r;
}

HaloResult halo_mass(const DiscreteMeasure& mu, const Cube& q, const Polynomial& P, double delta) {
  const int n = mu.n();
  const int64_t N = mu.leaves_per_axis();
  const double h = mu.leaf_side();
  if (delta < h * (1.0 - 1e-12)) fail(ErrorKind::resolution, "halo: delta below leaf side");
  IPoint a{0, 0}, b{1, 1};
  for (int i = 0; i < n; ++i) {
    a[i] = std::clamp<int64_t>(q.lo[i], 0, N);
    b[i] = std::clamp<int64_t>(q.lo[i] + q.size, 0, N);
  }
  auto corner = [&](int64_t i, int64_t j) { return Point{i * h, n == 2 ? j * h : 0.0}; };
  const int64_t jb0 = n == 2 ? a[1] : 0, jb1 = n == 2 ? b[1] : 0;
  double sup = 0.0, grad = 0.0;
  for (int64_t i = a[0]; i <= b[0]; ++i)
    for (int64_t j = jb0; j <= jb1; ++j) {
      const Point x = corner(i, j);
      sup = std::max(sup, std::abs(P(x)));
      const Point gr = P.gradient(x);
      grad = std::max(grad, std::sqrt(gr[0] * gr[0] + gr[1] * gr[1]));
    }
  HaloResult res;
  res.sup_norm = sup;
  // Membership is invariant under rescaling P, so renormalising only sets the flag.
  res.renormalized = std::abs(sup - 1.0) > 1e-9;
  if (sup == 0.0) {
    res.mass = mu.cube_mass(q);
    return res;
  }
  const double thresh = delta * grad;
  double s = 0.0;
  for (int64_t i = a[0]; i < b[0]; ++i)
    for (int64_t j = jb0; j < std::max(jb1, jb0 + 1); ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < (n == 2 ? 2 : 1); ++dj) {
          const double v = P(corner(i + di, j + dj));
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      const Point c{(i + 0.5) * h, n == 2 ? (j + 0.5) * h : 0.0};
      if ((lo <= 0.0 && hi >= 0.0) || std::abs(P(c)) < thresh) s += mu.leaf_mass(n == 1 ? i : i * N + j);
    }
  res.mass = s;
  return res;
}

LinearFit halo_decay_fit(const DiscreteMeasure& mu, const Cube& q, const Polynomial& P, int kmin) {
  const double mq = mu.cube_mass(q);
  if (!(mq > 0.0)) fail(ErrorKind::degenerate_measure, "halo fit: cube has zero mass");
  std::vector<double> x, y;
  for (int k = kmin; k <= mu.depth(); ++k) {
    const double delta = std::ldexp(1.0, -k);
    const double m = halo_mass(mu, q, P, delta).mass;
    if (m <= 0.0) continue;
    x.push_back(std::log(delta));
    y.push_back(std::log(m / mq));
  }
  if (x.size() < 2) fail(ErrorKind::resolution, "halo fit: fewer than two usable scales");
  return fit_line(x, y);
}

}  // namespace sobolab
