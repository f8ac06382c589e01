#include "sobolab/energy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace sobolab {

namespace {

struct Mass {
  Point y;
  double m;
};

std::vector<Mass> nonzero(const DiscreteMeasure& mesh, const std::vector<double>& mass) {
  if (static_cast<int64_t>(mass.size()) != mesh.leaf_count())
    fail(ErrorKind::invalid_argument, "energy: remote measure has the wrong number of leaves");
  std::vector<Mass> out;
  for (int64_t i = 0; i < mesh.leaf_count(); ++i)
    if (mass[i] != 0.0) out.push_back({mesh.leaf_center(i), mass[i]});
  return out;
}

void leaf_box(const DyadicGrid& g, const Cube& q, IPoint& lo, IPoint& hi) { g.clipped_range(q, lo, hi); }

// Wavelet coefficients of J from leaf moments that vanish outside J.
Eigen::VectorXd coefficients_at(const AlpertSystem& sys, const Eigen::MatrixXd& F, const Cube& J) {
  const DyadicGrid& g = sys.grid();
  const CubeBasis& b = sys.basis(J);
  const int P = sys.P();
  Eigen::VectorXd stack = Eigen::VectorXd::Zero(g.child_count() * P);
  for (int c = 0; c < g.child_count(); ++c)
    if (b.child[c] >= 0) stack.segment(c * P, P) = sys.cube_moments(F, g.child(J, c));
  return b.H * stack;
}

// k-th central difference of f along one axis, nested for the other axis.
double central_derivative(const std::function<double(const Point&)>& f, const Point& x, const MultiIndex& beta,
                          double h) {
  auto binom = [](int k, int j) {
    double b = 1.0;
    for (int i = 1; i <= j; ++i) b = b * (k - j + i) / i;
    return b;
  };
  double s = 0.0;
  for (int j0 = 0; j0 <= beta[0]; ++j0)
    for (int j1 = 0; j1 <= beta[1]; ++j1) {
      const double w = ((j0 + j1) % 2 ? -1.0 : 1.0) * binom(beta[0], j0) * binom(beta[1], j1);
      const Point p{x[0] + (0.5 * beta[0] - j0) * h, x[1] + (0.5 * beta[1] - j1) * h};
      s += w * f(p);
    }
  return s / std::pow(h, beta[0] + beta[1]);
}

std::vector<MultiIndex> top_degree(int n, int kappa) {
  std::vector<MultiIndex> out;
  if (n == 1) return {{kappa, 0}};
  for (int j = 0; j <= kappa; ++j) out.push_back({kappa - j, j});
  return out;
}

double power_dist(const Point& x, const Point& m, int n, int kappa) {
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) r2 += (x[a] - m[a]) * (x[a] - m[a]);
  return std::pow(std::sqrt(r2), kappa);
}

// Quantities of J that do not depend on the remote measure.
struct CubeData {
  Point m{0, 0};
  double vm = 0.0;       // ||  |x - m|^kappa  ||^2_{W^s(1_J omega)}
  double modulus = 1.0;
  std::vector<double> poly_norm;  // ||Delta_J (x - c_J)^beta||^2_{W^s}, |beta| = kappa
};

CubeData cube_data(const AlpertSystem& sys, const Cube& J, double s) {
  const DyadicGrid& g = sys.grid();
  const int n = g.n(), kappa = sys.kappa();
  CubeData d;
  d.m = minimizing_point(sys, J, s, &d.vm);
  d.modulus = modulus_wavelet_ratio(sys, J, s);
  IPoint lo, hi;
  leaf_box(g, J, lo, hi);
  const Point c = g.center(J);
  const double w = side_weight(g, J.depth, s);
  for (const MultiIndex& beta : top_degree(n, kappa)) {
    auto mono = [&](const Point& x) {
      return std::pow(x[0] - c[0], beta[0]) * (n == 2 ? std::pow(x[1] - c[1], beta[1]) : 1.0);
    };
    const Eigen::MatrixXd F = leaf_moments(sys.measure(), kappa, mono, kappa + 2, lo, hi);
    d.poly_norm.push_back(w * coefficients_at(sys, F, J).squaredNorm());
  }
  return d;
}

void check_remote(const DyadicGrid& g, const Cube& J, const RemoteMeasure& r) {
  const int n = g.n();
  const Cube& I = r.exclusion;
  for (int a = 0; a < n; ++a)
    if (2 * I.lo[a] > 2 * J.lo[a] - J.size || 2 * (I.lo[a] + I.size) < 2 * (J.lo[a] + J.size) + J.size)
      fail(ErrorKind::precondition, "monotonicity: exclusion cube must contain 2J");
  IPoint lo, hi;
  g.clipped_range(I, lo, hi);
  const int64_t N = g.leaves_per_axis();
  for (int64_t i = lo[0]; i < hi[0]; ++i)
    for (int64_t j = lo[1]; j < hi[1]; ++j)
      if (r.mass[n == 1 ? i : i * N + j] != 0.0)
        fail(ErrorKind::precondition, "monotonicity: remote measure charges the exclusion cube");
}

MonotonicityTerms terms_with(const AlpertSystem& sys, const Cube& J, const RemoteMeasure& remote, double s,
                             double delta, const KernelSpec& k, const CubeData& cd) {
  const DiscreteMeasure& omega = sys.measure();
  const DyadicGrid& g = sys.grid();
  const int n = g.n(), kappa = sys.kappa();
  MonotonicityTerms t;
  t.delta = delta;
  t.m = cd.m;
  const std::vector<Mass> nu = nonzero(omega, remote.mass);
  if (nu.empty()) return t;
  auto T = [&](const Point& x) {
    double v = 0.0;
    for (const Mass& p : nu) v += kernel_eval(k, n, x, p.y) * p.m;
    return v;
  };
  IPoint lo, hi;
  leaf_box(g, J, lo, hi);
  const Eigen::MatrixXd F = leaf_moments(omega, kappa, T, kappa + 2, lo, hi);
  t.lhs = side_weight(g, J.depth, s) * coefficients_at(sys, F, J).squaredNorm();

  const double step = omega.leaf_side() / 4.0;
  const auto betas = top_degree(n, kappa);
  for (size_t b = 0; b < betas.size(); ++b) {
    double integral = 0.0;
    for (const Mass& p : nu) {
      auto Ky = [&](const Point& x) { return kernel_eval(k, n, x, p.y); };
      integral += central_derivative(Ky, cd.m, betas[b], step) * p.m;
    }
    t.phi_sq += integral * integral * cd.poly_norm[b];
  }

  std::vector<double> absmass(remote.mass.size());
  for (size_t i = 0; i < absmass.size(); ++i) absmass[i] = std::abs(remote.mass[i]);
  const DiscreteMeasure abs_nu(n, omega.depth(), absmass);
  const double P = poisson_integral(g, J, abs_nu, kappa + delta, k.alpha);
  const double ratio = P / std::pow(g.side(J), kappa);
  t.psi_sq = ratio * ratio * cd.vm * cd.modulus;
  return t;
}

bool cell_meets_box(const Point& lo, double h, int n, const Point& blo, const Point& bhi) {
  for (int a = 0; a < n; ++a)
    if (!(lo[a] < bhi[a] && lo[a] + h > blo[a])) return false;
  return true;
}

double energy_ratio_with(const AlpertSystem& sys, const Cube& J, const std::vector<double>& nu, double gamma,
                         const LeafFunction& psi, double s, const KernelSpec& k, double modulus) {
  const DiscreteMeasure& omega = sys.measure();
  const DyadicGrid& g = sys.grid();
  const int n = g.n(), kappa = sys.kappa();
  if (!(gamma > 1.0)) fail(ErrorKind::invalid_argument, "energy: gamma must exceed 1");
  const std::vector<Mass> far = nonzero(omega, nu);
  const double h = omega.leaf_side();
  const Point c = g.center(J);
  const double half = 0.5 * gamma * g.side(J);
  for (int64_t i = 0; i < omega.leaf_count(); ++i) {
    if (nu[i] == 0.0) continue;
    if (nu[i] < 0.0) fail(ErrorKind::invalid_argument, "energy: far measure must be nonnegative");
    const Point y = omega.leaf_center(i);
    if (cell_meets_box({y[0] - h / 2, y[1] - h / 2}, h, n, {c[0] - half, c[1] - half}, {c[0] + half, c[1] + half}))
      fail(ErrorKind::precondition, "energy: far measure meets gamma J");
  }
  IPoint lo, hi;
  leaf_box(g, J, lo, hi);
  const int64_t N = omega.leaves_per_axis();
  double cmax = 0.0, outside = 0.0;
  for (int64_t i = 0; i < omega.leaf_count(); ++i) {
    const double v = psi.c.col(i).cwiseAbs().maxCoeff();
    const IPoint lc = omega.leaf_coords(i);
    const bool in = lc[0] >= lo[0] && lc[0] < hi[0] && (n == 1 || (lc[1] >= lo[1] && lc[1] < hi[1]));
    (in ? cmax : outside) = std::max(in ? cmax : outside, v);
  }
  if (outside > 1e-12 * std::max(cmax, 1.0)) fail(ErrorKind::precondition, "energy: psi is not supported in J");
  const Eigen::MatrixXd Fpsi = leaf_moments(omega, kappa, psi);
  const double l2 = l2_norm_sq(omega, psi);
  const double mJ = omega.cube_mass(J);
  if (sys.cube_moments(Fpsi, J).norm() > 1e-8 * std::sqrt(l2 * mJ) + 1e-300)
    fail(ErrorKind::precondition, "energy: psi has nonvanishing low moments");
  if (far.empty() || l2 == 0.0) return 0.0;

  const GaussRule gr = gauss_legendre(kappa + 2);
  const int q = static_cast<int>(gr.nodes.size()), qq = n == 1 ? q : q * q;
  double pairing = 0.0;
  for (int64_t i = lo[0]; i < hi[0]; ++i)
    for (int64_t j = lo[1]; j < hi[1]; ++j) {
      const int64_t leaf = n == 1 ? i : i * N + j;
      const double m = omega.leaf_mass(leaf);
      if (m == 0.0) continue;
      const Point lc = omega.leaf_center(leaf);
      double acc = 0.0;
      for (int t = 0; t < qq; ++t) {
        const int i0 = n == 1 ? t : t / q, i1 = n == 1 ? 0 : t % q;
        const Point u{gr.nodes[i0], n == 2 ? gr.nodes[i1] : 0.0};
        const Point x{lc[0] + h * u[0], n == 2 ? lc[1] + h * u[1] : 0.0};
        double Tv = 0.0;
        for (const Mass& p : far) Tv += kernel_eval(k, n, x, p.y) * p.m;
        acc += gr.weights[i0] * (n == 2 ? gr.weights[i1] : 1.0) * Tv * psi.at(leaf, u);
      }
      pairing += m * acc;
    }
  const DiscreteMeasure nu_m(n, omega.depth(), nu);
  const double P = poisson_integral(g, J, nu_m, kappa, k.alpha);
  const double psi_norm = norm_dyadic(sys.analyze(Fpsi), -s).full();
  const double bound = P * std::pow(g.side(J), -s) * std::sqrt(mJ) * psi_norm * modulus;
  return bound > 0.0 ? std::abs(pairing) / bound : 0.0;
}

std::string cube_label(const DyadicGrid& g, const Cube& q) {
  const IPoint c = g.coords(q);
  char buf[64];
  if (g.n() == 1)
    std::snprintf(buf, sizeof buf, "J depth %d index %lld", q.depth, static_cast<long long>(c[0]));
  else
    std::snprintf(buf, sizeof buf, "J depth %d index (%lld,%lld)", q.depth, static_cast<long long>(c[0]),
                  static_cast<long long>(c[1]));
  return buf;
}

}  // namespace

Point minimizing_point(const AlpertSystem& sys, const Cube& J, double s, double* value) {
  const DiscreteMeasure& omega = sys.measure();
  const DyadicGrid& g = sys.grid();
  const int n = g.n(), kappa = sys.kappa();
  IPoint lo, hi;
  leaf_box(g, J, lo, hi);
  const Point c = g.center(J);
  Point best = c;
  double bv = std::numeric_limits<double>::infinity(), bd = 0.0;
  for (int64_t i = lo[0]; i < hi[0]; ++i)
    for (int64_t j = lo[1]; j < hi[1]; ++j) {
      const Point m = omega.leaf_center(omega.leaf_index({i, j}));
      auto f = [&](const Point& x) { return power_dist(x, m, n, kappa); };
      const Eigen::MatrixXd F = leaf_moments(omega, kappa, f, kappa + 2, lo, hi);
      const auto e = sys.subtree_energy(F, J, s);
      const double v = e.homogeneous + e.coarse;
      double dc = 0.0;
      for (int a = 0; a < n; ++a) dc = std::max(dc, std::abs(m[a] - c[a]));
      // Ties within rounding go to the point nearest the centre.
      const double tol = std::isfinite(bv) ? 1e-12 * std::max(std::abs(bv), 1e-300) : 0.0;
      if (!std::isfinite(bv) || v < bv - tol || (std::abs(v - bv) <= tol && dc < bd)) {
        bv = v;
        bd = dc;
        best = m;
      }
    }
  if (value) *value = bv;
  return best;
}

MonotonicityTerms monotonicity_terms(const AlpertSystem& sys, const Cube& J, const RemoteMeasure& remote, double s,
                                     double delta, const KernelSpec& k) {
  check_order(s);
  const DyadicGrid& g = sys.grid();
  if (g.shifted() || J.depth < 0 || J.depth >= g.max_depth())
    fail(ErrorKind::invalid_argument, "monotonicity: J must be a non-leaf cube of the standard grid");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::invalid_argument, "monotonicity: need 0 < delta < 1");
  if (k.bump_order < sys.kappa() + 1)
    fail(ErrorKind::precondition, "monotonicity: truncation must be smooth of order kappa + 1");
  if (static_cast<int64_t>(remote.mass.size()) != sys.measure().leaf_count())
    fail(ErrorKind::invalid_argument, "monotonicity: remote measure has the wrong number of leaves");
  check_remote(g, J, remote);
  bool any = false;
  for (double v : remote.mass) any = any || v != 0.0;
  if (!any) {
    MonotonicityTerms t;
    t.delta = delta;
    t.m = g.center(J);
    return t;
  }
  return terms_with(sys, J, remote, s, delta, k, cube_data(sys, J, s));
}

double modulus_wavelet_ratio(const AlpertSystem& sys, const Cube& J, double s) {
  check_order(s);
  const DyadicGrid& g = sys.grid();
  const CubeBasis& b = sys.basis(J);
  const int d = b.dim();
  if (d == 0) fail(ErrorKind::precondition, "modulus ratio: J carries no wavelets");
  const int64_t loc = g.local_index(J);
  std::vector<LeafFunction> h;
  double total = 0.0;
  for (int a = 0; a < d; ++a) {
    h.push_back(sys.wavelet(J.depth, loc, a));
    total += l2_norm_sq(sys.measure(), h.back());
  }
  auto modulus = [&](const Point& x) {
    double v = 0.0;
    for (const auto& w : h) v += w(x) * w(x);
    return std::sqrt(v);
  };
  IPoint lo, hi;
  leaf_box(g, J, lo, hi);
  const Eigen::MatrixXd F = leaf_moments(sys.measure(), sys.kappa(), modulus, sys.kappa() + 2, lo, hi);
  const WaveletCoefficients c = sys.analyze(F);
  const double p0 = norm_dyadic(c, 0.0).full();
  const double ps = norm_dyadic(c, -s).full();
  // Energy below the leaf scale is what the leaf polynomials cannot see.
  const double residual = std::max(0.0, total - p0 * p0);
  const double value = ps * ps + std::pow(sys.measure().leaf_side(), 2.0 * s) * residual;
  return value / (d * std::pow(g.side(J), 2.0 * s));
}

double energy_pivotal_ratio(const AlpertSystem& sys, const Cube& J, const std::vector<double>& nu, double gamma,
                            const LeafFunction& psi, double s, const KernelSpec& k) {
  check_order(s);
  if (sys.grid().shifted() || J.depth < 0 || J.depth >= sys.max_depth())
    fail(ErrorKind::invalid_argument, "energy: J must be a non-leaf cube of the standard grid");
  return energy_ratio_with(sys, J, nu, gamma, psi, s, k, modulus_wavelet_ratio(sys, J, s));
}

SweepResult monotonicity_sweep(const DiscreteMeasure& omega, int kappa, double s, double delta, const KernelSpec& k0,
                               int samples, uint64_t seed, int jdepth) {
  const int n = omega.n(), D = omega.depth();
  const int cdepth = jdepth + 1;
  if (jdepth < 1 || cdepth >= D) fail(ErrorKind::resolution, "monotonicity sweep: mesh too coarse for the cube depth");
  const KernelSpec k = resolve_kernel(k0, n, D);
  const DyadicGrid g(n, D);
  const AlpertSystem sys(omega, g, kappa);
  const int64_t nJ = g.cubes_at(jdepth);
  std::vector<CubeData> data(static_cast<size_t>(nJ));
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t j = 0; j < nJ; ++j) data[j] = cube_data(sys, g.from_local(jdepth, j), s);

  const int64_t cs = g.side_units(cdepth);
  std::vector<double> ratio(static_cast<size_t>(samples), 0.0);
  std::vector<std::string> label(static_cast<size_t>(samples));
#pragma omp parallel for schedule(dynamic, 4)
  for (int t = 0; t < samples; ++t) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
    const int64_t jl = rng.below(nJ);
    const Cube J = g.from_local(jdepth, jl);
    RemoteMeasure r;
    r.exclusion = Cube{J.depth - 1, {J.lo[0] - J.size / 2, n == 2 ? J.lo[1] - J.size / 2 : 0}, 2 * J.size};
    r.mass.assign(static_cast<size_t>(omega.leaf_count()), 0.0);
    std::vector<Cube> cells;
    for (int64_t c = 0; c < g.cubes_at(cdepth); ++c) {
      const Cube q = g.from_local(cdepth, c);
      if (relation(q, r.exclusion, n) == Relation::separated || relation(q, r.exclusion, n) == Relation::touch)
        cells.push_back(q);
    }
    const int active = 1 + static_cast<int>(rng.below(3));
    for (int a = 0; a < active && !cells.empty(); ++a) {
      const Cube q = cells[rng.below(static_cast<int64_t>(cells.size()))];
      const double m = rng.normal() / static_cast<double>(n == 1 ? cs : cs * cs);
      for (int64_t i = q.lo[0]; i < q.lo[0] + cs; ++i)
        for (int64_t j = (n == 2 ? q.lo[1] : 0); j < (n == 2 ? q.lo[1] + cs : 1); ++j)
          r.mass[omega.leaf_index({i, j})] += m;
    }
    const MonotonicityTerms tm = terms_with(sys, J, r, s, delta, k, data[jl]);
    ratio[t] = tm.ratio();
    label[t] = cube_label(g, J);
  }
  SweepResult out;
  out.samples = samples;
  for (int t = 0; t < samples; ++t)
    if (ratio[t] > out.value) {
      out.value = ratio[t];
      out.witness = label[t] + " sample " + std::to_string(t);
    }
  return out;
}

std::vector<SweepResult> energy_constant_sweep(const DiscreteMeasure& omega, int kappa, double s,
                                               const KernelSpec& k0, const std::vector<double>& gammas, int samples,
                                               uint64_t seed) {
  const int n = omega.n(), D = omega.depth();
  if (D < 4) fail(ErrorKind::resolution, "energy sweep: need depth >= 4");
  const KernelSpec k = resolve_kernel(k0, n, D);
  const DyadicGrid g(n, D);
  const AlpertSystem sys(omega, g, kappa);
  const double h = omega.leaf_side();

  // Modulus factors per candidate cube, computed once.
  std::map<std::pair<int, int64_t>, double> modulus;
  for (int d = 2; d <= D - 2; ++d)
    for (int64_t j = 0; j < g.cubes_at(d); ++j)
      if (sys.basis(d, j).dim() > 0) modulus[{d, j}] = modulus_wavelet_ratio(sys, g.from_local(d, j), s);

  std::vector<double> ratio(static_cast<size_t>(samples), -1.0), reach(static_cast<size_t>(samples), 0.0);
  std::vector<std::string> label(static_cast<size_t>(samples));
#pragma omp parallel for schedule(dynamic, 4)
  for (int t = 0; t < samples; ++t) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(t)));
    const int d = 2 + static_cast<int>(rng.below(D - 3));
    const int64_t jl = rng.below(g.cubes_at(d));
    const Cube J = g.from_local(d, jl);
    auto it = modulus.find({d, jl});
    if (it == modulus.end()) continue;
    // psi: random combination of the wavelets of J and of its children.
    Eigen::VectorXd v = Eigen::VectorXd::Zero(sys.dimension());
    const int64_t off = sys.offset(d, jl);
    for (int a = 0; a < sys.basis(d, jl).dim(); ++a) v(off + a) = rng.normal();
    for (const Cube& ch : g.children(J)) {
      const int64_t cl = g.local_index(ch);
      const int64_t co = sys.offset(ch.depth, cl);
      for (int a = 0; a < sys.basis(ch.depth, cl).dim(); ++a) v(co + a) = 0.5 * rng.normal();
    }
    const LeafFunction psi = sys.synthesize(v);
    // One far leaf outside J.
    const Point c = g.center(J);
    int64_t leaf = -1;
    double sep = 0.0;
    for (int tries = 0; tries < 64 && leaf < 0; ++tries) {
      const int64_t cand = rng.below(omega.leaf_count());
      const Point y = omega.leaf_center(cand);
      double dd = 0.0;
      for (int a = 0; a < n; ++a) dd = std::max(dd, std::abs(y[a] - c[a]) - h / 2);
      if (dd > 0.5 * g.side(J) * (1.0 + 1e-9) && omega.leaf_mass(cand) > 0.0) {
        leaf = cand;
        sep = dd;
      }
    }
    if (leaf < 0) continue;
    std::vector<double> nu(static_cast<size_t>(omega.leaf_count()), 0.0);
    nu[leaf] = 1.0;
    // gamma J is avoided iff sep >= gamma l(J)/2; check at a gamma just above 1.
    ratio[t] = energy_ratio_with(sys, J, nu, 1.0 + 1e-12, psi, s, k, it->second);
    reach[t] = 2.0 * sep / g.side(J);
    label[t] = cube_label(g, J) + " far leaf " + std::to_string(leaf);
  }
  std::vector<SweepResult> out(gammas.size());
  for (size_t i = 0; i < gammas.size(); ++i)
    for (int t = 0; t < samples; ++t) {
      if (ratio[t] < 0.0 || reach[t] < gammas[i]) continue;
      ++out[i].samples;
      if (ratio[t] > out[i].value) {
        out[i].value = ratio[t];
        out[i].witness = label[t];
      }
    }
  return out;
}

}  // namespace sobolab
