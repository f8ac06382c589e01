#include "sobolab/wavelet.hpp"

#include <climits>
#include <cmath>
#include <limits>

namespace sobolab {

namespace {

// Evaluates all monomials of degree < kappa (graded-lex) at u.
void monomials_at(int n, int kappa, const Point& u, double* out) {
  int k = 0;
  for (int d = 0; d < kappa; ++d) {
    if (n == 1) {
      out[k++] = std::pow(u[0], d);
    } else {
      for (int j = 0; j <= d; ++j) out[k++] = std::pow(u[0], d - j) * std::pow(u[1], j);
    }
  }
}

Eigen::MatrixXd ref_cross(int n, int ka, int kb) {
  const MonomialSet A(n, ka), B(n, kb);
  Eigen::MatrixXd R(A.size(), B.size());
  for (int i = 0; i < A.size(); ++i)
    for (int j = 0; j < B.size(); ++j) R(i, j) = ref_moment(n, {A[i][0] + B[j][0], A[i][1] + B[j][1]});
  return R;
}

Point child_offset(int n, int c) {
  if (n == 1) return {(c & 1) ? 0.25 : -0.25, 0.0};
  return {((c >> 1) & 1) ? 0.25 : -0.25, (c & 1) ? 0.25 : -0.25};
}

// Orient each row so that its last significant entry is positive.
void fix_signs(Eigen::MatrixXd& H) {
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    const double mx = H.row(r).cwiseAbs().maxCoeff();
    for (Eigen::Index j = H.cols() - 1; j >= 0; --j) {
      if (std::abs(H(r, j)) > 1e-9 * mx) {
        if (H(r, j) < 0) H.row(r) *= -1.0;
        break;
      }
    }
  }
}

constexpr double kGsTol = 1e-8;

}  // namespace

LeafFunction LeafFunction::zeros(int n, int depth, int kappa) {
  LeafFunction f;
  f.n = n;
  f.depth = depth;
  f.kappa = kappa;
  const int64_t N = int64_t{1} << depth;
  f.c = Eigen::MatrixXd::Zero(monomial_count(n, kappa), n == 1 ? N : N * N);
  return f;
}

LeafFunction LeafFunction::from_values(int n, int depth, const std::vector<double>& values) {
  LeafFunction f = zeros(n, depth, 1);
  if (static_cast<int64_t>(values.size()) != f.leaves())
    fail(ErrorKind::invalid_argument, "leaf function: value count does not match leaves");
  for (int64_t k = 0; k < f.leaves(); ++k) f.c(0, k) = values[k];
  return f;
}

double LeafFunction::at(int64_t leaf, const Point& u) const {
  double m[64];
  monomials_at(n, kappa, u, m);
  double v = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) v += c(i, leaf) * m[i];
  return v;
}

double LeafFunction::operator()(const Point& x) const {
  const int64_t N = int64_t{1} << depth;
  IPoint k{0, 0};
  Point u{0, 0};
  for (int i = 0; i < n; ++i) {
    const double t = x[i] * static_cast<double>(N);
    k[i] = std::clamp<int64_t>(static_cast<int64_t>(std::floor(t)), 0, N - 1);
    u[i] = t - static_cast<double>(k[i]) - 0.5;
  }
  return at(n == 1 ? k[0] : k[0] * N + k[1], u);
}

Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const LeafFunction& f) {
  if (f.n != mu.n() || f.depth != mu.depth()) fail(ErrorKind::invalid_argument, "leaf moments: mismatched mesh");
  const Eigen::MatrixXd R = ref_cross(mu.n(), kappa, f.kappa);
  Eigen::MatrixXd F = R * f.c;
  for (int64_t k = 0; k < mu.leaf_count(); ++k) F.col(k) *= mu.leaf_mass(k);
  return F;
}

Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const std::function<double(const Point&)>& f,
                             int q) {
  const IPoint hi{mu.leaves_per_axis(), mu.n() == 2 ? mu.leaves_per_axis() : 1};
  return leaf_moments(mu, kappa, f, q, IPoint{0, 0}, hi);
}

Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const std::function<double(const Point&)>& f, int q,
                             const IPoint& lo, const IPoint& hi) {
  const int n = mu.n();
  const int P = monomial_count(n, kappa);
  const GaussRule g = gauss_legendre(q);
  const double h = mu.leaf_side();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(P, mu.leaf_count());
  std::vector<int64_t> leaves;
  for (int64_t i = std::max<int64_t>(lo[0], 0); i < std::min(hi[0], mu.leaves_per_axis()); ++i)
    for (int64_t j = n == 2 ? std::max<int64_t>(lo[1], 0) : 0; j < (n == 2 ? std::min(hi[1], mu.leaves_per_axis()) : 1);
         ++j)
      leaves.push_back(mu.leaf_index({i, j}));
  const int qq = n == 1 ? q : q * q;
#pragma omp parallel for schedule(static)
  for (int64_t t0 = 0; t0 < static_cast<int64_t>(leaves.size()); ++t0) {
    const int64_t k = leaves[t0];
    const Point c = mu.leaf_center(k);
    double m[64];
    for (int t = 0; t < qq; ++t) {
      const int i0 = n == 1 ? t : t / q, i1 = n == 1 ? 0 : t % q;
      const Point u{g.nodes[i0], n == 2 ? g.nodes[i1] : 0.0};
      const double w = g.weights[i0] * (n == 2 ? g.weights[i1] : 1.0);
      const double v = f({c[0] + h * u[0], n == 2 ? c[1] + h * u[1] : 0.0});
      monomials_at(n, kappa, u, m);
      for (int a = 0; a < P; ++a) F(a, k) += w * v * m[a];
    }
    F.col(k) *= mu.leaf_mass(k);
  }
  return F;
}

double l2_norm_sq(const DiscreteMeasure& mu, const LeafFunction& f) {
  const Eigen::MatrixXd R = ref_cross(mu.n(), f.kappa, f.kappa);
  double s = 0.0;
  for (int64_t k = 0; k < mu.leaf_count(); ++k) s += mu.leaf_mass(k) * f.c.col(k).dot(R * f.c.col(k));
  return s;
}

double l2_norm_sq(const DiscreteMeasure& mu, const std::function<double(const Point&)>& f, int q) {
  const int n = mu.n();
  const GaussRule g = gauss_legendre(q);
  const double h = mu.leaf_side();
  double s = 0.0;
  const int qq = n == 1 ? q : q * q;
  for (int64_t k = 0; k < mu.leaf_count(); ++k) {
    const Point c = mu.leaf_center(k);
    double acc = 0.0;
    for (int t = 0; t < qq; ++t) {
      const int i0 = n == 1 ? t : t / q, i1 = n == 1 ? 0 : t % q;
      const double w = g.weights[i0] * (n == 2 ? g.weights[i1] : 1.0);
      const double v = f({c[0] + h * g.nodes[i0], n == 2 ? c[1] + h * g.nodes[i1] : 0.0});
      acc += w * v * v;
    }
    s += mu.leaf_mass(k) * acc;
  }
  return s;
}

Eigen::VectorXd WaveletCoefficients::cube(int depth, int64_t local) const {
  const CubeBasis& b = sys->basis(depth, local);
  return v.segment(sys->offset(depth, local), b.dim());
}

Eigen::VectorXd WaveletCoefficients::coarse(int64_t top) const {
  return v.segment(sys->coarse_offset(top), sys->coarse_dim(top));
}

AlpertSystem::AlpertSystem(const DiscreteMeasure& mu, const DyadicGrid& g, int kappa, int top_depth)
    : mu_(&mu), g_(g), kappa_(kappa) {
  if (kappa < 1 || kappa > 4) fail(ErrorKind::invalid_argument, "alpert: kappa must be in 1..4");
  if (mu.n() != g.n() || mu.depth() != g.max_depth()) fail(ErrorKind::invalid_argument, "alpert: grid and measure mismatch");
  top_ = top_depth == INT32_MIN ? g.min_depth() : top_depth;
  if (top_ < g.min_depth() || top_ >= g.max_depth()) fail(ErrorKind::invalid_argument, "alpert: top depth out of range");
  build();
}

void AlpertSystem::build() {
  const int n = g_.n(), D = g_.max_depth();
  set_ = MonomialSet(n, kappa_);
  set2_ = MonomialSet(n, 2 * kappa_ - 1);
  const int P = set_.size(), P2 = set2_.size(), C = g_.child_count();
  for (int c = 0; c < C; ++c) {
    A2_.push_back(affine_reexpansion(set2_, 0.5, child_offset(n, c)));
    A_.push_back(A2_.back().topLeftCorner(P, P));
  }
  sum_index_.resize(P, P);
  Gref_.resize(P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      const MultiIndex e{set_[i][0] + set_[j][0], set_[i][1] + set_[j][1]};
      sum_index_(i, j) = set2_.index(e);
      Gref_(i, j) = ref_moment(n, e);
    }

  auto poly_basis_from = [&](CubeBasis& b) {
    Eigen::MatrixXd G(P, P);
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j) G(i, j) = b.mom(sum_index_(i, j));
    b.B = metric_gram_schmidt(G, Eigen::MatrixXd::Identity(P, P), kGsTol).Q;
  };

  levels_.assign(D - top_ + 1, {});
  {
    auto& leaves = levels_[D - top_];
    leaves.resize(static_cast<size_t>(g_.cubes_at(D)));
    Eigen::VectorXd ref(P2);
    for (int i = 0; i < P2; ++i) ref(i) = ref_moment(n, set2_[i]);
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < static_cast<int64_t>(leaves.size()); ++k) {
      CubeBasis& b = leaves[k];
      b.cube = g_.from_local(D, k);
      b.mass = mu_->leaf_mass(mu_->leaf_index(b.cube.lo));
      b.mom = b.mass * ref;
      b.H.resize(0, C * P);
      poly_basis_from(b);
    }
  }
  for (int d = D - 1; d >= top_; --d) {
    auto& lev = levels_[d - top_];
    const auto& below = levels_[d + 1 - top_];
    lev.resize(static_cast<size_t>(g_.cubes_at(d)));
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t k = 0; k < static_cast<int64_t>(lev.size()); ++k) {
      CubeBasis& b = lev[k];
      b.cube = g_.from_local(d, k);
      b.mom = Eigen::VectorXd::Zero(P2);
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(C * P, C * P);
      Eigen::MatrixXd V = Eigen::MatrixXd::Zero(C * P, P + C * P);
      for (int c = 0; c < C; ++c) {
        const Cube ch = g_.child(b.cube, c);
        if (!g_.intersects_box(ch)) continue;
        const int64_t cl = g_.local_index(ch);
        b.child[c] = cl;
        const CubeBasis& cb = below[cl];
        b.mom += A2_[c] * cb.mom;
        for (int i = 0; i < P; ++i)
          for (int j = 0; j < P; ++j) G(c * P + i, c * P + j) = cb.mom(sum_index_(i, j));
        // Parent monomial beta, written in child coordinates.
        V.block(c * P, 0, P, P) = A_[c].transpose();
      }
      V.rightCols(C * P).setIdentity();
      b.mass = b.mom(0);
      const GsResult gs = metric_gram_schmidt(G, V, kGsTol);
      std::vector<int> raw;
      for (size_t j = 0; j < gs.source.size(); ++j)
        if (gs.source[j] >= P) raw.push_back(static_cast<int>(j));
      b.H.resize(static_cast<Eigen::Index>(raw.size()), C * P);
      for (size_t r = 0; r < raw.size(); ++r) b.H.row(static_cast<Eigen::Index>(r)) = gs.Q.col(raw[r]).transpose();
      fix_signs(b.H);
      poly_basis_from(b);
    }
  }

  offsets_.assign(D - top_, {});
  coarse_off_.clear();
  entries_.clear();
  dim_ = 0;
  for (int64_t t = 0; t < static_cast<int64_t>(levels_[0].size()); ++t) {
    coarse_off_.push_back(dim_);
    for (int a = 0; a < levels_[0][t].B.cols(); ++a) entries_.push_back({top_, t, a, true});
    dim_ += levels_[0][t].B.cols();
  }
  for (int d = top_; d < D; ++d) {
    auto& off = offsets_[d - top_];
    const auto& lev = levels_[d - top_];
    off.resize(lev.size());
    for (int64_t k = 0; k < static_cast<int64_t>(lev.size()); ++k) {
      off[k] = dim_;
      for (int a = 0; a < lev[k].dim(); ++a) entries_.push_back({d, k, a, false});
      dim_ += lev[k].dim();
    }
  }
}

int64_t AlpertSystem::entry_side(int64_t k) const { return g_.side_units(entries_[k].depth); }

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}  // namespace

WaveletCoefficients AlpertSystem::analyze(const Eigen::MatrixXd& F) const {
  const int D = g_.max_depth(), P = this->P(), C = g_.child_count();
  if (F.rows() != P || F.cols() != mu_->leaf_count()) fail(ErrorKind::invalid_argument, "analyze: moment matrix shape");
  WaveletCoefficients w;
  w.sys = this;
  w.v = Eigen::VectorXd::Zero(dim_);
  w.moments.assign(D - top_ + 1, {});
  w.moments[D - top_] = F;
  for (int d = D - 1; d >= top_; --d) {
    const auto& lev = levels_[d - top_];
    const Eigen::MatrixXd& Fb = w.moments[d + 1 - top_];
    Eigen::MatrixXd& Fd = w.moments[d - top_];
    Fd = Eigen::MatrixXd::Zero(P, static_cast<Eigen::Index>(lev.size()));
    const auto& off = offsets_[d - top_];
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < static_cast<int64_t>(lev.size()); ++k) {
      const CubeBasis& b = lev[k];
      Eigen::VectorXd stack = Eigen::VectorXd::Zero(C * P);
      for (int c = 0; c < C; ++c) {
        if (b.child[c] < 0) continue;
        stack.segment(c * P, P) = Fb.col(b.child[c]);
        Fd.col(k) += A_[c] * Fb.col(b.child[c]);
      }
      if (b.dim() > 0) {
        // Entries under the dot-product rounding bound are indistinguishable from zero.
        Eigen::VectorXd h = b.H * stack;
        const Eigen::VectorXd bound = (b.H.cwiseAbs() * stack.cwiseAbs()) * (C * P * kEps);
        for (Eigen::Index i = 0; i < h.size(); ++i)
          if (std::abs(h(i)) <= bound(i)) h(i) = 0.0;
        w.v.segment(off[k], b.dim()) = h;
      }
    }
  }
  for (int64_t t = 0; t < static_cast<int64_t>(levels_[0].size()); ++t) {
    const CubeBasis& b = levels_[0][t];
    if (b.B.cols() > 0) w.v.segment(coarse_off_[t], b.B.cols()) = b.B.transpose() * w.moments[0].col(t);
  }
  return w;
}

LeafFunction AlpertSystem::synthesize(const Eigen::VectorXd& v) const {
  const int D = g_.max_depth(), P = this->P(), C = g_.child_count();
  if (v.size() != dim_) fail(ErrorKind::invalid_argument, "synthesize: coefficient length");
  Eigen::MatrixXd cur(P, static_cast<Eigen::Index>(levels_[0].size()));
  for (int64_t t = 0; t < static_cast<int64_t>(levels_[0].size()); ++t) {
    const CubeBasis& b = levels_[0][t];
    cur.col(t) = b.B * v.segment(coarse_off_[t], b.B.cols());
  }
  for (int d = top_; d < D; ++d) {
    const auto& lev = levels_[d - top_];
    const auto& off = offsets_[d - top_];
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(P, static_cast<Eigen::Index>(levels_[d + 1 - top_].size()));
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < static_cast<int64_t>(lev.size()); ++k) {
      const CubeBasis& b = lev[k];
      const Eigen::VectorXd coef = v.segment(off[k], b.dim());
      for (int c = 0; c < C; ++c) {
        if (b.child[c] < 0) continue;
        Eigen::VectorXd p = A_[c].transpose() * cur.col(k);
        if (b.dim() > 0) p += b.H.middleCols(c * P, P).transpose() * coef;
        next.col(b.child[c]) = p;
      }
    }
    cur.swap(next);
  }
  LeafFunction f;
  f.n = g_.n();
  f.depth = D;
  f.kappa = kappa_;
  f.c = std::move(cur);
  return f;
}

LeafFunction AlpertSystem::element(int64_t k) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
  e(k) = 1.0;
  return synthesize(e);
}

Eigen::VectorXd AlpertSystem::cube_moments(const Eigen::MatrixXd& F, const Cube& q) const {
  if (q.depth == g_.max_depth()) return F.col(mu_->leaf_index(q.lo));
  Eigen::VectorXd m = Eigen::VectorXd::Zero(P());
  for (int c = 0; c < g_.child_count(); ++c) {
    const Cube ch = g_.child(q, c);
    if (g_.intersects_box(ch)) m += A_[c] * cube_moments(F, ch);
  }
  return m;
}

Eigen::VectorXd AlpertSystem::project_E(const Eigen::MatrixXd& F, const Cube& q) const {
  const Eigen::MatrixXd& B = poly_basis(q);
  return B * (B.transpose() * cube_moments(F, q));
}

AlpertSystem::SubtreeEnergy AlpertSystem::subtree_energy(const Eigen::MatrixXd& F, const Cube& q, double s) const {
  SubtreeEnergy e;
  const int P = this->P(), C = g_.child_count();
  const double N = static_cast<double>(g_.leaves_per_axis());
  std::function<Eigen::VectorXd(const Cube&)> rec = [&](const Cube& r) -> Eigen::VectorXd {
    if (r.depth == g_.max_depth()) return F.col(mu_->leaf_index(r.lo));
    const CubeBasis& b = basis(r);
    Eigen::VectorXd stack = Eigen::VectorXd::Zero(C * P), m = Eigen::VectorXd::Zero(P);
    for (int c = 0; c < C; ++c) {
      if (b.child[c] < 0) continue;
      const Eigen::VectorXd mc = rec(g_.child(r, c));
      stack.segment(c * P, P) = mc;
      m += A_[c] * mc;
    }
    if (b.dim() > 0) e.homogeneous += std::pow(r.size / N, -2.0 * s) * (b.H * stack).squaredNorm();
    return m;
  };
  const Eigen::VectorXd mq = rec(q);
  e.coarse = std::pow(q.size / N, -2.0 * s) * (basis(q).B.transpose() * mq).squaredNorm();
  return e;
}

LeafFunction AlpertSystem::push_down(const Cube& q, const Eigen::VectorXd& p) const {
  const int n = g_.n(), D = g_.max_depth();
  LeafFunction f = LeafFunction::zeros(n, D, kappa_);
  IPoint a, b;
  g_.clipped_range(q, a, b);
  const double inv = 1.0 / static_cast<double>(q.size);
  for (int64_t i = a[0]; i < b[0]; ++i)
    for (int64_t j = a[1]; j < b[1]; ++j) {
      const IPoint leaf{i, n == 2 ? j : 0};
      Point off{0, 0};
      for (int ax = 0; ax < n; ++ax) off[ax] = (leaf[ax] + 0.5 - (q.lo[ax] + 0.5 * q.size)) * inv;
      const Eigen::MatrixXd A = affine_reexpansion(set_, inv, off);
      f.c.col(mu_->leaf_index(leaf)) = A.transpose() * p;
    }
  return f;
}

BasisReport check_basis(const AlpertSystem& sys, uint64_t seed, int pairs) {
  const DiscreteMeasure& mu = sys.measure();
  const DyadicGrid& g = sys.grid();
  const MonomialSet& set = sys.monomials();
  const int n = g.n(), P = sys.P(), C = g.child_count(), D = g.max_depth();
  const int generic = (C - 1) * P;
  BasisReport r;
  for (int d = sys.top_depth(); d < D; ++d) {
    const int64_t cnt = sys.cubes_at(d);
    std::vector<double> ge(cnt, 0.0), me(cnt, 0.0);
    std::vector<int> red(cnt, 0);
#pragma omp parallel for schedule(dynamic, 8)
    for (int64_t k = 0; k < cnt; ++k) {
      const CubeBasis& b = sys.basis(d, k);
      if (b.mass <= 0.0) continue;
      red[k] = b.dim() < generic ? 1 : 0;
      if (b.dim() == 0) continue;
      const Point cq = g.center(b.cube);
      const double lq = g.side(b.cube);
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(C * P, C * P), V = Eigen::MatrixXd::Zero(C * P, P);
      for (int c = 0; c < C; ++c) {
        if (b.child[c] < 0) continue;
        const Cube ch = g.child(b.cube, c);
        const Point cc = g.center(ch);
        const double lc = g.side(ch);
        for (int i = 0; i < P; ++i)
          for (int j = 0; j < P; ++j)
            G(c * P + i, c * P + j) = monomial_moment(mu, ch, {set[i][0] + set[j][0], set[i][1] + set[j][1]}, cc, lc);
        // Q-scaled monomials in child coordinates: ((x - cq)/lq) = u/2 + offset.
        const Point off{(cc[0] - cq[0]) / lq, n == 2 ? (cc[1] - cq[1]) / lq : 0.0};
        V.block(c * P, 0, P, P) = affine_reexpansion(set, 0.5, off).transpose();
      }
      const Eigen::MatrixXd E = b.H * G * b.H.transpose() - Eigen::MatrixXd::Identity(b.dim(), b.dim());
      ge[k] = E.cwiseAbs().maxCoeff();
      me[k] = (b.H * G * V).cwiseAbs().maxCoeff() / std::sqrt(b.mass);
    }
    for (int64_t k = 0; k < cnt; ++k) {
      r.gram_error = std::max(r.gram_error, ge[k]);
      r.moment_error = std::max(r.moment_error, me[k]);
      r.reduced_cubes += red[k];
    }
    r.cubes += static_cast<int>(cnt);
  }

  // Random per-leaf polynomial.
  Rng rng(seed);
  LeafFunction f = LeafFunction::zeros(n, D, sys.kappa());
  for (Eigen::Index j = 0; j < f.c.cols(); ++j)
    for (Eigen::Index i = 0; i < f.c.rows(); ++i) f.c(i, j) = rng.uniform(-1.0, 1.0);
  const Eigen::MatrixXd F = leaf_moments(mu, sys.kappa(), f);
  const WaveletCoefficients w = sys.analyze(F);
  const LeafFunction back = sys.synthesize(w.v);
  double scale = 0.0, err = 0.0;
  for (int64_t k = 0; k < f.leaves(); ++k) {
    if (mu.leaf_mass(k) <= 0.0) continue;
    scale = std::max(scale, f.c.col(k).cwiseAbs().maxCoeff());
    err = std::max(err, (back.c.col(k) - f.c.col(k)).cwiseAbs().maxCoeff());
  }
  r.roundtrip_error = scale > 0.0 ? err / scale : err;
  const double l2 = l2_norm_sq(mu, f);
  r.parseval_error = l2 > 0.0 ? std::abs(w.v.squaredNorm() - l2) / l2 : 0.0;

  // Telescoping: sum of Delta_I f over Q < I <= P restricted to Q equals E_Q f - E_P f on Q.
  if (D - sys.top_depth() >= 2) {
    double worst = 0.0;
    for (int t = 0; t < pairs; ++t) {
      const int dq = sys.top_depth() + 1 + static_cast<int>(rng.below(D - sys.top_depth()));
      const Cube Q = g.from_local(dq, rng.below(g.cubes_at(dq)));
      if (mu.cube_mass(Q) <= 0.0) continue;
      const int up = 1 + static_cast<int>(rng.below(dq - sys.top_depth()));
      const Cube Pc = g.ancestor(Q, up);
      const Point cq = g.center(Q);
      const double lq = g.side(Q);
      auto to_q = [&](const Cube& from, const Eigen::VectorXd& p) {
        const Point cf = g.center(from);
        const double lf = g.side(from);
        const Point off{(cq[0] - cf[0]) / lf, n == 2 ? (cq[1] - cf[1]) / lf : 0.0};
        return Eigen::VectorXd(affine_reexpansion(set, lq / lf, off).transpose() * p);
      };
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(P);
      Cube I = Q;
      for (int m = 1; m <= up; ++m) {
        const Cube child = I;
        I = g.parent(I);
        const CubeBasis& b = sys.basis(I);
        if (b.dim() == 0) continue;
        const int c = g.child_index(child);
        const Eigen::VectorXd coef = w.cube(I.depth, g.local_index(I));
        sum += to_q(child, b.H.middleCols(c * P, P).transpose() * coef);
      }
      const Eigen::VectorXd rhs = sys.project_E(F, Q) - to_q(Pc, sys.project_E(F, Pc));
      const double den = std::max(1.0, sys.project_E(F, Q).cwiseAbs().maxCoeff());
      worst = std::max(worst, (sum - rhs).cwiseAbs().maxCoeff() / den);
    }
    r.telescoping_error = worst;
  }
  return r;
}

}  // namespace sobolab
