#include "sobolab/kernels.hpp"

#include <cmath>
#include <vector>

namespace sobolab {

const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::fractional_integral: return "fractional_integral";
    case KernelFamily::riesz: return "riesz";
    case KernelFamily::zero: return "zero";
  }
  return "?";
}

KernelFamily parse_kernel_family(const std::string& s) {
  if (s == "fractional_integral") return KernelFamily::fractional_integral;
  if (s == "riesz") return KernelFamily::riesz;
  if (s == "zero") return KernelFamily::zero;
  fail(ErrorKind::invalid_argument, "unknown kernel family '" + s + "'");
}

KernelSpec resolve_kernel(KernelSpec k, int n, int depth) {
  const double h = std::ldexp(1.0, -depth);
  if (k.delta == 0.0) k.delta = 4.0 * h;
  if (k.R == 0.0) k.R = 4.0 * std::sqrt(static_cast<double>(n));
  if (!(k.alpha >= 0.0 && k.alpha < n)) fail(ErrorKind::invalid_argument, "kernel: alpha must lie in [0, n)");
  if (!(k.delta > 0.0 && k.delta < k.R)) fail(ErrorKind::invalid_argument, "kernel: need 0 < delta < R");
  if (k.bump_order < 1) fail(ErrorKind::invalid_argument, "kernel: bump_order must be >= 1");
  if (k.family == KernelFamily::riesz && (k.component < 0 || k.component >= n))
    fail(ErrorKind::invalid_argument, "kernel: riesz component out of range");
  return k;
}

double smoothstep(int N, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double s = 0.0, b1 = 1.0;  // b1 = C(N+k,k)
  for (int k = 0; k <= N; ++k) {
    if (k > 0) b1 = b1 * (N + k) / k;
    double b2 = 1.0;  // C(2N+1, N-k)
    for (int i = 1; i <= N - k; ++i) b2 = b2 * (2 * N + 1 - (N - k) + i) / i;
    s += b1 * b2 * std::pow(-x, k);
  }
  return std::pow(x, N + 1) * s;
}

double truncation(const KernelSpec& k, double r) {
  if (r <= 0.5 * k.delta || r >= 2.0 * k.R) return 0.0;
  if (r < k.delta) return smoothstep(k.bump_order, (r - 0.5 * k.delta) / (0.5 * k.delta));
  if (r <= k.R) return 1.0;
  return 1.0 - smoothstep(k.bump_order, (r - k.R) / k.R);
}

double kernel_eval(const KernelSpec& k, int n, const Point& x, const Point& y) {
  if (k.family == KernelFamily::zero) return 0.0;
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double r = std::sqrt(r2);
  const double eta = truncation(k, r);
  if (eta == 0.0) return 0.0;
  if (k.family == KernelFamily::fractional_integral) return eta * std::pow(r, k.alpha - n);
  return eta * (x[k.component] - y[k.component]) * std::pow(r, k.alpha - n - 1.0);
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& k, const DiscreteMeasure& mesh, Exec ex) {
  const int64_t L = mesh.leaf_count();
  const int n = mesh.n();
  Eigen::MatrixXd K(L, L);
  auto row = [&](int64_t i) {
    const Point x = mesh.leaf_center(i);
    for (int64_t j = 0; j < L; ++j) K(i, j) = kernel_eval(k, n, x, mesh.leaf_center(j));
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < L; ++i) row(i);
  } else {
    for (int64_t i = 0; i < L; ++i) row(i);
  }
  return K;
}

Eigen::VectorXd matvec(const Eigen::MatrixXd& K, const Eigen::VectorXd& w, Exec ex) {
  const Eigen::Index m = K.rows(), c = K.cols();
  Eigen::VectorXd g(m);
  auto row = [&](Eigen::Index i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) s += K(i, j) * w(j);
    g(i) = s;
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < m; ++i) row(i);
  } else {
    for (Eigen::Index i = 0; i < m; ++i) row(i);
  }
  return g;
}

Eigen::MatrixXd continuous_weights(const DiscreteMeasure& mu, double s, ContinuousOptions opt, Exec ex) {
  if (!(s > 0.0 && s < 1.0)) fail(ErrorKind::invalid_argument, "continuous norm: need 0 < s < 1");
  const int n = mu.n();
  if (opt.near < 0) opt.near = n == 1 ? 3 : 1;
  if (opt.q < 0) opt.q = n == 1 ? 16 : 6;
  const int64_t L = mu.leaf_count();
  const double h = mu.leaf_side();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(L, L);

  auto pair_term = [&](const Point& x, const Point& y) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
    const double d = std::sqrt(r2), r = 0.5 * d;
    Point lo{0, 0}, hi{1, 1};
    for (int a = 0; a < n; ++a) {
      const double m = 0.5 * (x[a] + y[a]);
      lo[a] = m - r;
      hi[a] = m + r;
    }
    const double ball = mu.box_mass(lo, hi);
    return ball > 0.0 ? 1.0 / (std::pow(d, 2.0 * s) * ball) : 0.0;
  };

  const int q = opt.q;
  const int qn = n == 1 ? q : q * q;
  auto sub = [&](int64_t leaf, int t) {
    const IPoint c = mu.leaf_coords(leaf);
    const int t0 = n == 1 ? t : t / q, t1 = n == 1 ? 0 : t % q;
    return Point{(c[0] + (t0 + 0.5) / q) * h, n == 2 ? (c[1] + (t1 + 0.5) / q) * h : 0.0};
  };

  auto row = [&](int64_t i) {
    const IPoint ci = mu.leaf_coords(i);
    const Point xi = mu.leaf_center(i);
    for (int64_t j = i + 1; j < L; ++j) {
      const IPoint cj = mu.leaf_coords(j);
      int64_t gap = 0;
      for (int a = 0; a < n; ++a) gap = std::max<int64_t>(gap, std::llabs(ci[a] - cj[a]));
      double w;
      if (gap <= opt.near) {
        double acc = 0.0;
        for (int a = 0; a < qn; ++a) {
          const Point x = sub(i, a);
          for (int b = 0; b < qn; ++b) acc += pair_term(x, sub(j, b));
        }
        w = acc / (static_cast<double>(qn) * qn);
      } else {
        w = pair_term(xi, mu.leaf_center(j));
      }
      W(i, j) = w * mu.leaf_mass(i) * mu.leaf_mass(j);
    }
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t i = 0; i < L; ++i) row(i);
  } else {
    for (int64_t i = 0; i < L; ++i) row(i);
  }
  // Ordered pairs: both (i,j) and (j,i) contribute.
  for (int64_t i = 0; i < L; ++i)
    for (int64_t j = i + 1; j < L; ++j) W(j, i) = W(i, j);
  return W;
}

double continuous_norm_sq(const Eigen::MatrixXd& W, const std::vector<double>& f, Exec ex) {
  const int64_t L = W.rows();
  if (static_cast<int64_t>(f.size()) != L) fail(ErrorKind::invalid_argument, "continuous norm: size mismatch");
  std::vector<double> rows(static_cast<size_t>(L), 0.0);
  auto row = [&](int64_t i) {
    double s = 0.0;
    for (int64_t j = 0; j < L; ++j) {
      const double d = f[i] - f[j];
      s += W(i, j) * d * d;
    }
    rows[i] = s;
  };
  if (ex == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < L; ++i) row(i);
  } else {
    for (int64_t i = 0; i < L; ++i) row(i);
  }
  double t = 0.0;
  for (double r : rows) t += r;
  return t;
}

}  // namespace sobolab
