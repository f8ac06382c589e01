#include "sobolab/polynomial.hpp"

#include <cmath>

namespace sobolab {

MonomialSet::MonomialSet(int n, int bound) : n_(n), bound_(bound) {
  if (n < 1 || n > 2) fail(ErrorKind::invalid_argument, "monomial set: dimension must be 1 or 2");
  for (int d = 0; d < bound; ++d) {
    if (n == 1) {
      list_.push_back({d, 0});
    } else {
      for (int j = 0; j <= d; ++j) list_.push_back({d - j, j});
    }
  }
}

int MonomialSet::index(const MultiIndex& e) const {
  const int d = total_degree(e);
  if (e[0] < 0 || e[1] < 0 || d >= bound_) return -1;
  if (n_ == 1) return e[1] == 0 ? d : -1;
  return d * (d + 1) / 2 + e[1];
}

int monomial_count(int n, int bound) { return n == 1 ? bound : bound * (bound + 1) / 2; }

double ref_moment(int n, const MultiIndex& e) {
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    const int k = e[i];
    if (k % 2 == 1) return 0.0;
    v *= std::pow(0.5, k) / (k + 1);
  }
  return v;
}

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

Eigen::MatrixXd affine_reexpansion(const MonomialSet& set, double a, const Point& b) {
  const int m = set.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const MultiIndex& be = set[i];
    for (int j = 0; j < m; ++j) {
      const MultiIndex& et = set[j];
      double v = 1.0;
      for (int ax = 0; ax < set.n(); ++ax) {
        if (et[ax] > be[ax]) {
          v = 0.0;
          break;
        }
        v *= binom(be[ax], et[ax]) * std::pow(a, et[ax]) * std::pow(b[ax], be[ax] - et[ax]);
      }
      A(i, j) = v;
    }
  }
  return A;
}

GaussRule gauss_legendre(int q) {
  // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
  GaussRule r;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  for (int k = 0; k < q; ++k) {
    r.nodes.push_back(0.5 * es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    r.weights.push_back(v * v);
  }
  return r;
}

GsResult metric_gram_schmidt(const Eigen::MatrixXd& G, const Eigen::MatrixXd& V, double rel_tol) {
  GsResult out;
  std::vector<Eigen::VectorXd> acc;
  for (int j = 0; j < V.cols(); ++j) {
    Eigen::VectorXd v = V.col(j);
    const double n0 = std::sqrt(std::max(0.0, v.dot(G * v)));
    if (n0 <= 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : acc) v -= q.dot(G * v) * q;
    }
    const double n1 = std::sqrt(std::max(0.0, v.dot(G * v)));
    if (n1 <= rel_tol * n0) continue;
    acc.push_back(v / n1);
    out.source.push_back(j);
  }
  out.Q.resize(V.rows(), static_cast<Eigen::Index>(acc.size()));
  for (size_t k = 0; k < acc.size(); ++k) out.Q.col(static_cast<Eigen::Index>(k)) = acc[k];
  return out;
}

double Polynomial::operator()(const Point& x) const {
  double v = 0.0;
  for (const auto& [e, c] : terms) {
    double t = c;
    for (int i = 0; i < n; ++i) t *= std::pow(x[i], e[i]);
    v += t;
  }
  return v;
}

Point Polynomial::gradient(const Point& x) const {
  Point g{0.0, 0.0};
  for (const auto& [e, c] : terms) {
    for (int i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      double t = c * e[i] * std::pow(x[i], e[i] - 1);
      for (int k = 0; k < n; ++k)
        if (k != i) t *= std::pow(x[k], e[k]);
      g[i] += t;
    }
  }
  return g;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, total_degree(t.first));
  return d;
}

}  // namespace sobolab
