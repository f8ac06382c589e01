#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "sobolab/common.hpp"

namespace sobolab {

using MultiIndex = std::array<int, 2>;

inline int total_degree(const MultiIndex& e) { return e[0] + e[1]; }

// Monomials of total degree < bound in n variables, graded-lex order:
// (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) ...  Lower bounds give prefixes.
class MonomialSet {
 public:
  MonomialSet() = default;
  MonomialSet(int n, int bound);
  int n() const { return n_; }
  int bound() const { return bound_; }
  int size() const { return static_cast<int>(list_.size()); }
  const MultiIndex& operator[](int i) const { return list_[i]; }
  int index(const MultiIndex& e) const;
  const std::vector<MultiIndex>& list() const { return list_; }

 private:
  int n_ = 1;
  int bound_ = 0;
  std::vector<MultiIndex> list_;
};

int monomial_count(int n, int bound);

// Integral of u^e over the centred unit box [-1/2,1/2]^n.
double ref_moment(int n, const MultiIndex& e);

// Matrix A with (a*u + b)^beta = sum_eta A(beta, eta) u^eta, rows/cols indexed by `set`.
Eigen::MatrixXd affine_reexpansion(const MonomialSet& set, double a, const Point& b);

// Gauss-Legendre rule mapped to [-1/2,1/2]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int q);

// Two-pass modified Gram-Schmidt of the columns of V in the inner product G.
// Columns whose residual falls below rel_tol times their own G-norm are dropped.
// Returns the accepted orthonormal columns and the originating column indices.
struct GsResult {
  Eigen::MatrixXd Q;
  std::vector<int> source;
};
GsResult metric_gram_schmidt(const Eigen::MatrixXd& G, const Eigen::MatrixXd& V, double rel_tol);

struct Polynomial {
  int n = 1;
  std::vector<std::pair<MultiIndex, double>> terms;

  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  int degree() const;
};

}  // namespace sobolab
