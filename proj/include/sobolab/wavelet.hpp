#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sobolab/grid.hpp"
#include "sobolab/measure.hpp"
#include "sobolab/polynomial.hpp"

namespace sobolab {

// Per-leaf polynomial: column k holds the monomial coefficients (graded-lex,
// degree < kappa) of the restriction to leaf k in leaf-local coordinates
// u = (x - c_leaf)/h, u in [-1/2,1/2]^n.
struct LeafFunction {
  int n = 1;
  int depth = 1;
  int kappa = 1;
  Eigen::MatrixXd c;

  static LeafFunction zeros(int n, int depth, int kappa);
  static LeafFunction from_values(int n, int depth, const std::vector<double>& values);
  int64_t leaves() const { return c.cols(); }
  double operator()(const Point& x) const;
  // Value at leaf-local coordinate u of leaf k.
  double at(int64_t leaf, const Point& u) const;
};

// Leaf moments F(alpha, k) = int_leaf u^alpha f dmu for |alpha| < kappa.
Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const LeafFunction& f);
// Same for an arbitrary function, by q-point tensor Gauss rule on every leaf.
Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const std::function<double(const Point&)>& f,
                             int q);
// Restricted to the leaf box [lo, hi) (leaf units); other columns are zero.
Eigen::MatrixXd leaf_moments(const DiscreteMeasure& mu, int kappa, const std::function<double(const Point&)>& f, int q,
                             const IPoint& lo, const IPoint& hi);
double l2_norm_sq(const DiscreteMeasure& mu, const LeafFunction& f);
double l2_norm_sq(const DiscreteMeasure& mu, const std::function<double(const Point&)>& f, int q);

struct CubeBasis {
  Cube cube;
  double mass = 0.0;
  Eigen::VectorXd mom;      // int_Q u^beta dmu, |beta| <= 2 kappa - 2, u cube-local
  Eigen::MatrixXd H;        // d x (2^n P): wavelets in child-local coordinates
  Eigen::MatrixXd B;        // P x r: orthonormal polynomial basis on Q
  std::array<int64_t, 4> child{-1, -1, -1, -1};  // local index at depth+1, -1 if absent
  int dim() const { return static_cast<int>(H.rows()); }
};

struct BasisIndex {
  int depth = 0;      // cube depth
  int64_t local = 0;  // local index at that depth
  int a = 0;          // position inside the cube block
  bool coarse = false;
};

class AlpertSystem;

struct WaveletCoefficients {
  const AlpertSystem* sys = nullptr;
  Eigen::VectorXd v;                    // flat coefficient vector, see AlpertSystem::entry
  std::vector<Eigen::MatrixXd> moments;  // per level (depth - top): P x cubes, int_Q u^beta f dmu

  Eigen::VectorXd cube(int depth, int64_t local) const;
  Eigen::VectorXd coarse(int64_t top) const;
};

class AlpertSystem {
 public:
  // top_depth defaults to the grid's coarsest depth.
  AlpertSystem(const DiscreteMeasure& mu, const DyadicGrid& g, int kappa, int top_depth = INT32_MIN);

  const DiscreteMeasure& measure() const { return *mu_; }
  const DyadicGrid& grid() const { return g_; }
  int kappa() const { return kappa_; }
  int n() const { return g_.n(); }
  int P() const { return set_.size(); }
  const MonomialSet& monomials() const { return set_; }
  int top_depth() const { return top_; }
  int max_depth() const { return g_.max_depth(); }

  const CubeBasis& basis(int depth, int64_t local) const { return levels_[depth - top_][local]; }
  const CubeBasis& basis(const Cube& q) const { return basis(q.depth, g_.local_index(q)); }
  int64_t cubes_at(int depth) const { return static_cast<int64_t>(levels_[depth - top_].size()); }

  // Flat layout: coarse blocks of every top first, then cube blocks by depth and local index.
  int64_t dimension() const { return dim_; }
  int64_t offset(int depth, int64_t local) const { return offsets_[depth - top_][local]; }
  int64_t coarse_offset(int64_t top) const { return coarse_off_[top]; }
  int coarse_dim(int64_t top) const { return static_cast<int>(levels_[0][top].B.cols()); }
  const std::vector<BasisIndex>& entries() const { return entries_; }
  // Side length of the cube owning entry k (leaf units).
  int64_t entry_side(int64_t k) const;

  WaveletCoefficients analyze(const Eigen::MatrixXd& F) const;
  WaveletCoefficients analyze(const LeafFunction& f) const { return analyze(leaf_moments(*mu_, kappa_, f)); }
  LeafFunction synthesize(const Eigen::VectorXd& v) const;
  // Basis element k of the flat layout, as a leaf function.
  LeafFunction element(int64_t k) const;
  LeafFunction wavelet(int depth, int64_t local, int a) const { return element(offset(depth, local) + a); }

  // Moments int_Q u^beta f dmu (u local to Q) by accumulation over the subtree of Q.
  Eigen::VectorXd cube_moments(const Eigen::MatrixXd& F, const Cube& q) const;
  // E_Q f as polynomial coefficients in Q-local coordinates.
  Eigen::VectorXd project_E(const Eigen::MatrixXd& F, const Cube& q) const;
  // Orthonormal polynomial basis of Q (Q-local coordinates), P x r.
  const Eigen::MatrixXd& poly_basis(const Cube& q) const { return basis(q).B; }

  // Sum over cubes R inside Q of w(R) |f^(R)|^2 plus the coarse energy of Q, computed on
  // the subtree of Q only (so Q acts as the top).
  struct SubtreeEnergy {
    double homogeneous = 0.0;
    double coarse = 0.0;
  };
  SubtreeEnergy subtree_energy(const Eigen::MatrixXd& F, const Cube& q, double s) const;

  // Polynomial p (coefficients in Q-local coordinates) restricted to Q, as a leaf function.
  LeafFunction push_down(const Cube& q, const Eigen::VectorXd& p) const;

 private:
  void build();

  const DiscreteMeasure* mu_;
  DyadicGrid g_;
  int kappa_;
  int top_;
  MonomialSet set_, set2_;
  std::vector<Eigen::MatrixXd> A_;   // child re-expansion on the kappa set
  std::vector<Eigen::MatrixXd> A2_;  // same on the 2kappa-1 set
  Eigen::MatrixXd Gref_;             // leaf-local Gram over [-1/2,1/2]^n, kappa set
  Eigen::MatrixXi sum_index_;        // index in set2_ of alpha+beta
  std::vector<std::vector<CubeBasis>> levels_;
  std::vector<std::vector<int64_t>> offsets_;
  std::vector<int64_t> coarse_off_;
  std::vector<BasisIndex> entries_;
  int64_t dim_ = 0;
};

// Self-checks of a built system against moments computed directly from the measure.
struct BasisReport {
  double gram_error = 0.0;         // max |H G H^T - I| over cubes
  double moment_error = 0.0;       // max |int h x^beta dmu| / sqrt|Q|, |beta| < kappa, Q-scaled monomials
  double telescoping_error = 0.0;  // relative, over random (Q, ancestor P) pairs
  double roundtrip_error = 0.0;    // relative max coefficient error of synthesize(analyze(f))
  double parseval_error = 0.0;     // relative
  int reduced_cubes = 0;           // cubes with fewer than the generic number of wavelets
  int cubes = 0;
};
BasisReport check_basis(const AlpertSystem& sys, uint64_t seed, int pairs = 200);

}  // namespace sobolab
