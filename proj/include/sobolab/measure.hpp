#pragma once

#include <string>
#include <vector>

#include "sobolab/grid.hpp"
#include "sobolab/polynomial.hpp"

namespace sobolab {

enum class MeasureKind { lebesgue, power, cascade, table };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::lebesgue;
  std::array<double, 2> a{0.0, 0.0};  // power exponents per axis
  uint64_t seed = 1;                   // cascade
  double lo = 1.0 / 3.0, hi = 2.0 / 3.0;
  std::string path;                    // table
  std::string label() const;
};

// Piecewise-constant density on the 2^{nD} leaf cells of [0,1)^n, stored as leaf
// masses in row-major order (axis 0 slowest).
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  DiscreteMeasure(int n, int depth, std::vector<double> masses);

  int n() const { return n_; }
  int depth() const { return D_; }
  int64_t leaves_per_axis() const { return N_; }
  int64_t leaf_count() const { return static_cast<int64_t>(mass_.size()); }
  double leaf_side() const { return 1.0 / static_cast<double>(N_); }
  double leaf_volume() const;
  const std::vector<double>& masses() const { return mass_; }
  double leaf_mass(int64_t idx) const { return mass_[static_cast<size_t>(idx)]; }
  int64_t leaf_index(const IPoint& c) const { return n_ == 1 ? c[0] : c[0] * N_ + c[1]; }
  IPoint leaf_coords(int64_t idx) const;
  Point leaf_center(int64_t idx) const;
  double total() const { return total_; }

  // Mass of the leaf-aligned box [lo, hi) (leaf units), clipped to the domain.
  double box_mass(const IPoint& lo, const IPoint& hi) const;
  // Mass of an arbitrary axis-parallel box, exact for the piecewise-constant density.
  double box_mass(const Point& lo, const Point& hi) const;
  // Direct summation over the leaves of Q clipped to the domain.
  double cube_mass(const Cube& q) const;

  void write_table(const std::string& path) const;

 private:
  long double prefix(int64_t i, int64_t j) const;
  double cumulative(const Point& x) const;

  int n_ = 1;
  int D_ = 1;
  int64_t N_ = 2;
  std::vector<double> mass_;
  std::vector<long double> prefix_;
  double total_ = 0.0;
};

DiscreteMeasure make_measure(const MeasureSpec& spec, int n, int depth);

double cube_mass(const DiscreteMeasure& mu, const Cube& q);

double monomial_moment(const DiscreteMeasure& mu, const Cube& q, const MultiIndex& beta, const Point& center,
                       double scale);

struct DoublingReport {
  double C_doub = 1.0;    // sup |2Q|/|Q| over concentric doubles inside the domain
  double C_parent = 1.0;  // sup |parent(Q)|/|Q|
  double theta_doub = 0.0;
  double theta_rev = 0.0;
  int cubes = 0;
};

DoublingReport doubling_exponents(const DiscreteMeasure& mu, int dmin, int dmax);

struct HaloResult {
  double mass = 0.0;
  bool renormalized = false;
  double sup_norm = 1.0;
};

HaloResult halo_mass(const DiscreteMeasure& mu, const Cube& q, const Polynomial& P, double delta);

// Fit of log(halo/|Q|) against log(delta) over delta = 2^{-k}, k = kmin..depth.
LinearFit halo_decay_fit(const DiscreteMeasure& mu, const Cube& q, const Polynomial& P, int kmin = 2);

}  // namespace sobolab
