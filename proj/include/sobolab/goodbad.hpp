#pragma once

#include <vector>

#include "sobolab/sobolev.hpp"

namespace sobolab {

struct BadProbability {
  int r = 0;
  int trials = 0;
  int64_t bad = 0;
  double estimate() const { return trials > 0 ? static_cast<double>(bad) / trials : 0.0; }
};

// Unit cube J = [0,1)^n, ancestors of side 2^k for k = r..depth_gap in a grid
// translated by a uniform integer shift in [0, 2^depth_gap)^n.
bool unit_cube_bad(int n, const IPoint& shift, int r, double eps, int depth_gap);
BadProbability bad_probability_mc(int n, int r, double eps, int depth_gap, int trials, uint64_t seed);

struct ProjectionSplit {
  Eigen::VectorXd good, bad;  // coefficient vectors, good + bad = all
};
ProjectionSplit split_good_bad(const WaveletCoefficients& c, const GoodnessParams& p);

// Monte-Carlo mean of ||P_bad f||_{W^s} / ||f||_{W^s} (homogeneous norms) over
// random leaf-lattice shifts, one value per entry of `orders`.
std::vector<double> bad_projection_norm_ratio(const DiscreteMeasure& mu, const std::vector<double>& f, int kappa,
                                              const std::vector<double>& orders, const GoodnessParams& p, int trials,
                                              uint64_t seed);

}  // namespace sobolab
