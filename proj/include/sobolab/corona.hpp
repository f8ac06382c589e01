#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sobolab/poisson.hpp"

namespace sobolab {

struct CoronaNode {
  Cube cube;
  int generation = 0;
  int parent = -1;
  std::vector<int> children;
};

struct CoronaForest {
  DyadicGrid grid;
  double gamma = 0.0;
  int kappa = 1;
  double alpha = 0.0;
  std::vector<CoronaNode> nodes;           // nodes[0] is the root
  std::vector<std::vector<int>> assign;    // per depth, per local index: owning node (-1 outside the root)

  int corona_of(const Cube& q) const { return assign[q.depth][grid.local_index(q)]; }
  int generations() const;
  void write(std::ostream& out) const;  // "depth coords generation parent-index"
};

// Stopping children of F: maximal strict subcubes R (depth <= D-1) with
// P_kappa^alpha(R, 1_F sigma)^2 |R|_omega >= gamma |R|_sigma.
CoronaForest build_corona(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, double gamma, int kappa,
                          double alpha, const Cube* root = nullptr);

ConstantReport carleson_constant(const CoronaForest& forest, const DiscreteMeasure& sigma, double eps);

// max over I in C_F (I != F, depth < D) of P^2 |I|_omega / (gamma |I|_sigma); below 1 by construction.
double pivotal_control_max(const CoronaForest& forest, const DiscreteMeasure& sigma, const DiscreteMeasure& omega);

// max over f of sum_F l(F)^{-2s} ||E_F f||^2 / ||f||^2_{W^s} (full norm) for piecewise-constant f.
double quasiorthogonality_ratio(const CoronaForest& forest, const std::vector<std::vector<double>>& ensemble, double s,
                                int kappa, const DiscreteMeasure& mu);

struct ShiftedCorona {
  int tau = 1;
  std::vector<std::vector<std::vector<int>>> members;  // per depth, per local index: F indices whose shifted corona holds J
  int max_overlap = 0;
};
ShiftedCorona shifted_corona_assign(const CoronaForest& forest, int tau);

}  // namespace sobolab
