#pragma once

#include <string>
#include <vector>

#include "sobolab/poisson.hpp"

namespace sobolab {

struct T1Config {
  int n = 1;
  int depth = 5;
  MeasureSpec sigma;
  MeasureSpec omega;
  KernelSpec kernel;
  double s = 0.0;
  int kappa = 1;          // Alpert order of both systems
  int testing_kappa = 1;  // monomial order of the cube tests
  double eps2 = 0.1;      // small multiple of N allowed in the no-tails check
  PowerOptions power;
  std::string label;
};

struct T1Report {
  double N = 0.0;
  double T_fwd = 0.0;   // sup ||T 1_Q||_{W^s(omega)} / ||1_Q||_{W^s(sigma)}
  double T_dual = 0.0;  // same for the adjoint at order -s
  double sqrtA2 = 0.0;
  double ratio_lower = 0.0;  // max(T_fwd, T_dual, sqrtA2) / N
  double ratio_upper = 0.0;  // N / (T_fwd + T_dual + sqrtA2)
  // Cube-normalised testing constants l(Q)^{s} ||T 1_Q|| / sqrt|Q|.
  double T_fwd_cube = 0.0;
  double T_dual_cube = 0.0;
  double T_triple = 0.0;        // triple testing with testing_kappa
  double no_tails_C = 0.0;      // smallest C with T_triple <= C (T_fwd_cube + sqrtA2) + eps2 N
  bool converged = true;
  bool applicable = true;       // false when the operator vanishes
  std::string witness_N, witness_fwd, witness_dual, witness_A2;
};

T1Report run_t1_experiment(const T1Config& c);

// Two measure pairs x {Riesz alpha = 0, fractional integral alpha = 1/2} x s in {0, 0.1}.
std::vector<T1Config> t1_suite(int n, int depth);

}  // namespace sobolab
