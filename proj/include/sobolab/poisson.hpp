#pragma once

#include <string>
#include <vector>

#include "sobolab/operator.hpp"

namespace sobolab {

// Optional support restriction for the measure inside a Poisson integral, leaf units.
struct Region {
  bool include = false;
  IPoint inc_lo{0, 0}, inc_hi{0, 0};
  bool exclude = false;
  IPoint exc_lo{0, 0}, exc_hi{0, 0};

  static Region inside(const Cube& q);
  static Region annulus(const Cube& outer, const Cube& hole);
  bool contains(const IPoint& leaf, int n) const;
};

// sum over leaves of l(J)^m / (l(J) + |y - c_J|)^{m+n-alpha} mu(leaf), Euclidean distance.
double poisson_integral(const DyadicGrid& g, const Cube& J, const DiscreteMeasure& mu, double m, double alpha,
                        const Region& region = {});

ConstantReport muckenhoupt_a2(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, double alpha,
                              const std::vector<DyadicGrid>& ensemble);

enum class PivotalStrategy { uniform_depth, greedy_stopping, dyadic_optimal };
const char* to_string(PivotalStrategy s);
PivotalStrategy parse_pivotal_strategy(const std::string& s);

struct PivotalParams {
  double alpha = 0.0;
  int kappa = 1;
  double eps = 0.0;
  PivotalStrategy strategy = PivotalStrategy::dyadic_optimal;
  int depth_t = 3;     // uniform_depth: partitions at relative depth 1..t
  double gamma = 1.0;  // greedy_stopping threshold
};

// Lower bound for the pivotal constant over tops of the standard grid; the trivial
// decomposition {Q} is always among the candidates.
ConstantReport pivotal_constant(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, const PivotalParams& p);

// Ratio P_m(J, s 1_{K\I}) / [(l(J)/l(I))^{m - eps(n+m-alpha)} P_m(I, s 1_{K\I})].
// NaN when the annulus carries no mass. J == I is accepted.
double poisson_decay_ratio(const DyadicGrid& g, const Cube& J, const Cube& I, const Cube& K,
                           const DiscreteMeasure& sigma, int m, double alpha, double eps);
bool poisson_decay_admissible(const DyadicGrid& g, const Cube& J, const Cube& I, const Cube& K, double eps);

// Max decay ratio over `count` random admissible triples of the standard grid
// (iterations reports how many were found; NaN ratios from empty annuli are skipped).
ConstantReport poisson_decay_sweep(const DiscreteMeasure& sigma, int m, double alpha, double eps, int count,
                                   uint64_t seed);

}  // namespace sobolab
