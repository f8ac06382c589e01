#pragma once

#include <string>
#include <vector>

#include "sobolab/kernels.hpp"
#include "sobolab/wavelet.hpp"

namespace sobolab {

// Squared pieces of a dyadic Sobolev norm: the cube sum (homogeneous) and the
// coarse energy of the tops weighted by l(T)^{-2s}.
struct NormParts {
  double homogeneous_sq = 0.0;
  double coarse_sq = 0.0;
  double homogeneous() const;
  double full() const;
};

void check_order(double s);
double side_weight(const DyadicGrid& g, int depth, double s);  // l(depth)^{-2s}

NormParts norm_dyadic(const WaveletCoefficients& c, double s);
NormParts sobolev_norm(const AlpertSystem& sys, const LeafFunction& f, double s);

// Square root of sum over grid cubes Q of l(Q)^{-2s} ||f - E_Q f||^2_{L2(mu)}, via coefficients.
double norm_difference(const WaveletCoefficients& c, double s);
// kappa = 1 identity, also returned as a norm: 1/2 sum_Q l(Q)^{-2s} |Q|^{-1} sum_{x,y in Q} (f(x)-f(y))^2 mu(x) mu(y).
double norm_difference_pairwise(const DiscreteMeasure& mu, const DyadicGrid& g, const std::vector<double>& f,
                                double s, int top_depth);

double norm_continuous(const DiscreteMeasure& mu, const std::vector<double>& f, double s, ContinuousOptions opt = {});

struct DualityResult {
  double pairing = 0.0;
  double bound = 0.0;  // ||f||_{W^s} ||g||_{W^{-s}}, full norms
};
DualityResult duality_pairing(const WaveletCoefficients& f, const WaveletCoefficients& g, double s);

struct EquivalenceReport {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  int count = 0;
  int skipped = 0;
  std::string description;
};
EquivalenceReport equivalence_ratio(const std::vector<double>& a, const std::vector<double>& b,
                                    const std::string& description);

// Piecewise-constant test functions: random wavelet combinations, indicators of
// random dyadic cubes and leaf-aligned boxes, and cell-centre samples of smooth functions.
std::vector<std::vector<double>> make_ensemble(const DiscreteMeasure& mu, int count, uint64_t seed);

// 2N alternating cells of width 1/(4N) on [0,1/2); requires 4N <= 2^depth.
std::vector<double> alternating_family(int depth, int N);

// sum_{m=0}^{depth(I)} 2^{m|s|} |I| / |pi^m I| along the ancestors of I.
double tower_sum(const DiscreteMeasure& mu, const DyadicGrid& g, const Cube& I, double s);

}  // namespace sobolab
