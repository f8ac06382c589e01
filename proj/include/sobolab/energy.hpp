#pragma once

#include <string>
#include <vector>

#include "sobolab/poisson.hpp"

namespace sobolab {

struct MonotonicityTerms {
  double lhs = 0.0;     // ||Delta_J T mu||^2 in W^s(omega)
  double phi_sq = 0.0;
  double psi_sq = 0.0;
  Point m{0.0, 0.0};    // minimising point in J
  double delta = 0.5;
  double ratio() const { return phi_sq + psi_sq > 0.0 ? lhs / (phi_sq + psi_sq) : 0.0; }
};

// Signed remote measure as leaf masses on the mesh of omega. `exclusion` is the
// cube I with 2J inside it; the remote masses must vanish on I.
struct RemoteMeasure {
  std::vector<double> mass;
  Cube exclusion;
};

// Point m in J (a leaf centre) minimising ||  |x - m|^kappa  ||_{W^s(1_J omega)}.
Point minimizing_point(const AlpertSystem& sys, const Cube& J, double s, double* value = nullptr);

MonotonicityTerms monotonicity_terms(const AlpertSystem& sys, const Cube& J, const RemoteMeasure& remote, double s,
                                     double delta, const KernelSpec& k);

// ||  |h_J|  ||^2_{W^{-s}(mu)} / (d l(J)^{2s}) with |h_J| the pointwise Euclidean
// modulus of the d wavelets of J; exactly 1 at s = 0.
double modulus_wavelet_ratio(const AlpertSystem& sys, const Cube& J, double s);

// |<T nu, psi>_omega| over the pivotal bound. nu >= 0 must avoid gamma J; psi
// must be supported in J with vanishing omega-moments below order kappa.
double energy_pivotal_ratio(const AlpertSystem& sys, const Cube& J, const std::vector<double>& nu, double gamma,
                            const LeafFunction& psi, double s, const KernelSpec& k);

struct SweepResult {
  double value = 0.0;
  std::string witness;
  int samples = 0;
};

// Random remote masses on coarse cells outside 2J, J ranging over cubes of a
// fixed physical side 2^{-jdepth}; the same configurations at every mesh depth.
SweepResult monotonicity_sweep(const DiscreteMeasure& omega, int kappa, double s, double delta, const KernelSpec& k,
                               int samples, uint64_t seed, int jdepth = 3);

// Max energy ratio per gamma over one pool of (J, far cell, psi) configurations;
// each gamma keeps the configurations whose cell avoids gamma J.
std::vector<SweepResult> energy_constant_sweep(const DiscreteMeasure& omega, int kappa, double s, const KernelSpec& k,
                                               const std::vector<double>& gammas, int samples, uint64_t seed);

}  // namespace sobolab
