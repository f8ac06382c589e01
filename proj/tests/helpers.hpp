#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sobolab/measure.hpp"

namespace th {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::vector<double> random_values(size_t count, uint64_t seed) {
  sobolab::Rng rng(seed);
  std::vector<double> v(count);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// 6-point Gauss per axis on every leaf, density = leaf mass / leaf volume.
inline double integrate(const sobolab::DiscreteMeasure& mu, const std::function<double(const sobolab::Point&)>& f) {
  static const double x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                              0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
  static const double w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                              0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
  const int n = mu.n();
  const double h = mu.leaf_side();
  double total = 0.0;
  for (int64_t k = 0; k < mu.leaf_count(); ++k) {
    const double dens = mu.leaf_mass(k);
    if (dens == 0.0) continue;
    const sobolab::Point c = mu.leaf_center(k);
    double s = 0.0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < (n == 2 ? 6 : 1); ++j) {
        const sobolab::Point p{c[0] + 0.5 * h * x[i], n == 2 ? c[1] + 0.5 * h * x[j] : 0.0};
        s += 0.5 * w[i] * (n == 2 ? 0.5 * w[j] : 1.0) * f(p);
      }
    total += dens * s;
  }
  return total;
}

}  // namespace th
