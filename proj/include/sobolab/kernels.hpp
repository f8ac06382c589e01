#pragma once

#include <Eigen/Dense>
#include <string>

#include "sobolab/measure.hpp"

namespace sobolab {

// Hot loops come in two flavours: an OpenMP version and a plain serial
// reference. Both must agree bit-for-bit on reductions (row sums are combined
// in a fixed order).
enum class Exec { serial, parallel };

enum class KernelFamily { fractional_integral, riesz, zero };
const char* to_string(KernelFamily f);
KernelFamily parse_kernel_family(const std::string& s);

struct KernelSpec {
  KernelFamily family = KernelFamily::fractional_integral;
  int component = 0;  // riesz component index
  double alpha = 0.0;
  double delta = 0.0;  // inner truncation radius; 0 picks 4 leaf sides
  double R = 0.0;      // outer truncation radius; 0 picks 4 sqrt(n)
  int bump_order = 3;
};

// Fills delta and R when left at 0, validates the rest.
KernelSpec resolve_kernel(KernelSpec k, int n, int depth);

// C^N smoothstep on [0,1]: 0 at 0, 1 at 1, N derivatives vanish at both ends.
double smoothstep(int N, double x);
double truncation(const KernelSpec& k, double r);
double kernel_eval(const KernelSpec& k, int n, const Point& x, const Point& y);

// K(x_i, y_j) over leaf centres of a mesh.
Eigen::MatrixXd kernel_matrix(const KernelSpec& k, const DiscreteMeasure& mesh, Exec ex = Exec::parallel);
Eigen::VectorXd matvec(const Eigen::MatrixXd& K, const Eigen::VectorXd& w, Exec ex = Exec::parallel);

struct ContinuousOptions {
  int near = -1;  // l-infinity leaf-index radius of the sub-sampled near field; -1 picks a default per dimension
  int q = -1;     // sub-cells per axis in the near field
};

// Symmetric pair weights W(i,j) with ||f||^2 = sum_{i,j} W(i,j) (f_i - f_j)^2 for
// piecewise-constant f (continuous Sobolev norm, ball of radius |x-y|/2).
Eigen::MatrixXd continuous_weights(const DiscreteMeasure& mu, double s, ContinuousOptions opt = {},
                                   Exec ex = Exec::parallel);
double continuous_norm_sq(const Eigen::MatrixXd& W, const std::vector<double>& f, Exec ex = Exec::parallel);

}  // namespace sobolab
