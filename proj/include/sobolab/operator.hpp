#pragma once

#include <string>
#include <vector>

#include "sobolab/kernels.hpp"
#include "sobolab/sobolev.hpp"
#include "sobolab/wavelet.hpp"

namespace sobolab {

struct ConstantReport {
  double value = 0.0;
  std::string witness;
  bool converged = true;
  int iterations = 0;
  std::string note;
  Eigen::VectorXd right;  // f witness (coefficients), when applicable
  Eigen::VectorXd left;   // g witness
};

// Kernel matrix over leaf centres of the common mesh of sigma and omega.
struct OperatorSetup {
  const DiscreteMeasure* sigma = nullptr;
  const DiscreteMeasure* omega = nullptr;
  KernelSpec kernel;
  Eigen::MatrixXd K;  // K(x_i, y_j)
};

OperatorSetup make_operator(const KernelSpec& k, const DiscreteMeasure& sigma, const DiscreteMeasure& omega,
                            Exec ex = Exec::parallel);

// g(x) = sum_y K(x, y) int_y f dsigma at leaf centres (piecewise constant output).
std::vector<double> apply_operator(const OperatorSetup& op, const LeafFunction& f, Exec ex = Exec::parallel);
// Adjoint side: T*_omega g(y) = sum_x K(x, y) int_x g domega.
std::vector<double> apply_adjoint(const OperatorSetup& op, const LeafFunction& g, Exec ex = Exec::parallel);

// Leaf integrals int_leaf h dmu of every basis element, L x dim.
Eigen::MatrixXd leaf_integrals(const AlpertSystem& sys);

// M(j, i) = <T_sigma h_i, h_j>_omega, coarse rows/columns included.
Eigen::MatrixXd assemble_matrix(const OperatorSetup& op, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega);
// diag(l(J)^{-s}) M diag(l(I)^{s}).
Eigen::MatrixXd scale_matrix(const Eigen::MatrixXd& M, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega,
                             double s);

struct PowerOptions {
  double tol = 1e-8;
  int max_iter = 20000;
};
ConstantReport operator_norm(const Eigen::MatrixXd& M, PowerOptions opt = {});

// Standard grid plus the one-third shifts floor(j 2^D / 3), j in {0,1,2}^n.
std::vector<DyadicGrid> one_third_ensemble(int n, int depth);

enum class TestingMode { cube, triple, global };
const char* to_string(TestingMode m);
TestingMode parse_testing_mode(const std::string& s);

// Per-cube testing value; returns the sup with its witness. The target system
// measures the output (omega forward, sigma dual). With a source system the value
// is divided by the norm of the test function there instead of l(Q)^{-s} sqrt|Q|.
ConstantReport testing_constant(const OperatorSetup& op, const AlpertSystem& target,
                                const std::vector<DyadicGrid>& ensemble, double s, int kappa, TestingMode mode,
                                bool dual, int min_depth = 1, const AlpertSystem* source = nullptr);
// Value for one cube and monomial, exposed for cross-checks.
double testing_value(const OperatorSetup& op, const AlpertSystem& target, const DyadicGrid& g, const Cube& q,
                     const MultiIndex& beta, double s, TestingMode mode, bool dual,
                     const AlpertSystem* source = nullptr);

ConstantReport wbp_constant(const OperatorSetup& op, const std::vector<DyadicGrid>& ensemble, double s, int kappa,
                            int max_gap = 3);

struct FormSplit {
  double below = 0.0;       // J deeply embedded in I
  double above = 0.0;       // I deeply embedded in J
  double disjoint = 0.0;    // disjoint, side ratio beyond 2^rho
  double comparable = 0.0;  // side ratio within 2^rho
  double residual = 0.0;    // nested, far apart in scale, but not deeply embedded
  double coarse = 0.0;      // pairs involving a coarse (top) element
  double total() const { return below + above + disjoint + comparable + residual + coarse; }
};
FormSplit form_split(const Eigen::MatrixXd& M, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega,
                     const Eigen::VectorXd& f, const Eigen::VectorXd& g, int rho, double eps);

}  // namespace sobolab
