#include "sobolab/t1.hpp"

#include <cmath>
#include <limits>

namespace sobolab {

T1Report run_t1_experiment(const T1Config& c) {
  check_order(c.s);
  const DiscreteMeasure sigma = make_measure(c.sigma, c.n, c.depth);
  const DiscreteMeasure omega = make_measure(c.omega, c.n, c.depth);
  const OperatorSetup op = make_operator(c.kernel, sigma, omega);
  const DyadicGrid g(c.n, c.depth);
  const AlpertSystem ss(sigma, g, c.kappa), so(omega, g, c.kappa);
  const std::vector<DyadicGrid> ens = one_third_ensemble(c.n, c.depth);

  T1Report r;
  const Eigen::MatrixXd M = scale_matrix(assemble_matrix(op, ss, so), ss, so, c.s);
  const ConstantReport N = operator_norm(M, c.power);
  r.N = N.value;
  r.converged = N.converged;
  r.witness_N = N.note.empty() ? N.witness : N.witness + "; " + N.note;

  const ConstantReport tf = testing_constant(op, so, ens, c.s, 1, TestingMode::global, false, 0, &ss);
  const ConstantReport td = testing_constant(op, ss, ens, c.s, 1, TestingMode::global, true, 0, &so);
  r.T_fwd = tf.value;
  r.T_dual = td.value;
  r.witness_fwd = tf.witness;
  r.witness_dual = td.witness;
  r.T_fwd_cube = testing_constant(op, so, ens, c.s, 1, TestingMode::cube, false, 0).value;
  r.T_dual_cube = testing_constant(op, ss, ens, c.s, 1, TestingMode::cube, true, 0).value;
  r.T_triple = testing_constant(op, so, ens, c.s, c.testing_kappa, TestingMode::triple, false, 0).value;

  if (c.kernel.family != KernelFamily::zero) {
    const ConstantReport a2 = muckenhoupt_a2(sigma, omega, op.kernel.alpha, ens);
    r.sqrtA2 = std::sqrt(a2.value);
    r.witness_A2 = a2.witness;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.applicable = r.N > 0.0;
  if (!r.applicable) {
    r.ratio_lower = r.ratio_upper = r.no_tails_C = nan;
    return r;
  }
  r.ratio_lower = std::max({r.T_fwd, r.T_dual, r.sqrtA2}) / r.N;
  const double den = r.T_fwd + r.T_dual + r.sqrtA2;
  r.ratio_upper = den > 0.0 ? r.N / den : nan;
  const double base = r.T_fwd_cube + r.sqrtA2;
  r.no_tails_C = base > 0.0 ? std::max(0.0, r.T_triple - c.eps2 * r.N) / base : nan;
  return r;
}

std::vector<T1Config> t1_suite(int n, int depth) {
  std::vector<T1Config> out;
  MeasureSpec leb;
  MeasureSpec pa, pb;
  pa.kind = pb.kind = MeasureKind::power;
  pa.a = {-0.5, -0.5};
  pb.a = {0.5, 0.5};
  const std::pair<MeasureSpec, MeasureSpec> pairs[] = {{leb, leb}, {pa, pb}};
  for (const auto& [sg, om] : pairs)
    for (int fam = 0; fam < 2; ++fam)
      for (double s : {0.0, 0.1}) {
        T1Config c;
        c.n = n;
        c.depth = depth;
        c.sigma = sg;
        c.omega = om;
        c.kernel.family = fam == 0 ? KernelFamily::riesz : KernelFamily::fractional_integral;
        c.kernel.alpha = fam == 0 ? 0.0 : 0.5;
        c.kernel.delta = 0.125;
        c.s = s;
        c.label = sg.label() + "/" + om.label() + " " + to_string(c.kernel.family) + " s=" + (s == 0.0 ? "0" : "0.1");
        out.push_back(c);
      }
  return out;
}

}  // namespace sobolab
