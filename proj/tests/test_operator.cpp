#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sobolab/operator.hpp"

using namespace sobolab;

namespace {

KernelSpec frac(double alpha, double delta = 0.0) {
  KernelSpec k;
  k.family = KernelFamily::fractional_integral;
  k.alpha = alpha;
  k.delta = delta;
  return k;
}

MeasureSpec power(double a) {
  MeasureSpec m;
  m.kind = MeasureKind::power;
  m.a = {a, a};
  return m;
}

// Haar (kappa = 1) full W^s norm of a piecewise-constant 1D function, written out
// from the two-child formula |coef|^2 = mL mR / (mL + mR) (avgL - avgR)^2.
double haar_norm_1d(const DiscreteMeasure& mu, const std::vector<double>& f, double s) {
  const int D = mu.depth();
  const int64_t N = mu.leaves_per_axis();
  double total = 0.0;
  for (int d = 0; d < D; ++d) {
    const int64_t side = N >> d;
    const double w = std::pow(std::ldexp(1.0, -d), -2.0 * s);
    for (int64_t a = 0; a < N; a += side) {
      double mL = 0, mR = 0, iL = 0, iR = 0;
      for (int64_t i = a; i < a + side / 2; ++i) {
        mL += mu.leaf_mass(i);
        iL += f[i] * mu.leaf_mass(i);
      }
      for (int64_t i = a + side / 2; i < a + side; ++i) {
        mR += mu.leaf_mass(i);
        iR += f[i] * mu.leaf_mass(i);
      }
      if (mL > 0 && mR > 0) total += w * mL * mR / (mL + mR) * std::pow(iL / mL - iR / mR, 2);
    }
  }
  double m = 0, in = 0;
  for (int64_t i = 0; i < N; ++i) {
    m += mu.leaf_mass(i);
    in += f[i] * mu.leaf_mass(i);
  }
  return std::sqrt(total + in * in / m);
}

}  // namespace

TEST_CASE("kernel formulas") {
  KernelSpec k = resolve_kernel(frac(0.5, 0.01), 1, 6);
  CHECK(kernel_eval(k, 1, {0.25, 0}, {0.5, 0}) == doctest::Approx(2.0));
  CHECK(kernel_eval(k, 1, {0.25, 0}, {0.254, 0}) == 0.0);
  KernelSpec r = frac(0.0, 0.01);
  r.family = KernelFamily::riesz;
  r = resolve_kernel(r, 1, 6);
  CHECK(kernel_eval(r, 1, {0.5, 0}, {0.25, 0}) == doctest::Approx(4.0));
  CHECK(kernel_eval(r, 1, {0.25, 0}, {0.5, 0}) == doctest::Approx(-4.0));
  CHECK(smoothstep(3, 0.0) == 0.0);
  CHECK(smoothstep(3, 1.0) == 1.0);
  CHECK(smoothstep(3, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(resolve_kernel(frac(1.5), 1, 5), Error);
}

TEST_CASE("serial and parallel kernels agree exactly") {
  const DiscreteMeasure mu = make_measure(power(0.5), 1, 8);
  const KernelSpec k = resolve_kernel(frac(0.3), 1, 8);
  const Eigen::MatrixXd A = kernel_matrix(k, mu, Exec::serial), B = kernel_matrix(k, mu, Exec::parallel);
  CHECK((A - B).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(A.cols(), -1.0, 2.0);
  CHECK((matvec(A, w, Exec::serial) - matvec(A, w, Exec::parallel)).cwiseAbs().maxCoeff() == 0.0);
  const DiscreteMeasure m2 = make_measure(MeasureSpec{}, 1, 6);
  const Eigen::MatrixXd W1 = continuous_weights(m2, 0.2, {}, Exec::serial), W2 = continuous_weights(m2, 0.2, {}, Exec::parallel);
  CHECK((W1 - W2).cwiseAbs().maxCoeff() == 0.0);
  const auto f = th::random_values(64, 4);
  CHECK(continuous_norm_sq(W1, f, Exec::serial) == continuous_norm_sq(W1, f, Exec::parallel));
  const OperatorSetup op = make_operator(frac(0.5), m2, m2);
  const LeafFunction lf = LeafFunction::from_values(1, 6, f);
  CHECK(apply_operator(op, lf, Exec::serial) == apply_operator(op, lf, Exec::parallel));
  CHECK(apply_adjoint(op, lf, Exec::serial) == apply_adjoint(op, lf, Exec::parallel));
}

TEST_CASE("apply operator") {
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 6);
  const OperatorSetup op = make_operator(frac(0.5, 0.125), mu, mu);
  for (double v : apply_operator(op, LeafFunction::zeros(1, 6, 1))) CHECK(v == 0.0);
  std::vector<double> f(64, 0.0);
  for (int i = 0; i < 32; ++i) f[i] = 1.0;
  const auto g = apply_operator(op, LeafFunction::from_values(1, 6, f));
  for (double v : g) CHECK(v >= 0.0);
  // Refined mesh: average the fine output over each coarse leaf.
  const DiscreteMeasure fine = make_measure(MeasureSpec{}, 1, 8);
  const OperatorSetup opf = make_operator(frac(0.5, 0.125), fine, fine);
  std::vector<double> ff(256, 0.0);
  for (int i = 0; i < 128; ++i) ff[i] = 1.0;
  const auto gf = apply_operator(opf, LeafFunction::from_values(1, 8, ff));
  double num = 0, den = 0;
  for (int i = 0; i < 64; ++i) {
    const double avg = (gf[4 * i] + gf[4 * i + 1] + gf[4 * i + 2] + gf[4 * i + 3]) / 4;
    num += (g[i] - avg) * (g[i] - avg);
    den += avg * avg;
  }
  CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("matrix assembly") {
  const DiscreteMeasure mu = make_measure(power(0.5), 1, 5);
  const DyadicGrid g(1, 5);
  const AlpertSystem sys(mu, g, 1);
  KernelSpec zero;
  zero.family = KernelFamily::zero;
  CHECK(assemble_matrix(make_operator(zero, mu, mu), sys, sys).cwiseAbs().maxCoeff() == 0.0);

  const OperatorSetup op = make_operator(frac(0.5), mu, mu);
  const Eigen::MatrixXd M = assemble_matrix(op, sys, sys);
  // Direct bilinear evaluation <T h_i, h_j> through apply_operator and leaf sums.
  for (int64_t i : {int64_t{0}, int64_t{3}, int64_t{17}})
    for (int64_t j : {int64_t{1}, int64_t{3}, int64_t{30}}) {
      const auto Th = apply_operator(op, sys.element(i));
      const LeafFunction hj = sys.element(j);
      double v = 0.0;
      for (int64_t k = 0; k < 32; ++k) v += Th[k] * hj(mu.leaf_center(k)) * mu.leaf_mass(k);
      CHECK(M(j, i) == doctest::Approx(v).epsilon(1e-10).scale(1e-12));
    }
  CHECK((scale_matrix(M, sys, sys, 0.0) - M).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("power iteration against SVD") {
  CHECK(operator_norm(Eigen::MatrixXd::Zero(6, 4)).value == 0.0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(5, 5);
  D.diagonal() << 1.0, -3.0, 2.0, 0.5, -2.9;
  CHECK(operator_norm(D).value == doctest::Approx(3.0).epsilon(1e-8));
  Rng rng(9);
  Eigen::MatrixXd R(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) R(i, j) = rng.normal();
  const double top = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(0);
  CHECK(std::abs(operator_norm(R).value - top) / top < 1e-6);

  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 5);
  const AlpertSystem sys(mu, DyadicGrid(1, 5), 1);
  const Eigen::MatrixXd M = scale_matrix(assemble_matrix(make_operator(frac(0.5), mu, mu), sys, sys), sys, sys, 0.1);
  const double sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
  CHECK(std::abs(operator_norm(M).value - sv) / sv < 1e-6);
}

TEST_CASE("testing constants") {
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 5);
  const DyadicGrid g(1, 5);
  const AlpertSystem sys(mu, g, 1);
  const std::vector<DyadicGrid> std_only{g};
  KernelSpec zero;
  zero.family = KernelFamily::zero;
  CHECK(testing_constant(make_operator(zero, mu, mu), sys, std_only, 0.1, 1, TestingMode::cube, false).value == 0.0);

  const OperatorSetup op = make_operator(frac(0.5), mu, mu);
  for (double s : {0.0, 0.1}) {
    // Exhaustive per-cube scan with an independent Haar norm.
    double best = 0.0;
    Cube arg{};
    for (int d = 1; d <= 5; ++d)
      for (int64_t k = 0; k < g.cubes_at(d); ++k) {
        const Cube q = g.from_local(d, k);
        std::vector<double> out(32, 0.0);
        double mass = 0.0;
        for (int64_t i = q.lo[0]; i < q.lo[0] + q.size; ++i) {
          mass += mu.leaf_mass(i);
          for (int64_t j = q.lo[0]; j < q.lo[0] + q.size; ++j) out[i] += op.K(i, j) * mu.leaf_mass(j);
        }
        const double v = std::pow(g.side(q), s) * haar_norm_1d(mu, out, s) / std::sqrt(mass);
        if (v > best) {
          best = v;
          arg = q;
        }
      }
    const ConstantReport r = testing_constant(op, sys, std_only, s, 1, TestingMode::cube, false);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-10));
    CHECK(testing_value(op, sys, g, arg, {0, 0}, s, TestingMode::cube, false) == doctest::Approx(best).epsilon(1e-10));
    const ConstantReport tr = testing_constant(op, sys, std_only, s, 1, TestingMode::triple, false);
    CHECK(tr.value >= r.value * (1 - 1e-12));
  }
}

TEST_CASE("weak boundedness") {
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 5);
  const auto ens = one_third_ensemble(1, 5);
  KernelSpec zero;
  zero.family = KernelFamily::zero;
  CHECK(wbp_constant(make_operator(zero, mu, mu), ens, 0.0, 1).value == 0.0);
  // Symmetric kernel and equal measures: swapping sigma and omega changes nothing.
  const DiscreteMeasure a = make_measure(power(0.5), 1, 5);
  const DiscreteMeasure b = make_measure(power(-0.5), 1, 5);
  const double ab = wbp_constant(make_operator(frac(0.5), a, b), ens, 0.0, 1).value;
  const double ba = wbp_constant(make_operator(frac(0.5), b, a), ens, 0.0, 1).value;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
  CHECK(ab > 0.0);
}

TEST_CASE("form splitting") {
  const DiscreteMeasure mu = make_measure(power(0.5), 1, 6);
  const AlpertSystem sys(mu, DyadicGrid(1, 6), 1);
  const OperatorSetup op = make_operator(frac(0.5), mu, mu);
  const Eigen::MatrixXd M = assemble_matrix(op, sys, sys);
  Rng rng(2);
  Eigen::VectorXd f(sys.dimension()), gv(sys.dimension());
  for (int64_t i = 0; i < sys.dimension(); ++i) {
    f(i) = rng.normal();
    gv(i) = rng.normal();
  }
  const FormSplit fs = form_split(M, sys, sys, f, gv, 2, 0.5);
  const auto Tf = apply_operator(op, sys.synthesize(f));
  const LeafFunction gl = sys.synthesize(gv);
  double direct = 0.0;
  for (int64_t k = 0; k < 64; ++k) direct += Tf[k] * gl(mu.leaf_center(k)) * mu.leaf_mass(k);
  CHECK(fs.total() == doctest::Approx(direct).epsilon(1e-9));

  // Single pair: exactly one bucket is nonzero.
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(sys.dimension()), e2 = e1;
  e1(sys.offset(1, 0)) = 1.0;
  e2(sys.offset(5, 3)) = 1.0;
  const FormSplit one = form_split(M, sys, sys, e1, e2, 2, 0.5);
  int nz = 0;
  for (double v : {one.below, one.above, one.disjoint, one.comparable, one.residual, one.coarse}) nz += v != 0.0;
  CHECK(nz == 1);
  // rho beyond the depth span: nothing is deeply embedded.
  const FormSplit big = form_split(M, sys, sys, f, gv, 10, 0.5);
  CHECK(big.below == 0.0);
  CHECK(big.above == 0.0);
}
