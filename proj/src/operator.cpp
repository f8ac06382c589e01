#include "sobolab/operator.hpp"

#include <cmath>
#include <cstdio>

namespace sobolab {

namespace {

std::string cube_label(const DyadicGrid& g, const Cube& q) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "grid(%lld,%lld) depth %d lo (%lld,%lld) size %lld", static_cast<long long>(g.shift()[0]),
                static_cast<long long>(g.shift()[1]), q.depth, static_cast<long long>(q.lo[0]),
                static_cast<long long>(q.lo[1]), static_cast<long long>(q.size));
  return buf;
}

// Absolute centre of q.
Point centre(const DyadicGrid& g, const Cube& q) { return g.center(q); }

// w(y) = int_leaf ((x - c_Q)/l(Q))^beta dmu for every leaf of Q (zero elsewhere).
Eigen::VectorXd monomial_weights(const DiscreteMeasure& mu, const DyadicGrid& g, const Cube& q, const MultiIndex& beta) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mu.leaf_count());
  IPoint a, b;
  g.clipped_range(q, a, b);
  const Point c = centre(g, q);
  const double l = g.side(q);
  const int n = mu.n();
  const bool constant = beta[0] == 0 && beta[1] == 0;
  for (int64_t i = a[0]; i < b[0]; ++i)
    for (int64_t j = a[1]; j < b[1]; ++j) {
      const IPoint leaf{i, n == 2 ? j : 0};
      const int64_t k = mu.leaf_index(leaf);
      w(k) = constant ? mu.leaf_mass(k) : monomial_moment(mu, Cube{g.max_depth(), leaf, 1}, beta, c, l);
    }
  return w;
}

// Orthonormal polynomial basis on q in L2(mu restricted to q), columns over the monomial set.
Eigen::MatrixXd cube_poly_basis(const DiscreteMeasure& mu, const DyadicGrid& g, const Cube& q, const MonomialSet& set) {
  const int P = set.size();
  Eigen::MatrixXd G(P, P);
  const Point c = centre(g, q);
  const double l = g.side(q);
  for (int i = 0; i < P; ++i)
    for (int j = i; j < P; ++j) {
      G(i, j) = monomial_moment(mu, q, {set[i][0] + set[j][0], set[i][1] + set[j][1]}, c, l);
      G(j, i) = G(i, j);
    }
  return metric_gram_schmidt(G, Eigen::MatrixXd::Identity(P, P), 1e-8).Q;
}

void restrict_to(std::vector<double>& v, const DiscreteMeasure& mu, const IPoint& lo, const IPoint& hi) {
  for (int64_t k = 0; k < mu.leaf_count(); ++k) {
    const IPoint c = mu.leaf_coords(k);
    bool in = true;
    for (int a = 0; a < mu.n(); ++a) in = in && c[a] >= lo[a] && c[a] < hi[a];
    if (!in) v[k] = 0.0;
  }
}

double full_norm(const AlpertSystem& sys, const std::vector<double>& values, double s) {
  const LeafFunction f = LeafFunction::from_values(sys.n(), sys.max_depth(), values);
  return norm_dyadic(sys.analyze(f), s).full();
}

}  // namespace

OperatorSetup make_operator(const KernelSpec& k, const DiscreteMeasure& sigma, const DiscreteMeasure& omega, Exec ex) {
  if (sigma.n() != omega.n() || sigma.depth() != omega.depth())
    fail(ErrorKind::invalid_argument, "operator: sigma and omega live on different meshes");
  OperatorSetup op;
  op.sigma = &sigma;
  op.omega = &omega;
  op.kernel = resolve_kernel(k, sigma.n(), sigma.depth());
  if (op.kernel.delta < 2.0 * sigma.leaf_side() * (1.0 - 1e-12))
    fail(ErrorKind::resolution, "operator: truncation radius below two leaf sides");
  op.K = kernel_matrix(op.kernel, sigma, ex);
  return op;
}

std::vector<double> apply_operator(const OperatorSetup& op, const LeafFunction& f, Exec ex) {
  const Eigen::VectorXd w = leaf_moments(*op.sigma, 1, f).row(0).transpose();
  const Eigen::VectorXd g = matvec(op.K, w, ex);
  return std::vector<double>(g.data(), g.data() + g.size());
}

std::vector<double> apply_adjoint(const OperatorSetup& op, const LeafFunction& g, Exec ex) {
  const Eigen::VectorXd w = leaf_moments(*op.omega, 1, g).row(0).transpose();
  const Eigen::MatrixXd Kt = op.K.transpose();
  const Eigen::VectorXd r = matvec(Kt, w, ex);
  return std::vector<double>(r.data(), r.data() + r.size());
}

Eigen::MatrixXd leaf_integrals(const AlpertSystem& sys) {
  const DiscreteMeasure& mu = sys.measure();
  Eigen::MatrixXd W(mu.leaf_count(), sys.dimension());
#pragma omp parallel for schedule(dynamic, 8)
  for (int64_t k = 0; k < sys.dimension(); ++k) W.col(k) = leaf_moments(mu, 1, sys.element(k)).row(0).transpose();
  return W;
}

Eigen::MatrixXd assemble_matrix(const OperatorSetup& op, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega) {
  if (&sys_sigma.measure() != op.sigma || &sys_omega.measure() != op.omega)
    fail(ErrorKind::invalid_argument, "assemble: systems built on other measures");
  const Eigen::MatrixXd Ws = leaf_integrals(sys_sigma);
  const Eigen::MatrixXd Wo = leaf_integrals(sys_omega);
  return Wo.transpose() * (op.K * Ws);
}

Eigen::MatrixXd scale_matrix(const Eigen::MatrixXd& M, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega,
                             double s) {
  const double N = static_cast<double>(sys_sigma.grid().leaves_per_axis());
  Eigen::MatrixXd S = M;
  for (Eigen::Index j = 0; j < M.rows(); ++j) S.row(j) *= std::pow(sys_omega.entry_side(j) / N, -s);
  for (Eigen::Index i = 0; i < M.cols(); ++i) S.col(i) *= std::pow(sys_sigma.entry_side(i) / N, s);
  return S;
}

ConstantReport operator_norm(const Eigen::MatrixXd& M, PowerOptions opt) {
  ConstantReport r;
  r.witness = "top singular pair";
  const Eigen::Index c = M.cols();
  if (c == 0 || M.rows() == 0 || M.cwiseAbs().maxCoeff() == 0.0) {
    r.value = 0.0;
    r.right = Eigen::VectorXd::Zero(c);
    r.left = Eigen::VectorXd::Zero(M.rows());
    return r;
  }
  // Deterministic start with no special symmetry.
  Eigen::VectorXd v(c);
  for (Eigen::Index i = 0; i < c; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 0.7 * static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  r.converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Eigen::VectorXd w = M * v;
    const Eigen::VectorXd z = M.transpose() * w;
    lambda = v.dot(z);
    const double res = (z - lambda * v).norm();
    r.iterations = it;
    const double zn = z.norm();
    if (zn == 0.0) break;
    if (res <= opt.tol * lambda) {
      r.converged = true;
      break;
    }
    v = z / zn;
  }
  r.value = std::sqrt(std::max(lambda, 0.0));
  r.right = v;
  r.left = r.value > 0.0 ? Eigen::VectorXd(M * v / r.value) : Eigen::VectorXd::Zero(M.rows());
  if (!r.converged) r.note = "power iteration hit the iteration cap";
  return r;
}

std::vector<DyadicGrid> one_third_ensemble(int n, int depth) {
  const int64_t N = int64_t{1} << depth;
  std::vector<DyadicGrid> out;
  for (int j0 = 0; j0 < 3; ++j0)
    for (int j1 = 0; j1 < (n == 2 ? 3 : 1); ++j1) out.emplace_back(n, depth, IPoint{j0 * N / 3, n == 2 ? j1 * N / 3 : 0});
  return out;
}

const char* to_string(TestingMode m) {
  switch (m) {
    case TestingMode::cube: return "cube";
    case TestingMode::triple: return "triple";
    case TestingMode::global: return "global";
  }
  return "?";
}

TestingMode parse_testing_mode(const std::string& s) {
  if (s == "cube") return TestingMode::cube;
  if (s == "triple") return TestingMode::triple;
  if (s == "global") return TestingMode::global;
  fail(ErrorKind::invalid_argument, "unknown testing mode '" + s + "'");
}

double testing_value(const OperatorSetup& op, const AlpertSystem& target, const DyadicGrid& g, const Cube& q,
                     const MultiIndex& beta, double s, TestingMode mode, bool dual, const AlpertSystem* source) {
  const DiscreteMeasure& src = dual ? *op.omega : *op.sigma;
  const double so = dual ? -s : s;
  const double mass = src.cube_mass(q);
  if (!(mass > 0.0)) return 0.0;
  const Eigen::VectorXd w = monomial_weights(src, g, q, beta);
  Eigen::VectorXd out = dual ? Eigen::VectorXd(op.K.transpose() * w) : Eigen::VectorXd(op.K * w);
  std::vector<double> vals(out.data(), out.data() + out.size());
  if (mode == TestingMode::cube) {
    restrict_to(vals, src, q.lo, {q.lo[0] + q.size, q.lo[1] + q.size});
  } else if (mode == TestingMode::triple) {
    restrict_to(vals, src, {q.lo[0] - q.size, q.lo[1] - q.size}, {q.lo[0] + 2 * q.size, q.lo[1] + 2 * q.size});
  }
  if (!source) return std::pow(g.side(q), so) * full_norm(target, vals, so) / std::sqrt(mass);
  // Normalise by the actual norm of the test function, so the value is a feasible ratio for the operator norm.
  const Point c = g.center(q);
  const double l = g.side(q);
  auto test = [&](const Point& x) {
    return std::pow((x[0] - c[0]) / l, beta[0]) * (src.n() == 2 ? std::pow((x[1] - c[1]) / l, beta[1]) : 1.0);
  };
  IPoint a, b;
  g.clipped_range(q, a, b);
  const Eigen::MatrixXd F = leaf_moments(src, source->kappa(), test, source->kappa() + 2, a, b);
  const double den = norm_dyadic(source->analyze(F), so).full();
  return den > 0.0 ? full_norm(target, vals, so) / den : 0.0;
}

ConstantReport testing_constant(const OperatorSetup& op, const AlpertSystem& target,
                                const std::vector<DyadicGrid>& ensemble, double s, int kappa, TestingMode mode,
                                bool dual, int min_depth, const AlpertSystem* source) {
  const MonomialSet set(op.sigma->n(), kappa);
  struct Item {
    size_t grid;
    Cube q;
    int beta;
  };
  std::vector<Item> items;
  int skipped = 0;
  const DiscreteMeasure& src = dual ? *op.omega : *op.sigma;
  for (size_t gi = 0; gi < ensemble.size(); ++gi) {
    const DyadicGrid& g = ensemble[gi];
    for (int d = std::max(min_depth, 0); d <= g.max_depth(); ++d)
      for (int64_t k = 0; k < g.cubes_at(d); ++k) {
        const Cube q = g.from_local(d, k);
        if (g.protrudes(q)) continue;
        if (!(src.cube_mass(q) > 0.0)) {
          ++skipped;
          continue;
        }
        for (int b = 0; b < set.size(); ++b) items.push_back({gi, q, b});
      }
  }
  std::vector<double> vals(items.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (int64_t t = 0; t < static_cast<int64_t>(items.size()); ++t) {
    const Item& it = items[t];
    vals[t] = testing_value(op, target, ensemble[it.grid], it.q, set[it.beta], s, mode, dual, source);
  }
  ConstantReport r;
  size_t best = 0;
  for (size_t t = 0; t < vals.size(); ++t)
    if (vals[t] > r.value) {
      r.value = vals[t];
      best = t;
    }
  if (!items.empty()) {
    const Item& it = items[best];
    char buf[64];
    std::snprintf(buf, sizeof buf, " beta (%d,%d)", set[it.beta][0], set[it.beta][1]);
    r.witness = cube_label(ensemble[it.grid], it.q) + buf;
  }
  if (skipped > 0) r.note = std::to_string(skipped) + " zero-mass cubes skipped";
  return r;
}

ConstantReport wbp_constant(const OperatorSetup& op, const std::vector<DyadicGrid>& ensemble, double s, int kappa,
                            int max_gap) {
  const DiscreteMeasure& sg = *op.sigma;
  const DiscreteMeasure& om = *op.omega;
  const int n = sg.n();
  const MonomialSet set(n, kappa);
  ConstantReport r;
  struct Best {
    double v = 0.0;
    std::string w;
  };
  for (const DyadicGrid& g : ensemble) {
    // Per-cube data: G = K Phi (source side) and Psi (target side).
    std::vector<Cube> cubes;
    for (int d = 0; d <= g.max_depth(); ++d)
      for (int64_t k = 0; k < g.cubes_at(d); ++k) {
        const Cube q = g.from_local(d, k);
        if (!g.protrudes(q)) cubes.push_back(q);
      }
    const int64_t C = static_cast<int64_t>(cubes.size());
    std::vector<Eigen::MatrixXd> G(C), Psi(C);
    std::vector<double> ms(C), mo(C);
#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t t = 0; t < C; ++t) {
      const Cube& q = cubes[t];
      ms[t] = sg.cube_mass(q);
      mo[t] = om.cube_mass(q);
      const Eigen::MatrixXd Bs = ms[t] > 0 ? cube_poly_basis(sg, g, q, set) : Eigen::MatrixXd(set.size(), 0);
      const Eigen::MatrixXd Bo = mo[t] > 0 ? cube_poly_basis(om, g, q, set) : Eigen::MatrixXd(set.size(), 0);
      Eigen::MatrixXd Ws(sg.leaf_count(), set.size()), Wo(om.leaf_count(), set.size());
      for (int b = 0; b < set.size(); ++b) {
        Ws.col(b) = monomial_weights(sg, g, q, set[b]);
        Wo.col(b) = monomial_weights(om, g, q, set[b]);
      }
      G[t] = op.K * (Ws * Bs);
      Psi[t] = Wo * Bo;
    }
    auto index_of = [&](const Cube& q) -> int64_t {
      for (int64_t t = 0; t < C; ++t)
        if (cubes[t] == q) return t;
      return -1;
    };
    std::vector<std::pair<int64_t, int64_t>> pairs;  // (source, target)
    for (int64_t t = 0; t < C; ++t) {
      const Cube& q = cubes[t];
      for (int d = std::max(0, q.depth - max_gap); d <= q.depth; ++d) {
        const Cube A = g.ancestor(q, q.depth - d);
        const IPoint ca = g.coords(A);
        for (int o0 = -1; o0 <= 1; ++o0)
          for (int o1 = (n == 2 ? -1 : 0); o1 <= (n == 2 ? 1 : 0); ++o1) {
            if (o0 == 0 && o1 == 0) continue;
            const Cube nb = g.cube_at(d, {ca[0] + o0, ca[1] + o1});
            if (!g.intersects_box(nb) || g.protrudes(nb)) continue;
            const int64_t u = index_of(nb);
            if (u < 0) continue;
            pairs.emplace_back(t, u);
            pairs.emplace_back(u, t);
          }
      }
    }
    std::vector<double> vals(pairs.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t p = 0; p < static_cast<int64_t>(pairs.size()); ++p) {
      const auto [a, b] = pairs[p];
      if (G[a].cols() == 0 || Psi[b].cols() == 0) continue;
      const Eigen::MatrixXd B = G[a].transpose() * Psi[b];
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
      vals[p] = std::pow(g.side(cubes[a]), s) * std::pow(g.side(cubes[b]), -s) * svd.singularValues()(0);
    }
    for (size_t p = 0; p < pairs.size(); ++p)
      if (vals[p] > r.value) {
        r.value = vals[p];
        r.witness = "source " + cube_label(g, cubes[pairs[p].first]) + " target " + cube_label(g, cubes[pairs[p].second]);
      }
  }
  return r;
}

FormSplit form_split(const Eigen::MatrixXd& M, const AlpertSystem& sys_sigma, const AlpertSystem& sys_omega,
                     const Eigen::VectorXd& f, const Eigen::VectorXd& g, int rho, double eps) {
  const int n = sys_sigma.n();
  const GoodnessParams p{rho, eps};
  FormSplit out;
  const auto& Ei = sys_sigma.entries();
  const auto& Ej = sys_omega.entries();
  for (Eigen::Index j = 0; j < M.rows(); ++j) {
    if (g(j) == 0.0) continue;
    for (Eigen::Index i = 0; i < M.cols(); ++i) {
      if (f(i) == 0.0) continue;
      const double v = g(j) * M(j, i) * f(i);
      if (Ej[j].coarse || Ei[i].coarse) {
        out.coarse += v;
        continue;
      }
      const Cube J = sys_omega.basis(Ej[j].depth, Ej[j].local).cube;
      const Cube I = sys_sigma.basis(Ei[i].depth, Ei[i].local).cube;
      const Relation rel = relation(J, I, n);
      const int gap = std::abs(J.depth - I.depth);
      if (is_deeply_embedded(J, I, p, n)) {
        out.below += v;
      } else if (is_deeply_embedded(I, J, p, n)) {
        out.above += v;
      } else if ((rel == Relation::touch || rel == Relation::separated) && gap > rho) {
        out.disjoint += v;
      } else if (gap <= rho) {
        out.comparable += v;
      } else {
        out.residual += v;
      }
    }
  }
  return out;
}

}  // namespace sobolab
