#include "sobolab/corona.hpp"

#include <cmath>
#include <cstdio>
#include <deque>

namespace sobolab {

int CoronaForest::generations() const {
  int g = 0;
  for (const auto& nd : nodes) g = std::max(g, nd.generation);
  return g + 1;
}

void CoronaForest::write(std::ostream& out) const {
  for (const auto& nd : nodes) {
    const IPoint c = grid.coords(nd.cube);
    out << nd.cube.depth << ' ' << c[0];
    if (grid.n() == 2) out << ' ' << c[1];
    out << ' ' << nd.generation << ' ' << nd.parent << '\n';
  }
}

CoronaForest build_corona(const DiscreteMeasure& sigma, const DiscreteMeasure& omega, double gamma, int kappa,
                          double alpha, const Cube* root) {
  if (!(gamma >= 0.0)) fail(ErrorKind::invalid_argument, "corona: gamma must be nonnegative");
  const int n = sigma.n(), D = sigma.depth();
  CoronaForest f;
  f.grid = DyadicGrid(n, D);
  f.gamma = gamma;
  f.kappa = kappa;
  f.alpha = alpha;
  const DyadicGrid& g = f.grid;
  f.nodes.push_back({root ? *root : g.root(), 0, -1, {}});
  std::deque<int> work{0};
  while (!work.empty()) {
    const int id = work.front();
    work.pop_front();
    const Cube F = f.nodes[id].cube;
    const Region reg = Region::inside(F);
    // Breadth-first over strict subcubes; a stopping cube ends its branch.
    std::deque<Cube> bfs;
    if (F.depth < D - 1)
      for (const Cube& c : g.children(F)) bfs.push_back(c);
    while (!bfs.empty()) {
      const Cube R = bfs.front();
      bfs.pop_front();
      const double P = poisson_integral(g, R, sigma, kappa, alpha, reg);
      if (P * P * omega.cube_mass(R) >= gamma * sigma.cube_mass(R)) {
        const int cid = static_cast<int>(f.nodes.size());
        f.nodes.push_back({R, f.nodes[id].generation + 1, id, {}});
        f.nodes[id].children.push_back(cid);
        work.push_back(cid);
      } else if (R.depth < D - 1) {
        for (const Cube& c : g.children(R)) bfs.push_back(c);
      }
    }
  }
  // Corona assignment, top-down.
  f.assign.assign(D + 1, {});
  for (int d = 0; d <= D; ++d) f.assign[d].assign(static_cast<size_t>(g.cubes_at(d)), -1);
  std::vector<std::vector<int>> stop(D + 1);
  for (int d = 0; d <= D; ++d) stop[d].assign(static_cast<size_t>(g.cubes_at(d)), -1);
  for (size_t i = 0; i < f.nodes.size(); ++i) stop[f.nodes[i].cube.depth][g.local_index(f.nodes[i].cube)] = static_cast<int>(i);
  const Cube& r0 = f.nodes[0].cube;
  for (int d = r0.depth; d <= D; ++d)
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const Cube q = g.from_local(d, k);
      if (!contains(r0, q, n)) continue;
      if (stop[d][k] >= 0) {
        f.assign[d][k] = stop[d][k];
      } else {
        f.assign[d][k] = f.assign[d - 1][g.local_index(g.parent(q))];
      }
    }
  return f;
}

ConstantReport carleson_constant(const CoronaForest& forest, const DiscreteMeasure& sigma, double eps) {
  ConstantReport r;
  const auto& nodes = forest.nodes;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double mi = sigma.cube_mass(nodes[i].cube);
    if (!(mi > 0.0)) continue;
    double s = 0.0;
    std::vector<int> stack{static_cast<int>(i)};
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      s += std::pow(2.0, eps * (nodes[j].cube.depth - nodes[i].cube.depth)) * sigma.cube_mass(nodes[j].cube);
      for (int c : nodes[j].children) stack.push_back(c);
    }
    if (s / mi > r.value) {
      r.value = s / mi;
      char buf[96];
      std::snprintf(buf, sizeof buf, "node %zu depth %d generation %d", i, nodes[i].cube.depth, nodes[i].generation);
      r.witness = buf;
    }
  }
  return r;
}

double pivotal_control_max(const CoronaForest& forest, const DiscreteMeasure& sigma, const DiscreteMeasure& omega) {
  const DyadicGrid& g = forest.grid;
  const int D = g.max_depth();
  double worst = 0.0;
  for (int d = 0; d < D; ++d)
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const int owner = forest.assign[d][k];
      if (owner < 0) continue;
      const Cube I = g.from_local(d, k);
      const Cube& F = forest.nodes[owner].cube;
      if (I == F) continue;
      const double ms = sigma.cube_mass(I);
      if (!(ms > 0.0)) continue;
      const double P = poisson_integral(g, I, sigma, forest.kappa, forest.alpha, Region::inside(F));
      worst = std::max(worst, P * P * omega.cube_mass(I) / (forest.gamma * ms));
    }
  return worst;
}

double quasiorthogonality_ratio(const CoronaForest& forest, const std::vector<std::vector<double>>& ensemble, double s,
                                int kappa, const DiscreteMeasure& mu) {
  const AlpertSystem sys(mu, forest.grid, kappa);
  std::vector<double> ratios(ensemble.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int64_t e = 0; e < static_cast<int64_t>(ensemble.size()); ++e) {
    const LeafFunction f = LeafFunction::from_values(mu.n(), mu.depth(), ensemble[e]);
    const WaveletCoefficients c = sys.analyze(f);
    const double den = norm_dyadic(c, s).full();
    if (!(den > 0.0)) continue;
    double num = 0.0;
    for (const auto& nd : forest.nodes) {
      const Cube& F = nd.cube;
      const int64_t loc = forest.grid.local_index(F);
      const Eigen::VectorXd mom = c.moments[F.depth - sys.top_depth()].col(loc);
      num += side_weight(forest.grid, F.depth, s) * (sys.basis(F).B.transpose() * mom).squaredNorm();
    }
    ratios[e] = num / (den * den);
  }
  double mx = 0.0;
  for (double v : ratios) mx = std::max(mx, v);
  return mx;
}

ShiftedCorona shifted_corona_assign(const CoronaForest& forest, int tau) {
  if (tau < 1) fail(ErrorKind::invalid_argument, "shifted corona: tau must be >= 1");
  const DyadicGrid& g = forest.grid;
  const int D = g.max_depth();
  ShiftedCorona sc;
  sc.tau = tau;
  sc.members.assign(D + 1, {});
  for (int d = 0; d <= D; ++d) sc.members[d].assign(static_cast<size_t>(g.cubes_at(d)), {});
  for (int d = 0; d <= D; ++d)
    for (int64_t k = 0; k < g.cubes_at(d); ++k) {
      const int owner = forest.assign[d][k];
      if (owner < 0) continue;
      auto& m = sc.members[d][k];
      // C_F minus the top tau levels of F.
      if (d - forest.nodes[owner].cube.depth >= tau) m.push_back(owner);
      // Top tau levels of stopping children F' whose parent is at least tau levels up.
      const Cube J = g.from_local(d, k);
      for (int up = 0; up < tau && d - up >= 0; ++up) {
        const Cube A = g.ancestor(J, up);
        const int id = forest.assign[A.depth][g.local_index(A)];
        if (id <= 0 || forest.nodes[id].cube != A) continue;
        const int parent = forest.nodes[id].parent;
        if (d - forest.nodes[parent].cube.depth >= tau) m.push_back(parent);
      }
      sc.max_overlap = std::max(sc.max_overlap, static_cast<int>(m.size()));
    }
  return sc;
}

}  // namespace sobolab
