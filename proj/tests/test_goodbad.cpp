#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "sobolab/goodbad.hpp"

using namespace sobolab;

TEST_CASE("unit cube badness agrees with grid goodness") {
  Rng rng(5);
  for (int n : {1, 2})
    for (int t = 0; t < 400; ++t) {
      const int gap = 8;
      const IPoint sh{static_cast<int64_t>(rng.below(256)), n == 2 ? static_cast<int64_t>(rng.below(256)) : 0};
      const DyadicGrid g(n, gap, sh);
      const Cube J{gap, {0, 0}, 1};
      for (int r : {2, 3, 5})
        for (double eps : {0.25, 0.5}) CHECK(unit_cube_bad(n, sh, r, eps, gap) == !is_good(J, g, {r, eps}, 0));
    }
}

TEST_CASE("exact enumeration versus Monte Carlo") {
  const int gap = 7;
  for (double eps : {0.25, 0.5})
    for (int r : {2, 4, 6}) {
      int bad = 0;
      for (int64_t s = 0; s < 128; ++s) bad += unit_cube_bad(1, {s, 0}, r, eps, gap);
      const double exact = bad / 128.0;
      const BadProbability mc = bad_probability_mc(1, r, eps, gap, 20000, 11);
      const double se = std::sqrt(std::max(exact * (1 - exact), 1e-4) / 20000);
      CHECK(std::abs(mc.estimate() - exact) <= 5 * se);
      CHECK(mc.estimate() >= 0.0);
      CHECK(mc.estimate() <= 1.0);
    }
}

TEST_CASE("monotone in r and empty beyond the gap") {
  for (int64_t s = 0; s < 512; ++s)
    for (int r = 1; r < 9; ++r)
      CHECK((!unit_cube_bad(1, {s, 0}, r + 1, 0.5, 9) || unit_cube_bad(1, {s, 0}, r, 0.5, 9)));
  CHECK(bad_probability_mc(2, 9, 0.5, 8, 500, 1).bad == 0);
  CHECK_THROWS_AS(bad_probability_mc(1, 2, 0.0, 8, 10, 1), Error);
  CHECK_THROWS_AS(bad_probability_mc(1, 2, 0.5, 0, 10, 1), Error);
}

TEST_CASE("decay at eps = 1/2") {
  std::vector<double> x, y;
  for (int r = 2; r <= 8; ++r) {
    const BadProbability b = bad_probability_mc(1, r, 0.5, 20, 10000, 3);
    if (b.bad > 0) {
      x.push_back(r);
      y.push_back(std::log2(b.estimate()));
    }
  }
  REQUIRE(x.size() >= 3);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  CHECK(sxy / sxx <= -0.35);
}

TEST_CASE("determinism") {
  const BadProbability a = bad_probability_mc(2, 4, 0.3, 12, 3000, 99);
  const BadProbability b = bad_probability_mc(2, 4, 0.3, 12, 3000, 99);
  CHECK(a.bad == b.bad);
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 7);
  const auto f = th::random_values(128, 7);
  const auto r1 = bad_projection_norm_ratio(mu, f, 1, {0.0, 0.2}, {3, 0.5}, 8, 4);
  const auto r2 = bad_projection_norm_ratio(mu, f, 1, {0.0, 0.2}, {3, 0.5}, 8, 4);
  CHECK(r1 == r2);
}

TEST_CASE("good and bad projections") {
  const DiscreteMeasure mu = make_measure(MeasureSpec{}, 1, 7);
  const AlpertSystem sys(mu, DyadicGrid(1, 7, {37, 0}), 2);
  const auto f = th::random_values(128, 2);
  const WaveletCoefficients c = sys.analyze(LeafFunction::from_values(1, 7, f));
  const ProjectionSplit sp = split_good_bad(c, {2, 0.5});
  CHECK((sp.good + sp.bad - c.v).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sp.bad.squaredNorm() > 0.0);
  for (Eigen::Index i = 0; i < c.v.size(); ++i) CHECK((sp.good(i) == 0.0 || sp.bad(i) == 0.0));

  const auto r = bad_projection_norm_ratio(mu, f, 1, {-0.2, 0.0, 0.2}, {2, 0.5}, 16, 1);
  for (double v : r) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  // r beyond the depth: nothing is bad.
  for (double v : bad_projection_norm_ratio(mu, f, 1, {0.0}, {12, 0.5}, 4, 1)) CHECK(v == 0.0);
}
