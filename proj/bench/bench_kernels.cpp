#include <benchmark/benchmark.h>

#include "sobolab/kernels.hpp"

using namespace sobolab;

namespace {

DiscreteMeasure mesh(int depth) { return make_measure(MeasureSpec{}, 1, depth); }

KernelSpec kernel(int depth) { return resolve_kernel(KernelSpec{}, 1, depth); }

template <Exec ex>
void BM_kernel_matrix(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const DiscreteMeasure mu = mesh(d);
  const KernelSpec k = kernel(d);
  for (auto _ : st) benchmark::DoNotOptimize(kernel_matrix(k, mu, ex));
}

template <Exec ex>
void BM_matvec(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const DiscreteMeasure mu = mesh(d);
  const Eigen::MatrixXd K = kernel_matrix(kernel(d), mu);
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(K.cols(), -1.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(matvec(K, w, ex));
}

template <Exec ex>
void BM_continuous_weights(benchmark::State& st) {
  const DiscreteMeasure mu = mesh(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(continuous_weights(mu, 0.25, {}, ex));
}

}  // namespace

BENCHMARK(BM_kernel_matrix<Exec::serial>)->Arg(9)->Arg(11);
BENCHMARK(BM_kernel_matrix<Exec::parallel>)->Arg(9)->Arg(11);
BENCHMARK(BM_matvec<Exec::serial>)->Arg(9)->Arg(11);
BENCHMARK(BM_matvec<Exec::parallel>)->Arg(9)->Arg(11);
BENCHMARK(BM_continuous_weights<Exec::serial>)->Arg(7)->Arg(8);
BENCHMARK(BM_continuous_weights<Exec::parallel>)->Arg(7)->Arg(8);

BENCHMARK_MAIN();
