#include <iostream>

#include <CLI11.hpp>

#include "sobolab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sobolab: dyadic Sobolev experiment runner"};
  sobolab::RunOptions opt;
  uint64_t seed = 0;
  int depth_cap = 0;
  app.add_option("--config", opt.config_path, "experiment config (YAML)")->required()->envname("SOBOLAB_CONFIG");
  app.add_option("--out", opt.out_dir, "output directory")->required()->envname("SOBOLAB_OUT");
  auto* so = app.add_option("--seed", seed, "master seed")->envname("SOBOLAB_SEED");
  app.add_option("--jobs", opt.jobs, "experiments run in parallel")->check(CLI::PositiveNumber)->envname("SOBOLAB_JOBS");
  auto* dc = app.add_option("--depth-cap", depth_cap, "largest accepted tree depth")
                 ->check(CLI::NonNegativeNumber)
                 ->envname("SOBOLAB_DEPTH_CAP");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (so->count()) opt.seed = seed;
  if (dc->count()) opt.depth_cap = depth_cap;
  std::string diag;
  const int rc = sobolab::run(opt, &diag);
  if (!diag.empty()) std::cerr << diag;
  return rc;
}
