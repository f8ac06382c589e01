#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sobolab/kernels.hpp"
#include "sobolab/measure.hpp"

namespace sobolab {

enum class ExperimentKind { basis_checks, norm_equivalence, goodbad, constants, t1, corona, energy };
const char* to_string(ExperimentKind k);
// CSV file written by experiments of this kind.
const char* csv_name(ExperimentKind k);

// One entry of the `experiments` list. Fields a kind does not use keep their defaults.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::basis_checks;
  std::string name;
  int line = 0;
  int n = 1;
  int depth = 5;
  std::vector<int> kappa{1};
  std::vector<double> s{0.0};
  std::vector<MeasureSpec> measures{MeasureSpec{}};
  MeasureSpec sigma, omega;
  KernelSpec kernel;
  bool shifted = false;      // basis_checks: also check a one-third shifted grid
  int count = 50;            // ensemble size, sample count or triple count
  int trials = 1000;         // goodbad Monte Carlo trials per r
  std::vector<int> r{2, 3, 4};
  std::vector<double> eps{0.5};
  int depth_gap = 20;
  std::vector<double> gamma{2.0, 4.0, 8.0};
  std::vector<int> tau{1, 2, 3};
  double delta = 0.5;        // energy: Holder gain
  std::string mode = "global";
  std::string strategy = "dyadic_optimal";
  bool suite = false;        // t1: run the built-in suite instead of sigma/omega/kernel
};

struct RunConfig {
  std::optional<uint64_t> seed;
  std::optional<int> depth_cap;
  std::vector<ExperimentSpec> experiments;
};

// Errors carry ErrorKind::config and a "name:line: message" prefix.
RunConfig parse_config(const std::string& text, const std::string& source_name);
RunConfig load_config(const std::string& path);

}  // namespace sobolab
