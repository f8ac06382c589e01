#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sobolab/config.hpp"

namespace sobolab {

// One CSV record: experiment,case,quantity,value,check,detail.
// check is "pass", "fail", "error" or empty for plain measurements.
struct Row {
  std::string case_label;
  std::string quantity;
  double value = 0.0;
  std::string check;
  std::string detail;
};

struct ExperimentResult {
  std::vector<Row> rows;
  bool failed = false;  // a resolution, precondition or other error stopped it
  std::string error;
};

// Runs one experiment; library errors become a failure record instead of propagating.
ExperimentResult run_experiment(const ExperimentSpec& e, uint64_t seed, int depth_cap);

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> depth_cap;
  int jobs = 1;
};

constexpr uint64_t kDefaultSeed = 20240917;
constexpr int kDefaultDepthCap = 12;

// Exit status: 0 all experiments ran and every check passed, 1 some check failed,
// 2 invalid configuration or I/O problem, 3 an experiment hit an error.
int run(const RunOptions& opt, std::string* diagnostics = nullptr);

std::string format_double(double v);
std::string csv_field(const std::string& s);

}  // namespace sobolab
