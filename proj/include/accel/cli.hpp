#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "accel/driver.hpp"

namespace accel::cli {

// Exit codes
constexpr int kOk = 0;
constexpr int kUsage = 1;      // bad flags, unreadable or malformed input
constexpr int kNoResult = 2;   // breakdown before any estimate; solve did not converge
constexpr int kAllFailed = 3;  // every bench row failed

enum class Format { csv, md };

struct ProblemSpec {
  std::string name = "linear";  // linear | pde | fredholm | pagerank
  std::size_t n = 200;          // linear, fredholm; pagerank synthetic nodes
  std::size_t grid = 80;        // pde
  double rho = 0.95;            // linear
  double lambda = 0.5;          // fredholm
  double alpha = 0.85;          // pagerank
  double degree = 8.0;          // pagerank synthetic average out-degree
  std::string graph;            // pagerank edge-list file (overrides synthetic)
  std::uint64_t seed = 42;
};

// Builds the problem and sets the stopping rule it is measured with:
// fredholm and pagerank relative to the iterate (pagerank in the 1-norm),
// linear and pde relative to the initial residual.
driver::FixedPointProblem build_problem(const ProblemSpec& spec, driver::CycleConfig& config);

struct BenchSpec {
  ProblemSpec problem;
  std::vector<std::string> methods;
  driver::CycleConfig config;
  Format format = Format::csv;
};

// One report per method, in order. Failed runs carry `error` and
// termination "error".
std::vector<driver::RunReport> run_bench(const BenchSpec& spec, int threads);

// Header plus one row per report, with a trailing status column.
std::string format_reports(const std::vector<driver::RunReport>& rows, Format format);

// ACCELERANT_THREADS if set to a positive integer, else the hardware count.
int thread_cap();

// Full command line (without the program name). Output goes to `out` unless
// --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace accel::cli
