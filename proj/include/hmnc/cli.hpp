#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmnc/assembly.hpp"
#include "hmnc/polyspace.hpp"
#include "hmnc/report.hpp"

namespace hmnc {

enum class Command { Unisolvency, Converge, Sweep };

struct RunConfig {
  Command command = Command::Converge;
  std::string problem = "triharmonic-square";
  Variant element = Variant::Standard;
  std::vector<int> levels{8, 16, 32, 64};
  std::optional<int> quad_degree;
  FormConvention convention = kDefaultConvention;
  std::optional<FormConvention> error_convention;
  std::string output;  ///< empty means stdout
  int threads = 1;
  ReportFormat format = ReportFormat::Table;
  std::string dump_mesh;  ///< optional path for the finest mesh

  // unisolvency
  std::vector<int> dims{1, 2, 3};
  int trials = 100;
  bool include_robust = true;
  std::uint64_t seed = 20240901;

  // robust case
  double b0 = 1.0;

  // sweep
  std::vector<double> epsilons{1.0, 1e-2, 1e-4};
  int sweep_level = 16;
};

/// Usage problems; `exit_code` is what the process should return.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code) : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

/// args excludes the program name. `--help` raises UsageError with code 0
/// and the help text as message.
RunConfig parse_args(const std::vector<std::string>& args);
RunConfig parse_args(int argc, const char* const* argv);

/// Executes the configured command, writes the report, returns the process
/// exit code (0 iff every requested check passes).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace hmnc
