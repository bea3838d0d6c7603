#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gnsforge/solver.hpp"

namespace gnsforge::cli {

using Json = nlohmann::ordered_json;

enum class Format { json, csv };

struct RunConfig {
  std::string command;
  Model model = Model::euclidean;
  int n = 3;
  Real m = 0;
  /// One entry except for sweep.
  std::vector<Real> ks{1};
  /// Defaults follow the model and branch when unset.
  std::optional<Domain> domain;
  std::size_t N = 4096;
  std::optional<Real> scale;
  unsigned seed = 1;
  std::string output_path;
  Format format = Format::json;
  Real tail_tol = kTailTol;
  int max_iters = SolverOptions{}.max_iters;
  bool warm_start = false;

  /// N must be a power of two in [2^6, 2^15].
  void validate() const;
  Domain resolved_domain() const;
  Real resolved_scale() const;
  SolverOptions solver_options() const;
};

/// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kParameter = 2,
  kDivergence = 3,
  kNonconvergence = 4,
  kVerification = 5,
};

int exit_code(ErrorKind kind);

struct CommandResult {
  int code = kOk;
  /// Serialized result (JSON document or CSV table).
  std::string body;
  std::vector<std::string> warnings;
};

/// The SMMS (M, g, 1^m dvol) selected by the config.
SMMS build_smms(const RunConfig& cfg);

Json config_json(const RunConfig& cfg);
Json grid_json(const RadialGrid& grid);

CommandResult cmd_constant(const RunConfig& cfg);
CommandResult cmd_extremal(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);

struct VerifyRow {
  std::string name;
  /// Residual on the finest refinement level; NaN when not measured.
  Real residual = 0;
  /// log2 of the residual ratio between the two finest levels, or NaN.
  Real order = 0;
  bool pass = false;
  std::string note;
};

/// Identity suite on the model of cfg, refined over three grids ending at
/// min(N/2, 2048). Below N = 2048 convergence rows are marked as
/// insufficient resolution and fail.
std::vector<VerifyRow> verify_suite(const RunConfig& cfg);

/// Parses argv, runs the command and writes its result to the output path
/// (atomically) or to out. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes data to path through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& data);

}  // namespace gnsforge::cli
