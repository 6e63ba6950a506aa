#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlsurf/error.hpp"

namespace tlsurf::cli {

/// Resolved settings of one run.
struct RunConfig {
  std::string subcommand;  // analyze, invariants, canonical, reconstruct, solve-cosh-gordon, compare
  std::vector<std::string> inputs;  // positional input paths

  std::optional<std::array<double, 4>> domain;  // u_min, u_max, v_min, v_max
  std::optional<std::array<std::size_t, 2>> grid;
  std::optional<std::pair<double, double>> base;
  std::string branch = "+";
  bool apply = false;

  std::string invariants_path;  // reconstruct inputs
  std::string kh_path;
  std::string truth_path;
  std::string frames;  // compare: "fa.json,fb.json"
  std::string bu;      // solve-cosh-gordon boundary data
  std::string bv;

  std::string report_path;  // JSON report; stdout when empty
  std::string csv_path;
  std::string kh_out_path;
  std::string obj_path;
  std::string frame_out_path;
  std::string map_path;

  double canonical_tolerance = 1e-6;
  double cross_variation_tolerance = 1e-6;
  double drift_limit = 1e-3;
  double closure_limit = 1e-2;
  std::size_t reorthonormalize_every = 0;
  bool timings = false;

  /// Throws Error(InvalidInput) when a constraint fails.
  void validate() const;
};

/// Exit status for a library error.
int exit_code(ErrorCode code);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNotApplicable = 3;
inline constexpr int kExitNumerical = 4;

struct ParsedArgs {
  std::optional<RunConfig> config;  // empty when the parser already finished (help, error)
  int exit = 0;
};

/// Parses argv; help and usage errors are printed to `out` / `err`.
ParsedArgs parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Executes the run, writes artifacts and the JSON report, and returns the
/// exit status. Diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int main_entry(int argc, const char* const* argv);

}  // namespace tlsurf::cli
