#pragma once

#include "lorpl2/moments.hpp"
#include "lorpl2/real.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lorpl2::cli {

// Everything a subcommand may consult. Strings hold reals verbatim so that
// decimal input reaches quad precision without a detour through double.
struct RunConfig {
  std::string measure = "lebesgue";
  std::vector<std::string> rect{"1", "2", "1", "2"};
  std::string atoms;
  std::string table;
  int window = -1;  // -1: whatever the levels require
  int levels = 6;
  double tol_quad = 1e-28;
  double tol_rank = 1e-10;
  double tol_res = -1;  // -1: per-check defaults
  std::string out;
  std::vector<std::string> skip;

  std::string weight = "lebesgue";
  std::vector<std::string> interval{"1", "2"};
  std::string mu = "1";
  std::string kappa = "1";

  std::string points;
  int random = 200;
  std::uint64_t seed = 20240607;
};

struct Measure {
  ProviderPtr provider;
  // Present for separable measures on a rectangle.
  std::optional<std::pair<Weight1D, Weight1D>> factors;
  // Sampling box for random points.
  Real x0 = 1, x1 = 2, y0 = 1, y1 = 2;
};

Measure build_measure(const RunConfig& c, int window);

struct CheckResult {
  std::string name;
  std::string status;  // pass, fail, blocked, skipped
  Real margin = 0;
  Real tolerance = 0;
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;  // sorted by name
  bool ok() const;
};

VerificationReport run_verify(const RunConfig& c);

// Exit codes: 0 ok, 1 check failure, 2 usage, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lorpl2::cli
