#pragma once

#include "mobmech/mechanism.hpp"
#include "mobmech/verify.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace mobmech::cli {

enum class Format { kJson, kTable };

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitInputError = 2,
};

struct CommandOptions {
  Format format = Format::kJson;
  /// Overrides the lp, mechanism and verify tolerances together; takes
  /// precedence over a tolerance stored in the scenario file.
  std::optional<double> tolerance;
  std::size_t jobs = 1;
  bool timing = false;
  /// Multiplies every payment after pricing. Anything other than 1 is a
  /// mutation for exercising the verifier.
  double payment_scale = 1.0;
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;       // report, for stdout or --out
  std::string diagnostics;  // warnings and errors, for stderr
};

CommandResult cmd_solve(const std::string& scenario_path, const CommandOptions& options);
CommandResult cmd_price(const std::string& scenario_path, std::size_t realized,
                        const CommandOptions& options);
CommandResult cmd_verify(const std::string& scenario_path, const CommandOptions& options);

struct GenOptions {
  std::size_t travelers = 0;
  std::size_t services = 0;
  std::size_t scenarios = 1;
  std::uint64_t seed = 0;
  std::optional<std::string> config_path;  // defaults to the compiled-in corpus config
};
CommandResult cmd_gen(const GenOptions& options);

}  // namespace mobmech::cli
