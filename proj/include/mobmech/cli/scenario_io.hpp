#pragma once

#include "mobmech/errors.hpp"
#include "mobmech/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mobmech::cli {

/// The document is not well-formed JSON.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& detail);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The document is well-formed but does not describe a valid instance. Every
/// breach found is listed, not just the first.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& source, std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

struct ScenarioDocument {
  MarketInstance instance;
  std::optional<double> tolerance;
  std::vector<Issue> warnings;
  std::string digest;  // of the raw bytes, see input_digest
};

/// Parses a scenario document held in memory. `source` names it in messages.
ScenarioDocument parse_scenario_text(std::string_view text, const std::string& source = "<input>");

/// Reads and parses a scenario file. Throws Error when it cannot be read.
ScenarioDocument parse_scenario(const std::string& path);

/// Serializes an instance; parse_scenario_text(emit_scenario(x)) reproduces x
/// exactly. Numbers are written as shortest round-trip decimal strings.
std::string emit_scenario(const MarketInstance& instance,
                          std::optional<double> tolerance = std::nullopt);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_decimal(double value);

/// "fnv1a64:" followed by 16 lowercase hex digits.
std::string input_digest(std::string_view bytes);

std::string read_file(const std::string& path);

}  // namespace mobmech::cli
