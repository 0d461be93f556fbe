#pragma once

#include "mobmech/mechanism.hpp"
#include "mobmech/verify.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mobmech::cli {

struct ReportHeader {
  std::string command;
  std::string name;
  std::string digest;
  std::size_t travelers = 0;
  std::size_t services = 0;
  std::size_t scenarios = 0;
  double tolerance = 0.0;
  std::vector<Issue> warnings;
  /// Wall-clock milliseconds per stage; omitted from reports unless set.
  std::optional<std::vector<std::pair<std::string, double>>> timing;
};

/// What a report contains besides the header. Empty members are left out.
struct ReportBody {
  const MechanismTables* tables = nullptr;
  const PricingOutcome* outcome = nullptr;
  const std::vector<PricingOutcome>* scenario_outcomes = nullptr;
  const std::vector<verify::PropertyReport>* properties = nullptr;
};

/// Canonical machine-readable report. Identical inputs give identical bytes.
std::string render_json(const ReportHeader& header, const ReportBody& body);

/// Aligned-column summary for people.
std::string render_table(const ReportHeader& header, const ReportBody& body);

}  // namespace mobmech::cli
