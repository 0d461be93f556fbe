#include "mobmech/cli/commands.hpp"

#include "mobmech/cli/generator.hpp"
#include "mobmech/cli/report.hpp"
#include "mobmech/cli/scenario_io.hpp"

#include <chrono>
#include <exception>
#include <functional>
#include <sstream>

namespace mobmech::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Loaded {
  ScenarioDocument doc;
  MechanismOptions mechanism;
  double tolerance = 0.0;
};

Loaded load(const std::string& path, const CommandOptions& options) {
  Loaded out{parse_scenario(path), {}, 0.0};
  const std::optional<double> tol = options.tolerance ? options.tolerance : out.doc.tolerance;
  if (tol) {
    if (!(*tol > 0.0)) throw PreconditionError("tolerance must be positive");
    out.mechanism.tolerance = *tol;
    out.mechanism.lp.tolerance = *tol;
  }
  out.tolerance = out.mechanism.tolerance;
  return out;
}

ReportHeader header_for(const std::string& command, const Loaded& loaded) {
  ReportHeader h;
  h.command = command;
  h.name = loaded.doc.instance.name;
  h.digest = loaded.doc.digest;
  h.travelers = loaded.doc.instance.travelers();
  h.services = loaded.doc.instance.services();
  h.scenarios = loaded.doc.instance.scenario_count();
  h.tolerance = loaded.tolerance;
  h.warnings = loaded.doc.warnings;
  return h;
}

std::string warning_lines(const std::vector<Issue>& warnings) {
  std::string out;
  for (const auto& w : warnings) out += "warning: " + w.path + ": " + w.message + "\n";
  return out;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string render(const ReportHeader& header, const ReportBody& body, Format format) {
  return format == Format::kJson ? render_json(header, body) : render_table(header, body);
}

// Maps every library error to the input-error exit status so that no input,
// however malformed, escapes as an unhandled exception.
CommandResult guarded(const std::function<CommandResult()>& run) {
  try {
    return run();
  } catch (const std::exception& e) {
    CommandResult result;
    result.exit_code = kExitInputError;
    result.diagnostics = std::string("error: ") + e.what() + "\n";
    return result;
  }
}

}  // namespace

CommandResult cmd_solve(const std::string& scenario_path, const CommandOptions& options) {
  return guarded([&] {
    const auto start = Clock::now();
    const Loaded loaded = load(scenario_path, options);
    const auto parsed = Clock::now();
    const Mechanism mechanism(loaded.doc.instance, loaded.mechanism);

    ReportHeader header = header_for("solve", loaded);
    if (options.timing) {
      header.timing = {{"parse", std::chrono::duration<double, std::milli>(parsed - start).count()},
                       {"offline", elapsed_ms(parsed)}};
    }
    ReportBody body;
    body.tables = &mechanism.tables();
    return CommandResult{kExitOk, render(header, body, options.format),
                         warning_lines(loaded.doc.warnings)};
  });
}

CommandResult cmd_price(const std::string& scenario_path, std::size_t realized,
                        const CommandOptions& options) {
  return guarded([&] {
    const auto start = Clock::now();
    const Loaded loaded = load(scenario_path, options);
    if (realized >= loaded.doc.instance.scenario_count()) {
      throw PreconditionError("--realized " + std::to_string(realized) + " is out of range; the file has " +
                              std::to_string(loaded.doc.instance.scenario_count()) + " scenarios");
    }
    const auto parsed = Clock::now();
    const Mechanism mechanism(loaded.doc.instance, loaded.mechanism);
    const auto offline = Clock::now();
    PricingOutcome outcome = mechanism.price_scenario(realized);
    if (options.payment_scale != 1.0) {
      outcome.payments *= options.payment_scale;
      for (Eigen::Index i = 0; i < outcome.utilities.size(); ++i) {
        outcome.utilities(i) =
            utility(outcome.realized.values.row(i).transpose(),
                    outcome.final_assignment.row(i).transpose(), outcome.payments(i));
      }
    }

    ReportHeader header = header_for("price", loaded);
    if (options.timing) {
      header.timing = {{"parse", std::chrono::duration<double, std::milli>(parsed - start).count()},
                       {"offline", std::chrono::duration<double, std::milli>(offline - parsed).count()},
                       {"online", elapsed_ms(offline)}};
    }
    ReportBody body;
    body.tables = &mechanism.tables();
    body.outcome = &outcome;
    return CommandResult{kExitOk, render(header, body, options.format),
                         warning_lines(loaded.doc.warnings)};
  });
}

CommandResult cmd_verify(const std::string& scenario_path, const CommandOptions& options) {
  return guarded([&] {
    const auto start = Clock::now();
    const Loaded loaded = load(scenario_path, options);
    const auto parsed = Clock::now();
    const Mechanism mechanism(loaded.doc.instance, loaded.mechanism);
    const auto offline = Clock::now();
    const verify::SuiteResult suite =
        verify::run_suite(mechanism, loaded.tolerance, options.payment_scale, options.jobs);

    ReportHeader header = header_for("verify", loaded);
    if (options.timing) {
      header.timing = {{"parse", std::chrono::duration<double, std::milli>(parsed - start).count()},
                       {"offline", std::chrono::duration<double, std::milli>(offline - parsed).count()},
                       {"verify", elapsed_ms(offline)}};
    }
    ReportBody body;
    body.tables = &mechanism.tables();
    body.scenario_outcomes = &suite.outcomes;
    body.properties = &suite.reports;

    CommandResult result;
    result.output = render(header, body, options.format);
    result.diagnostics = warning_lines(loaded.doc.warnings);
    result.exit_code = suite.passed() ? kExitOk : kExitPropertyFailure;
    for (const auto& r : suite.reports) {
      if (r.passed) continue;
      std::ostringstream line;
      line << "FAIL " << verify::to_string(r.property) << ": worst violation "
           << r.worst_violation << " > " << r.tolerance << " (witness";
      if (r.witness.traveler) line << " traveler=" << *r.witness.traveler;
      if (r.witness.scenario) line << " scenario=" << *r.witness.scenario;
      if (r.witness.misreport) line << " misreport=" << *r.witness.misreport;
      line << ")\n";
      result.diagnostics += line.str();
    }
    return result;
  });
}

CommandResult cmd_gen(const GenOptions& options) {
  return guarded([&] {
    const GeneratorConfig config = options.config_path ? load_generator_config(*options.config_path)
                                                       : default_generator_config();
    const MarketInstance instance = generate_instance(options.travelers, options.services,
                                                      options.scenarios, options.seed, config);
    CommandResult result;
    result.output = emit_scenario(instance);
    std::vector<Issue> issues = validate(instance);
    if (!is_valid(issues)) throw ConsistencyError("generator produced an invalid instance");
    result.diagnostics = warning_lines(issues);
    return result;
  });
}

}  // namespace mobmech::cli
