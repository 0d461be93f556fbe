// mobmech: worst-case mobility mechanism from the command line.
//
//   mobmech solve  scenario.json
//   mobmech price  scenario.json --realized 1
//   mobmech verify scenario.json [--jobs 4]
//   mobmech gen    --travelers 3 --services 2 --scenarios 2 --seed 42 --out x.json
//
// Exit status: 0 all checks pass, 1 a property failed, 2 input or usage error.

#include "mobmech/cli/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

using namespace mobmech::cli;

int emit(const CommandResult& result, const std::string& out_path) {
  std::cerr << result.diagnostics;
  if (result.output.empty()) return result.exit_code;
  if (out_path.empty()) {
    std::cout << result.output;
    return result.exit_code;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << result.output;
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitInputError;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case mobility mechanism: solve, price, verify and generate scenarios"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MOBMECH_VERSION);

  CommandOptions options;
  std::string out_path;
  std::string format = "json";
  app.add_option("--format", format, "Output format: json or table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();
  app.add_option("--tolerance", options.tolerance, "Override every solver and check tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", options.jobs, "Worker threads for verify")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}))
      ->default_val(1);
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_flag("--timing", options.timing, "Include wall-clock timings in the report");
  app.fallthrough();

  std::string scenario;
  auto* solve = app.add_subcommand("solve", "Offline stage: nominal assignment and reservation payments");
  solve->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  std::size_t realized = 0;
  auto* price = app.add_subcommand("price", "Price one realized scenario");
  price->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  price->add_option("--realized", realized, "Index of the realized scenario")->required();
  price->add_option("--payment-scale", options.payment_scale,
                    "Multiply payments after pricing (mutation testing)");

  auto* check = app.add_subcommand("verify", "Check every property over every scenario and misreport");
  check->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  check->add_option("--payment-scale", options.payment_scale,
                    "Multiply payments after pricing (mutation testing)");

  GenOptions gen_options;
  std::string config_path;
  auto* gen = app.add_subcommand("gen", "Generate a seeded random scenario file");
  gen->add_option("--travelers", gen_options.travelers, "Traveler count")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--services", gen_options.services, "Service count")
      ->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--scenarios", gen_options.scenarios, "Scenario count")
      ->check(CLI::PositiveNumber)
      ->default_val(1);
  gen->add_option("--seed", gen_options.seed, "Random seed")->default_val(0);
  gen->add_option("--config", config_path, "Generator configuration file")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  options.format = format == "table" ? Format::kTable : Format::kJson;
  if (*solve) return emit(cmd_solve(scenario, options), out_path);
  if (*price) return emit(cmd_price(scenario, realized, options), out_path);
  if (*check) return emit(cmd_verify(scenario, options), out_path);
  if (!config_path.empty()) gen_options.config_path = config_path;
  return emit(cmd_gen(gen_options), out_path);
}
