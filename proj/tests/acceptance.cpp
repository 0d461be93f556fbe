// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
//
//   acceptance <path-to-mobmech-executable>

#include "mobmech/cli/commands.hpp"
#include "mobmech/cli/generator.hpp"
#include "mobmech/cli/scenario_io.hpp"
#include "mobmech/lp.hpp"
#include "mobmech/mechanism.hpp"
#include "mobmech/verify.hpp"
#include "support/instances.hpp"
#include "support/lp_oracle.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace mobmech;

namespace {

constexpr double kPropertyTol = 1e-6;   // normalized by MarketInstance::scale()
constexpr double kLpTol = 1e-9;         // objective match and duality gap, absolute
constexpr double kIdentityTol = 1e-6;   // absolute
constexpr double kRuntimeBudgetSeconds = 60.0;
constexpr std::size_t kRandomLps = 200;

struct Line {
  int number;
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Line> lines;

void report(int number, const std::string& name, bool passed, const std::string& detail) {
  lines.push_back({number, name, passed, detail});
  std::cout << (passed ? "PASS" : "FAIL") << "  [" << number << "] " << name << ": " << detail
            << std::endl;
}

std::string num(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

struct CorpusStats {
  double truthfulness = -1e300;
  double budget = -1e300;
  double participation = -1e300;  // worst of -u/scale
  double sustainability = -1e300;
  double identity = 0.0;
  std::size_t instances = 0;
  std::size_t misreports = 0;
  double seconds = 0.0;
  std::string error;
};

CorpusStats run_corpus() {
  CorpusStats stats;
  std::vector<MarketInstance> corpus = cli::generate_corpus(cli::default_generator_config());
  corpus.push_back(fixtures::reference_2x2());
  const auto start = std::chrono::steady_clock::now();
  try {
    for (const auto& in : corpus) {
      const Mechanism m(in);
      const auto suite = verify::run_suite(m, kPropertyTol);
      for (const auto& r : suite.reports) {
        switch (r.property) {
          case verify::Property::kTruthfulness:
            stats.truthfulness = std::max(stats.truthfulness, r.worst_violation);
            break;
          case verify::Property::kBudgetFairness:
            stats.budget = std::max(stats.budget, r.worst_violation);
            break;
          case verify::Property::kVoluntaryParticipation:
            stats.participation = std::max(stats.participation, r.worst_violation);
            break;
          case verify::Property::kSustainability:
            stats.sustainability = std::max(stats.sustainability, r.worst_violation);
            break;
          case verify::Property::kFeasibility:
            if (!r.passed) stats.error = "infeasible final assignment in " + in.name;
            break;
        }
      }
      const auto& t = m.tables();
      const Matrix gap = t.nominal.cwiseProduct(t.reservations) -
                         t.nominal.cwiseProduct(t.v_worst.values);
      stats.identity = std::max(stats.identity, gap.cwiseAbs().maxCoeff());
      stats.misreports += in.travelers() * in.scenario_count() * in.scenario_count();
      ++stats.instances;
    }
  } catch (const std::exception& e) {
    stats.error = e.what();
  }
  stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

lp::Problem fixture_problem(std::initializer_list<double> c,
                            std::initializer_list<std::initializer_list<double>> rows,
                            std::initializer_list<double> rhs) {
  auto p = lp::Problem::with_variables(c.size());
  p.objective = Eigen::Map<const Vector>(c.begin(), static_cast<Eigen::Index>(c.size()));
  auto b = rhs.begin();
  for (const auto& r : rows) {
    p.add_row(Eigen::Map<const Vector>(r.begin(), static_cast<Eigen::Index>(r.size())),
              lp::Relation::kLessEqual, *b++);
  }
  return p;
}

void criterion_lp() {
  std::size_t status_mismatch = 0;
  std::size_t optimal = 0;
  std::size_t compared = 0;
  double worst_objective = 0.0;
  double worst_gap = 0.0;
  // The first kRandomLps seeds are compared on status; seeds continue until
  // kRandomLps optimal instances have also been compared on objective.
  for (std::uint64_t seed = 0; compared < kRandomLps || seed < kRandomLps; ++seed) {
    const auto p = oracle::random_problem(seed);
    const auto expected = oracle::enumerate(p);
    const auto s = lp::solve(p);
    if (s.status != expected.status) ++status_mismatch;
    if (s.status == lp::Status::kOptimal) {
      ++optimal;
      worst_gap = std::max(worst_gap, std::abs(s.objective - lp::dual_objective(p, s.dual)));
      if (expected.status == lp::Status::kOptimal) {
        worst_objective = std::max(
            worst_objective, std::abs(s.objective - expected.objective.convert_to<double>()));
        ++compared;
      }
    }
  }

  const std::array<std::pair<const char*, lp::Problem>, 2> cycling = {{
      {"beale", fixture_problem({0.75, -20, 0.5, -6},
                                {{0.25, -8, -1, 9}, {0.5, -12, -0.5, 3}, {0, 0, 1, 0}}, {0, 0, 1})},
      {"marshall-suurballe",
       fixture_problem({2, 3, -1, -12},
                       {{-2, -9, 1, 9}, {1.0 / 3, 1, -1.0 / 3, -2}, {2, 3, -1, -12}}, {0, 0, 2})},
  }};
  const double cycling_optima[] = {1.25, 2.0};
  bool cycling_ok = true;
  std::string cycling_detail;
  for (std::size_t k = 0; k < cycling.size(); ++k) {
    const auto s = lp::solve(cycling[k].second);
    const bool ok = s.status == lp::Status::kOptimal &&
                    std::abs(s.objective - cycling_optima[k]) <= kLpTol;
    cycling_ok = cycling_ok && ok;
    cycling_detail += std::string(" ") + cycling[k].first + "=" + std::string(lp::to_string(s.status)) +
                      "/" + std::to_string(s.iterations) + "it";
  }

  const bool passed = status_mismatch == 0 && compared >= kRandomLps &&
                      worst_objective <= kLpTol && worst_gap <= kLpTol && cycling_ok;
  report(5, "lp oracle equivalence", passed,
         std::to_string(compared) + " optimal LPs vs rational vertex enumeration, status mismatches " +
             std::to_string(status_mismatch) + ", max |dz| " + num(worst_objective) +
             ", max duality gap " + num(worst_gap) + " over " + std::to_string(optimal) +
             " optimal results (tol " + num(kLpTol) + ");" + cycling_detail);
}

std::string run_tool(const std::string& tool, const std::string& args, int* status) {
  const std::string command = "\"" + tool + "\" " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buffer{};
  std::size_t n = 0;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) out.append(buffer.data(), n);
  const int raw = pclose(pipe);
  *status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

void criterion_determinism(const std::string& tool) {
  const std::string data = MOBMECH_TEST_DATA;
  std::vector<std::string> inputs = {data + "/reference_2x2.json", data + "/corrupted_payment.json",
                                     data + "/zero_budget.json"};
  const auto generated = std::filesystem::temp_directory_path() / "mobmech_acceptance_gen.json";
  {
    cli::GenOptions g;
    g.travelers = 4;
    g.services = 3;
    g.scenarios = 4;
    g.seed = 42;
    std::ofstream(generated, std::ios::binary) << cli::cmd_gen(g).output;
    inputs.push_back(generated.string());
  }

  std::size_t comparisons = 0;
  std::string mismatch;
  for (const auto& input : inputs) {
    for (const char* command : {"solve", "verify"}) {
      if (tool.empty()) {
        cli::CommandOptions o;
        const auto a = std::string(command) == "solve" ? cli::cmd_solve(input, o) : cli::cmd_verify(input, o);
        const auto b = std::string(command) == "solve" ? cli::cmd_solve(input, o) : cli::cmd_verify(input, o);
        if (a.output != b.output || a.output.empty()) mismatch = std::string(command) + " " + input;
      } else {
        int s1 = 0;
        int s2 = 0;
        const auto a = run_tool(tool, std::string(command) + " \"" + input + "\"", &s1);
        const auto b = run_tool(tool, std::string(command) + " \"" + input + "\"", &s2);
        if (a != b || a.empty() || s1 != s2) mismatch = std::string(command) + " " + input;
      }
      ++comparisons;
    }
  }
  report(7, "determinism", mismatch.empty(),
         std::to_string(comparisons) + " report pairs compared byte for byte via " +
             (tool.empty() ? std::string("in-process commands") : std::string("the executable")) +
             (mismatch.empty() ? "" : ", differs: " + mismatch));
}

void criterion_mutation() {
  const Mechanism m(fixtures::corrupted_payment());
  const auto honest = verify::run_suite(m, kPropertyTol);
  const auto broken = verify::run_suite(m, kPropertyTol, 0.5);
  const verify::PropertyReport* truth = nullptr;
  for (const auto& r : broken.reports) {
    if (r.property == verify::Property::kTruthfulness) truth = &r;
  }
  const bool witness = truth && truth->witness.traveler && truth->witness.scenario &&
                       truth->witness.misreport;
  const bool passed = honest.passed() && truth && !truth->passed && witness;
  std::string detail = "honest suite " + std::string(honest.passed() ? "passes" : "fails");
  if (truth) {
    detail += "; halved payments: truthfulness " + std::string(truth->passed ? "passes" : "fails") +
              " with normalized gain " + num(truth->worst_violation);
    if (witness) {
      detail += " (traveler " + std::to_string(*truth->witness.traveler) + ", true scenario " +
                std::to_string(*truth->witness.scenario) + ", misreport row from scenario " +
                std::to_string(*truth->witness.misreport) + ")";
    }
  }
  report(8, "mutation sensitivity", passed, detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string tool = argc > 1 ? argv[1] : "";

  const CorpusStats c = run_corpus();
  const std::string base = std::to_string(c.instances) + " instances";
  const bool clean = c.error.empty();
  report(1, "truthfulness", clean && c.truthfulness <= kPropertyTol && c.seconds < kRuntimeBudgetSeconds,
         base + ", " + std::to_string(c.misreports) + " (traveler, scenario, misreport) triples, max normalized gain " +
             num(c.truthfulness) + " (tol " + num(kPropertyTol) + "), full suite " + num(c.seconds) +
             " s" + (clean ? "" : ", error: " + c.error));
  report(2, "budget fairness", clean && c.budget <= kPropertyTol,
         base + ", max normalized p_i - b_i " + num(c.budget));
  report(3, "voluntary participation", clean && c.participation <= kPropertyTol,
         base + ", min normalized u_i " + num(-c.participation));
  report(4, "sustainability", clean && c.sustainability <= kPropertyTol,
         base + ", max normalized (objective - min revenue) " + num(c.sustainability));
  criterion_lp();
  report(6, "reservation identity on nominal support", clean && c.identity <= kIdentityTol,
         base + ", max |a r - a v_worst| " + num(c.identity) + " (tol " + num(kIdentityTol) + ")");
  criterion_determinism(tool);
  criterion_mutation();

  std::size_t failed = 0;
  for (const auto& l : lines) failed += l.passed ? 0 : 1;
  std::cout << (failed == 0 ? "all " + std::to_string(lines.size()) + " criteria pass"
                            : std::to_string(failed) + " of " + std::to_string(lines.size()) +
                                  " criteria fail")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
