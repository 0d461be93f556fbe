#include "mobmech/cli/generator.hpp"

#include "mobmech/cli/scenario_io.hpp"
#include "mobmech/corpus_config.hpp"

#include "json.hpp"

#include <random>

namespace mobmech::cli {

namespace {

using nlohmann::json;

// Uniform integer in [lo, hi]. Plain modulo keeps the stream identical across
// standard libraries; the bias is negligible for these tiny ranges.
int draw(std::mt19937_64& rng, int lo, int hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng() % span);
}

IntRange range_at(const json& node, const char* key) {
  const json& r = node.at(key);
  IntRange out{r.at("min").get<int>(), r.at("max").get<int>()};
  if (out.min > out.max) throw Error(std::string("generator config: empty range for ") + key);
  return out;
}

}  // namespace

GeneratorConfig parse_generator_config(std::string_view text) {
  try {
    const json root = json::parse(text.begin(), text.end());
    GeneratorConfig config;
    config.valuation = range_at(root, "valuation");
    config.budget_per_service = range_at(root, "budget_per_service");
    const json& corpus = root.at("corpus");
    config.corpus_size = corpus.at("size").get<std::size_t>();
    config.corpus_seed = corpus.at("seed").get<std::uint64_t>();
    config.travelers = range_at(corpus, "travelers");
    config.services = range_at(corpus, "services");
    config.scenarios = range_at(corpus, "scenarios");
    return config;
  } catch (const json::exception& e) {
    throw Error(std::string("generator config: ") + e.what());
  }
}

GeneratorConfig default_generator_config() {
  return parse_generator_config(kDefaultCorpusConfig);
}

GeneratorConfig load_generator_config(const std::string& path) {
  return parse_generator_config(read_file(path));
}

MarketInstance generate_instance(std::size_t travelers, std::size_t services,
                                 std::size_t scenarios, std::uint64_t seed,
                                 const GeneratorConfig& config) {
  if (travelers == 0 || services == 0 || scenarios == 0) {
    throw PreconditionError("instance dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  const int I = static_cast<int>(travelers);
  const int J = static_cast<int>(services);

  MarketInstance instance;
  instance.name = "gen-" + std::to_string(travelers) + "x" + std::to_string(services) + "x" +
                  std::to_string(scenarios) + "-seed" + std::to_string(seed);
  instance.budgets.resize(I);
  for (int i = 0; i < I; ++i) {
    instance.budgets(i) =
        draw(rng, J * config.budget_per_service.min, J * config.budget_per_service.max);
    instance.service_limits.push_back(draw(rng, 1, J));
  }
  for (int j = 0; j < J; ++j) instance.capacities.push_back(draw(rng, 1, I));
  for (std::size_t s = 0; s < scenarios; ++s) {
    Matrix v(I, J);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j < J; ++j) v(i, j) = draw(rng, config.valuation.min, config.valuation.max);
    }
    instance.scenarios.push_back(std::move(v));
  }
  return instance;
}

std::vector<MarketInstance> generate_corpus(const GeneratorConfig& config) {
  std::mt19937_64 rng(config.corpus_seed);
  std::vector<MarketInstance> corpus;
  corpus.reserve(config.corpus_size);
  for (std::size_t k = 0; k < config.corpus_size; ++k) {
    const int I = draw(rng, config.travelers.min, config.travelers.max);
    const int J = draw(rng, config.services.min, config.services.max);
    const int S = draw(rng, config.scenarios.min, config.scenarios.max);
    const std::uint64_t seed = rng();
    corpus.push_back(generate_instance(static_cast<std::size_t>(I), static_cast<std::size_t>(J),
                                       static_cast<std::size_t>(S), seed, config));
  }
  return corpus;
}

}  // namespace mobmech::cli
