#pragma once

#include "mobmech/model.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mobmech::cli {

struct IntRange {
  int min = 0;
  int max = 0;
};

/// Ranges for random instances. Service limits are always drawn from
/// [1, services] and capacities from [1, travelers]; budgets from
/// [services * budget_per_service.min, services * budget_per_service.max].
struct GeneratorConfig {
  IntRange valuation;
  IntRange budget_per_service;
  std::size_t corpus_size = 0;
  std::uint64_t corpus_seed = 0;
  IntRange travelers;
  IntRange services;
  IntRange scenarios;
};

/// The configuration shipped in config/corpus.json, compiled in.
GeneratorConfig default_generator_config();
GeneratorConfig parse_generator_config(std::string_view text);
GeneratorConfig load_generator_config(const std::string& path);

/// Same seed and config give the same instance on every platform.
MarketInstance generate_instance(std::size_t travelers, std::size_t services,
                                 std::size_t scenarios, std::uint64_t seed,
                                 const GeneratorConfig& config);

/// corpus_size instances with shapes drawn from the configured ranges.
std::vector<MarketInstance> generate_corpus(const GeneratorConfig& config);

}  // namespace mobmech::cli
