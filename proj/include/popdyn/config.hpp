#pragma once

#include "popdyn/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace popdyn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-agent activation weights of the four binary-type subpopulations.
struct ActivationWeights {
  Rational anticoordinating_imitators;
  Rational nonconformists;
  Rational coordinating_imitators;
  Rational conformists;
};

struct PopulationConfig {
  RawPopulation raw;
  std::optional<ActivationWeights> activation;
};

// Numbers may be JSON numbers (integers only) or strings ("p/q", "26.8").
Rational rational_from_json(const nlohmann::json& v);

PopulationConfig parse_population_config(const nlohmann::json& doc);
PopulationConfig load_population_config(const std::filesystem::path& path);

}  // namespace popdyn
