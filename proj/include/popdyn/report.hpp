#pragma once

#include "popdyn/oracle.hpp"
#include "popdyn/stochastic.hpp"
#include "popdyn/verify.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace popdyn {

// Reports use nlohmann::json's default (sorted) key order; rationals are "p/q" strings.

nlohmann::json population_json(const PopulationSpec& pop);
nlohmann::json checks_json(const std::vector<Check>& checks);

nlohmann::json equilibria_report(const PopulationSpec& pop);
nlohmann::json invariants_report(const PopulationSpec& pop, const TransitionDigraph* g,
                                 std::uint64_t max_states = kDefaultMaxStates);
nlohmann::json oracle_report(const TransitionDigraph& g);

struct StationaryRun {
  Rational epsilon;
  StationaryDistribution mu;
};
nlohmann::json stochastic_report(const StochasticModel& model, const std::vector<StationaryRun>& runs);

}  // namespace popdyn
