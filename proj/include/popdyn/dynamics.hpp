#pragma once

#include "popdyn/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

namespace popdyn {

struct AgentRef {
  Role role = Role::best_responder;
  TypeRef type;
  Strategy current = Strategy::defect;
  bool operator==(const AgentRef&) const = default;
};

class NoSuchAgent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Strategy best_response_next(Kind kind, const Rational& temper, Strategy current, std::int64_t nC);

// Highest u^C among cooperators and highest u^D among defectors; an empty side is -inf.
struct HighestEarners {
  ExtendedRational cooperators;
  ExtendedRational defectors;
};

HighestEarners highest_earners(const PopulationSpec& pop, const State& x);
Strategy imitation_next(const PopulationSpec& pop, const State& x, Strategy current);

int cell_of(const PopulationSpec& pop, const AgentRef& agent);
State step(const PopulationSpec& pop, const State& x, const AgentRef& agent);

// The (role, type, strategy) classes that currently have at least one member.
std::vector<AgentRef> present_agents(const PopulationSpec& pop, const State& x);

struct UniformRandom {
  std::uint64_t seed = 0;
};
// Per-agent weights, one per cell of PopulationSpec::cells().
struct Weighted {
  std::vector<double> weights;
  std::uint64_t seed = 0;
};
// Cycled. An entry whose agent is absent at its turn leaves the state unchanged.
struct Scripted {
  std::vector<AgentRef> sequence;
};
struct Exhaustive {};

using ActivationPolicy = std::variant<UniformRandom, Weighted, Scripted, Exhaustive>;

struct TrajectoryRecord {
  std::int64_t t = 0;
  State state;
  int cooperators = 0;
  std::optional<AgentRef> active;
};

using Trajectory = std::vector<TrajectoryRecord>;

Trajectory simulate(const PopulationSpec& pop, const State& initial, const ActivationPolicy& policy,
                    std::int64_t steps);

// Unbiased draw in [0, bound) from a 64-bit engine; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64& rng);

void write_trajectory_csv(std::ostream& out, const PopulationSpec& pop, const Trajectory& traj);

}  // namespace popdyn
