#include "popdyn/dynamics.hpp"

#include <ostream>

namespace popdyn {

Strategy best_response_next(Kind kind, const Rational& temper, Strategy current, std::int64_t nC) {
  Rational x = nC;
  if (x == temper) return current;
  bool above = x > temper;
  if (kind == Kind::coordinating) return above ? Strategy::cooperate : Strategy::defect;
  return above ? Strategy::defect : Strategy::cooperate;
}

HighestEarners highest_earners(const PopulationSpec& pop, const State& x) {
  HighestEarners h;
  const int nC = x.cooperators();
  const auto& cells = pop.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const AgentTypeSpec& t = pop.type(cells[c].type);
    if (x.counts[c] > 0) h.cooperators.raise_to(t.cooperator.at(nC));
    if (x.counts[c] < cells[c].capacity) h.defectors.raise_to(t.defector.at(nC));
  }
  return h;
}

Strategy imitation_next(const PopulationSpec& pop, const State& x, Strategy current) {
  HighestEarners h = highest_earners(pop, x);
  if (h.cooperators > h.defectors) return Strategy::cooperate;
  if (h.cooperators < h.defectors) return Strategy::defect;
  return current;
}

int cell_of(const PopulationSpec& pop, const AgentRef& agent) {
  if (agent.type.index < 1 || agent.type.index > static_cast<int>(pop.types(agent.type.kind).size()))
    throw NoSuchAgent("unknown type");
  if (agent.role == Role::imitator) {
    int c = pop.cell_of_imitators(agent.type);
    if (c < 0) throw NoSuchAgent("type has no imitators");
    return c;
  }
  return pop.cell_of_best_responders(agent.type);
}

State step(const PopulationSpec& pop, const State& x, const AgentRef& agent) {
  int c = cell_of(pop, agent);
  int cooperating = x.counts[c];
  int capacity = pop.cells()[c].capacity;
  if ((agent.current == Strategy::cooperate && cooperating == 0) ||
      (agent.current == Strategy::defect && cooperating == capacity))
    throw NoSuchAgent("no agent in the requested cell");
  Strategy next;
  if (agent.role == Role::imitator) {
    next = imitation_next(pop, x, agent.current);
  } else {
    const AgentTypeSpec& t = pop.type(agent.type);
    next = best_response_next(t.kind, t.temper, agent.current, x.cooperators());
  }
  State y = x;
  if (next != agent.current) y.counts[c] += next == Strategy::cooperate ? 1 : -1;
  return y;
}

std::vector<AgentRef> present_agents(const PopulationSpec& pop, const State& x) {
  std::vector<AgentRef> out;
  const auto& cells = pop.cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (x.counts[c] > 0) out.push_back({cells[c].role, cells[c].type, Strategy::cooperate});
    if (x.counts[c] < cells[c].capacity) out.push_back({cells[c].role, cells[c].type, Strategy::defect});
  }
  return out;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do v = rng(); while (v >= limit);
  return v % bound;
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

// Picks an agent with probability proportional to its weight; returns its cell and strategy.
std::optional<AgentRef> draw_agent(const PopulationSpec& pop, const State& x, std::mt19937_64& rng,
                                   const std::vector<double>* weights) {
  const auto& cells = pop.cells();
  auto agent_at = [&](std::size_t c, bool cooperating) {
    return AgentRef{cells[c].role, cells[c].type, cooperating ? Strategy::cooperate : Strategy::defect};
  };
  if (!weights) {
    std::uint64_t k = uniform_below(rng, static_cast<std::uint64_t>(pop.n()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::uint64_t cap = static_cast<std::uint64_t>(cells[c].capacity);
      if (k < cap) return agent_at(c, k < static_cast<std::uint64_t>(x.counts[c]));
      k -= cap;
    }
    return std::nullopt;
  }
  double total = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) total += (*weights)[c] * cells[c].capacity;
  double u = uniform_unit(rng) * total;
  std::size_t last = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].capacity == 0) continue;
    last = c;
    double mass = (*weights)[c] * cells[c].capacity;
    if (u < mass) {
      double share = u / mass * cells[c].capacity;
      return agent_at(c, share < x.counts[c]);
    }
    u -= mass;
  }
  return agent_at(last, x.counts[last] > 0 && x.counts[last] == cells[last].capacity);
}

}  // namespace

Trajectory simulate(const PopulationSpec& pop, const State& initial, const ActivationPolicy& policy,
                    std::int64_t steps) {
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  if (!in_bounds(pop, initial)) throw std::invalid_argument("initial state out of bounds");
  if (std::holds_alternative<Exhaustive>(policy))
    throw std::invalid_argument("exhaustive activation is reserved for the oracle");
  if (const auto* w = std::get_if<Weighted>(&policy)) {
    if (w->weights.size() != pop.cells().size())
      throw std::invalid_argument("one weight per cell required");
    for (double v : w->weights)
      if (!(v > 0)) throw std::invalid_argument("weights must be strictly positive");
  }

  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  traj.push_back({0, initial, initial.cooperators(), std::nullopt});
  if (steps == 0 || pop.n() == 0) return traj;

  std::mt19937_64 rng;
  if (const auto* u = std::get_if<UniformRandom>(&policy)) rng.seed(u->seed);
  if (const auto* w = std::get_if<Weighted>(&policy)) rng.seed(w->seed);
  const auto* script = std::get_if<Scripted>(&policy);
  const auto* weighted = std::get_if<Weighted>(&policy);
  if (script && script->sequence.empty()) throw std::invalid_argument("empty activation script");

  State x = initial;
  for (std::int64_t t = 1; t <= steps; ++t) {
    std::optional<AgentRef> agent;
    if (script) {
      agent = script->sequence[static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(script->sequence.size()))];
      try {
        x = step(pop, x, *agent);
      } catch (const NoSuchAgent&) {
      }
    } else {
      agent = draw_agent(pop, x, rng, weighted ? &weighted->weights : nullptr);
      x = step(pop, x, *agent);
    }
    traj.push_back({t, x, x.cooperators(), agent});
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const PopulationSpec& pop, const Trajectory& traj) {
  out << "t,active_role,active_kind,active_type,xI";
  for (int i = 1; i <= pop.b(); ++i) out << ",xa_" << i;
  for (int i = pop.b_prime(); i >= 1; --i) out << ",xc_" << i;
  out << ",nC\n";
  for (const auto& rec : traj) {
    out << rec.t << ',';
    if (rec.active)
      out << to_string(rec.active->role) << ',' << to_string(rec.active->type.kind) << ','
          << rec.active->type.index;
    else
      out << ",,";
    for (int v : pooled(pop, rec.state)) out << ',' << v;
    out << ',' << rec.cooperators << '\n';
  }
}

}  // namespace popdyn
