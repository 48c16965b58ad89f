#include "popdyn/report.hpp"

#include "popdyn/equilibria.hpp"
#include "popdyn/invariants.hpp"

#include <set>

namespace popdyn {

using nlohmann::json;

namespace {

constexpr std::size_t kListedPooledStates = 500;

json line_json(const UtilityLine& l) { return {{"slope", to_string(l.slope)}, {"intercept", to_string(l.intercept)}}; }

json types_json(const PopulationSpec& pop, Kind k) {
  json out = json::array();
  for (const AgentTypeSpec& t : pop.types(k))
    out.push_back({{"temper", to_string(t.temper)},
                   {"bestResponders", t.best_responders},
                   {"imitators", t.imitators},
                   {"uC", line_json(t.cooperator)},
                   {"uD", line_json(t.defector)}});
  return out;
}

json extended_json(const ExtendedRational& v) { return v.is_finite() ? json(to_string(v.value())) : json("-inf"); }

json cost_json(int c) { return c >= kInfiniteCost ? json("inf") : json(c); }

json check_json(const ConditionCheck& c) {
  json out{{"pass", c.pass}, {"vacuous", c.vacuous}};
  if (!c.witness.empty()) out["witness"] = c.witness;
  return out;
}

json invariant_set_json(const TransitionDigraph& g, const InvariantSetResult& set) {
  std::set<std::vector<int>> tuples;
  for (auto v : set.states) tuples.insert(pooled(g.pop, g.space.state(v)));
  json out{{"refinedStates", set.states.size()},
           {"singleton", set.singleton},
           {"minCooperators", set.min_cooperators},
           {"maxCooperators", set.max_cooperators},
           {"pooledStateCount", tuples.size()}};
  if (tuples.size() <= kListedPooledStates) {
    json list = json::array();
    for (const auto& t : tuples) list.push_back(format_tuple(t));
    out["pooledStates"] = list;
  }
  return out;
}

}  // namespace

json population_json(const PopulationSpec& pop) {
  return {{"n", pop.n()},
          {"m", pop.m()},
          {"b", pop.b()},
          {"bPrime", pop.b_prime()},
          {"anticoordinating", types_json(pop, Kind::anticoordinating)},
          {"coordinating", types_json(pop, Kind::coordinating)},
          {"stateOrder", "(xI, xa_1..xa_b, xc_b'..xc_1)"}};
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const Check& c : checks) out.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return out;
}

json equilibria_report(const PopulationSpec& pop) {
  json list = json::array();
  for (const EquilibriumRecord& rec : enumerate_equilibria(pop)) {
    const std::int64_t nC = rec.cooperators;
    json entry{{"candidate", {{"r", rec.candidate.r}, {"j1", rec.candidate.j1}, {"j1Prime", rec.candidate.j1p}}},
               {"state", format_tuple(rec.state)},
               {"cooperators", rec.cooperators},
               {"kind", to_string(rec.kind)},
               {"supC", extended_json(sup_C(pop, rec.candidate.j1, rec.candidate.j1p, nC))},
               {"supD", extended_json(sup_D(pop, rec.candidate.j1 + 1, rec.candidate.j1p + 1, nC))}};
    StabilityVerdict v = classify_stability(pop, rec, AssumptionPolicy::evaluate_anyway);
    json s{{"stable", v.stable}, {"rule", v.rule}, {"assumptionsHold", !v.assumption_violation}};
    if (v.assumption_violation) s["assumptionViolation"] = *v.assumption_violation;
    if (!v.failed_clause.empty()) s["failedClause"] = v.failed_clause;
    if (v.printed_subscript_reading) s["printedSubscriptReading"] = *v.printed_subscript_reading;
    entry["stability"] = s;
    list.push_back(entry);
  }
  return {{"population", population_json(pop)}, {"equilibria", list}};
}

json invariants_report(const PopulationSpec& pop, const TransitionDigraph* g, std::uint64_t max_states) {
  json indices = json::array();
  for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
    SInvarianceReport s = analyze_S(pop, idx, max_states);
    json sj{{"nonempty", s.nonempty}, {"necessaryNonempty", s.necessary_nonempty}};
    if (s.nonempty) {
      sj["invariant"] = s.invariant;
      sj["conditionLow"] = {{"holds", s.condition_low},
                            {"shortCircuit", s.low_short_circuit},
                            {"cooperatorTop", s.low_highest_earner},
                            {"brackets", s.low_brackets}};
      sj["conditionHigh"] = {{"holds", s.condition_high},
                             {"shortCircuit", s.high_short_circuit},
                             {"defectorTop", s.high_highest_earner},
                             {"brackets", s.high_brackets}};
      sj["statesChecked"] = s.states_checked;
    }
    indices.push_back({{"index", format_index(idx)},
                       {"tauMax", to_string(tau_max(pop, idx))},
                       {"tauMin", to_string(tau_min(pop, idx))},
                       {"fixedCooperators", fixed_cooperators(pop, idx)},
                       {"maxCooperators", max_cooperators(pop, idx)},
                       {"X", {{"invariant", is_invariant_X(pop, idx)}}},
                       {"S", sj}});
  }
  json out{{"population", population_json(pop)}, {"indices", indices}};
  if (g) {
    json sets = json::array();
    for (const InvariantSetResult& set : minimal_invariant_sets(*g)) {
      json entry = invariant_set_json(*g, set);
      if (!set.singleton) {
        NecessaryConditionReport rep = verify_necessary_conditions(*g, set);
        entry["xi"] = format_index(rep.xi);
        entry["necessaryConditions"] = {{"insideX", check_json(rep.inside_X)},
                                        {"extremes", check_json(rep.extremes)},
                                        {"wanderingNonconformists", check_json(rep.wandering_nonconformists)},
                                        {"insideI", check_json(rep.inside_I)}};
      }
      sets.push_back(entry);
    }
    out["minimalInvariantSets"] = sets;
  }
  return out;
}

json oracle_report(const TransitionDigraph& g) {
  json equilibria = json::array();
  std::set<std::vector<int>> seen;
  json sets = json::array();
  for (const InvariantSetResult& set : minimal_invariant_sets(g)) {
    if (set.singleton) seen.insert(pooled(g.pop, g.space.state(set.states[0])));
    sets.push_back(invariant_set_json(g, set));
  }
  for (const auto& t : seen) equilibria.push_back(format_tuple(t));
  return {{"population", population_json(g.pop)},
          {"refinedStates", g.node_count()},
          {"edges", g.adjacency.targets.size()},
          {"equilibria", equilibria},
          {"minimalInvariantSets", sets}};
}

json stochastic_report(const StochasticModel& model, const std::vector<StationaryRun>& runs) {
  const BinaryTypePopulation& bpop = model.population();
  const ClassAnalysis& a = model.analysis();
  auto states_json = [&](const std::vector<std::uint32_t>& states) {
    json list = json::array();
    for (auto s : states) list.push_back(format_state(bpop.state(s)));
    return list;
  };

  json classes = json::array();
  for (std::size_t c = 0; c < a.classes.size(); ++c)
    classes.push_back({{"id", c},
                       {"states", states_json(a.classes[c])},
                       {"basin", states_json(a.basins[c])},
                       {"radius", cost_json(a.radii[c])},
                       {"gamma", a.gamma[c]}});
  json costs = json::array();
  for (const auto& row : a.weights) {
    json r = json::array();
    for (int w : row) r.push_back(cost_json(w));
    costs.push_back(r);
  }

  ExtremeTheoremVerdict v = check_extreme_theorem(model);
  json pairings = json::array();
  for (const auto& p : v.pairings)
    pairings.push_back({{"mixed", format_state(p.mixed)},
                       {"extreme", format_state(p.extreme)},
                       {"extremeIsEquilibrium", p.extreme_is_equilibrium}});
  json theorem{{"hypothesis", to_string(v.hypothesis)},
               {"pairings", pairings},
               {"stableSetHasEquilibrium", v.stable_set_has_equilibrium},
               {"stableSetHasExtremeEquilibrium", v.stable_set_has_extreme_equilibrium},
               {"conclusion", v.conclusion}};

  const auto stable = model.stochastically_stable_set();
  json stationary = json::array();
  for (const StationaryRun& run : runs) {
    json mass = json::array();
    for (const auto& cls : a.classes) {
      double m = 0;
      for (auto s : cls) m += run.mu.probabilities[s];
      mass.push_back(m);
    }
    double ss = 0;
    for (auto s : stable) ss += run.mu.probabilities[s];
    json per_state = json::object();
    for (std::size_t i = 0; i < run.mu.probabilities.size(); ++i)
      per_state[format_state(bpop.state(i))] = run.mu.probabilities[i];
    stationary.push_back({{"epsilon", to_string(run.epsilon)},
                          {"exact", run.mu.exact.has_value()},
                          {"residual", run.mu.residual},
                          {"classMass", mass},
                          {"stableSetMass", ss},
                          {"states", per_state}});
  }

  const ActivationWeights& w = bpop.weights();
  return {{"population",
           {{"ma", bpop.ma()},
            {"na", bpop.na()},
            {"mc", bpop.mc()},
            {"nc", bpop.nc()},
            {"temperA", to_string(bpop.spec().temper_a(1))},
            {"temperC", to_string(bpop.spec().temper_c(1))},
            {"activation",
             {{"anticoordinatingImitators", to_string(w.anticoordinating_imitators)},
              {"nonconformists", to_string(w.nonconformists)},
              {"coordinatingImitators", to_string(w.coordinating_imitators)},
              {"conformists", to_string(w.conformists)}}},
            {"stateOrder", "(x1I, xa, x2I, xc)"}}},
          {"states", bpop.state_count()},
          {"classes", classes},
          {"costs", costs},
          {"stochasticallyStableSet", states_json(stable)},
          {"stableClasses", a.stable_classes},
          {"theorem", theorem},
          {"stationary", stationary}};
}

}  // namespace popdyn
