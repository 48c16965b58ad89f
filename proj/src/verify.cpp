#include "popdyn/verify.hpp"

#include "popdyn/equilibria.hpp"
#include "popdyn/invariants.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace popdyn {

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

void fail(Check& c, const std::string& what) {
  if (c.pass) c.detail = what;
  c.pass = false;
}

}  // namespace

bool closed_under_steps(const TransitionDigraph& g, const std::vector<bool>& member, std::string* witness) {
  for (std::uint64_t u = 0; u < g.node_count(); ++u) {
    if (!member[u]) continue;
    for (std::uint32_t v : g.successors(u))
      if (!member[v]) {
        if (witness)
          *witness = format_pooled(g.pop, g.space.state(u)) + " -> " + format_pooled(g.pop, g.space.state(v));
        return false;
      }
  }
  return true;
}

std::vector<Check> verify_equilibria(const TransitionDigraph& g) {
  const PopulationSpec& pop = g.pop;
  Check listed{"equilibria: every closed-form equilibrium is an oracle fixed point", true, ""};
  Check complete{"equilibria: every oracle fixed point is listed", true, ""};
  Check stability{"stability: classify_stability matches is_stable_oracle", true, ""};
  Check preserving{"equilibria: exclusive cooperation preservation matches the oracle", true, ""};

  std::set<std::vector<int>> analytic;
  std::size_t compared = 0, skipped = 0;
  for (const EquilibriumRecord& rec : enumerate_equilibria(pop)) {
    analytic.insert(rec.state);
    std::optional<StabilityVerdict> verdict;
    try {
      verdict = classify_stability(pop, rec);
    } catch (const AssumptionViolated&) {
      ++skipped;
    }
    for (const State& x : refinements(pop, rec.state)) {
      if (!is_equilibrium_oracle(g, x)) {
        fail(listed, format_pooled(pop, x) + " moves");
        continue;
      }
      if (verdict) {
        ++compared;
        bool oracle = is_stable_oracle(g, x);
        if (oracle != verdict->stable)
          fail(stability, format_pooled(pop, x) + ": closed form " + (verdict->stable ? "stable" : "unstable") +
                              ", oracle " + (oracle ? "stable" : "unstable"));
      }
    }
  }

  std::size_t fixed_points = 0;
  for (std::uint64_t v = 0; v < g.node_count(); ++v) {
    auto succ = g.successors(v);
    bool oracle = succ.size() == 1 && succ[0] == v;
    State x = g.space.state(v);
    if (oracle) {
      ++fixed_points;
      if (!analytic.count(pooled(pop, x))) fail(complete, format_pooled(pop, x) + " is missing");
    }
    if (is_exclusive_cooperation_preserving(pop, x) != oracle)
      fail(preserving, format_pooled(pop, x) + (oracle ? " is a fixed point" : " is not a fixed point"));
  }
  if (listed.pass) listed.detail = std::to_string(analytic.size()) + " pooled equilibria";
  if (complete.pass) complete.detail = std::to_string(fixed_points) + " refined fixed points";
  if (stability.pass)
    stability.detail = std::to_string(compared) + " compared, " + std::to_string(skipped) +
                       " outside the closed-form assumptions";
  if (preserving.pass) preserving.detail = std::to_string(g.node_count()) + " states";
  return {listed, complete, stability, preserving};
}

std::vector<Check> verify_invariants(const TransitionDigraph& g, std::uint64_t max_states) {
  const PopulationSpec& pop = g.pop;
  const std::uint64_t N = g.node_count();
  Check x_check{"invariants: is_invariant_X matches one-step closure", true, ""};
  Check s_check{"invariants: is_invariant_S matches one-step closure", true, ""};
  Check necessary{"invariants: necessary conditions hold on every non-singleton minimal invariant set", true, ""};

  std::vector<State> states(N);
  for (std::uint64_t v = 0; v < N; ++v) states[v] = g.space.state(v);
  std::size_t indices = 0, nonempty_S = 0;
  std::vector<bool> member(N);
  for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
    ++indices;
    for (std::uint64_t v = 0; v < N; ++v) member[v] = membership_X(pop, idx, states[v]);
    std::string witness;
    bool closed = closed_under_steps(g, member, &witness);
    if (closed != is_invariant_X(pop, idx))
      fail(x_check, "X" + format_index(idx) + (closed ? " is closed" : " escapes via " + witness));

    bool any = false;
    for (std::uint64_t v = 0; v < N; ++v) {
      member[v] = membership_S(pop, idx, states[v]);
      any = any || member[v];
    }
    SInvarianceReport rep = analyze_S(pop, idx, max_states);
    if (rep.nonempty != any) {
      fail(s_check, "S" + format_index(idx) + (any ? " has states" : " has no state"));
      continue;
    }
    if (!any) continue;
    ++nonempty_S;
    closed = closed_under_steps(g, member, &witness);
    if (closed != rep.invariant)
      fail(s_check, "S" + format_index(idx) + (closed ? " is closed" : " escapes via " + witness));
  }

  std::size_t sets = 0;
  for (const InvariantSetResult& set : minimal_invariant_sets(g)) {
    if (set.singleton) continue;
    ++sets;
    NecessaryConditionReport rep = verify_necessary_conditions(g, set);
    if (!rep.all_pass()) {
      std::string which = !rep.inside_X.pass                 ? "inside X: " + rep.inside_X.witness
                          : !rep.extremes.pass               ? "extremes: " + rep.extremes.witness
                          : !rep.wandering_nonconformists.pass ? "wandering: " + rep.wandering_nonconformists.witness
                                                               : "inside I: " + rep.inside_I.witness;
      fail(necessary, "set with n^C in [" + std::to_string(set.min_cooperators) + "," +
                          std::to_string(set.max_cooperators) + "] " + which);
    }
  }
  if (x_check.pass) x_check.detail = std::to_string(indices) + " indices";
  if (s_check.pass) s_check.detail = std::to_string(nonempty_S) + " nonempty of " + std::to_string(indices);
  if (necessary.pass) necessary.detail = std::to_string(sets) + " sets";
  return {x_check, s_check, necessary};
}

std::vector<Check> verify_stochastic(const StochasticModel& model, const std::vector<Rational>& epsilons) {
  const BinaryTypePopulation& bpop = model.population();
  const ClassAnalysis& a = model.analysis();
  const std::size_t N = bpop.state_count();
  const int k = static_cast<int>(a.classes.size());
  std::vector<Check> out;

  Check classes{"stochastic: recurrent classes match oracle minimal invariant sets", true, ""};
  {
    TransitionDigraph g = build_transition_digraph(bpop.spec(), std::max<std::uint64_t>(N, 1));
    std::set<std::vector<std::uint32_t>> oracle, chain(a.classes.begin(), a.classes.end());
    for (const InvariantSetResult& set : minimal_invariant_sets(g)) {
      std::vector<std::uint32_t> mapped;
      for (auto v : set.states) mapped.push_back(static_cast<std::uint32_t>(bpop.index(bpop.from_state(g.space.state(v)))));
      std::sort(mapped.begin(), mapped.end());
      oracle.insert(mapped);
    }
    if (oracle != chain)
      fail(classes, std::to_string(oracle.size()) + " oracle sets vs " + std::to_string(chain.size()) + " classes");
    else
      classes.detail = std::to_string(k) + " classes";
  }
  out.push_back(classes);

  Check gamma{"stochastic: exhaustive and arborescence gamma agree", true, ""};
  if (a.gamma_check.empty()) {
    gamma.detail = "more than 9 classes, arborescence only";
  } else {
    for (int c = 0; c < k; ++c)
      if (a.gamma[c] != a.gamma_check[c])
        fail(gamma, "class " + std::to_string(c) + ": " + std::to_string(a.gamma[c]) + " vs " +
                        std::to_string(a.gamma_check[c]));
  }
  out.push_back(gamma);

  Check dominance{"stochastic: c(x, class) >= c*(x, class) for every pair", true, ""};
  std::vector<std::vector<int>> direct(N, std::vector<int>(k, kInfiniteCost));
  for (std::size_t x = 0; x < N; ++x)
    for (int c = 0; c < k; ++c) {
      if (a.class_of[x] == c) continue;
      direct[x][c] = cost(model.costs(), {static_cast<std::uint32_t>(x)}, a.classes[c]);
      int star = model.modified_cost(static_cast<std::uint32_t>(x), c);
      if (star > direct[x][c])
        fail(dominance, format_state(bpop.state(x)) + " to class " + std::to_string(c) + ": c = " +
                            std::to_string(direct[x][c]) + ", c* = " + std::to_string(star));
    }
  out.push_back(dominance);

  Check theorem{"stochastic: extreme-equilibrium theorem not contradicted", true, ""};
  ExtremeTheoremVerdict verdict = check_extreme_theorem(model);
  theorem.detail = std::string("hypothesis ") + to_string(verdict.hypothesis) + ", conclusion " + verdict.conclusion;
  theorem.pass = verdict.conclusion != "violated";
  out.push_back(theorem);

  std::vector<Rational> eps = epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  std::vector<StationaryDistribution> mus;
  for (const Rational& e : eps) {
    PerturbedChain chain = build_chain(bpop, e);
    const std::string tag = "epsilon " + to_string(e);
    Check rows{"stochastic: rows of P sum to 1 exactly, " + tag, true, ""};
    Check support{"stochastic: support of P^0 within support of P, " + tag, true, ""};
    Check soundness{"stochastic: costs are 0 on P^0 support, 1 on perturbed-only support, " + tag, true, ""};
    Check irreducible{"stochastic: P is irreducible and aperiodic, " + tag, true, ""};
    std::vector<std::vector<std::uint32_t>> lists(N);
    bool self_loop = false;
    for (std::size_t x = 0; x < N; ++x) {
      Rational sum = 0;
      std::vector<Rational> row0(N), row(N);
      for (decltype(chain.P)::InnerIterator it(chain.P, x); it; ++it) {
        sum += it.value();
        if (it.value() != 0) lists[x].push_back(static_cast<std::uint32_t>(it.col()));
        row[it.col()] = it.value();
      }
      for (decltype(model.unperturbed().P)::InnerIterator it(model.unperturbed().P, x); it; ++it)
        row0[it.col()] = it.value();
      if (sum != 1) fail(rows, format_state(bpop.state(x)) + " sums to " + to_string(sum));
      if (row[x] > 0) self_loop = true;
      for (std::size_t y = 0; y < N; ++y) {
        if (row0[y] > 0 && row[y] == 0) fail(support, format_state(bpop.state(x)) + " -> " + format_state(bpop.state(y)));
        if (x == y) continue;
        int expected = row0[y] > 0 ? 0 : row[y] > 0 ? 1 : kInfiniteCost;
        if (model.costs().edge_cost(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)) != expected)
          fail(soundness, format_state(bpop.state(x)) + " -> " + format_state(bpop.state(y)));
      }
    }
    std::uint32_t components = 0;
    strongly_connected_components(csr_from_lists(lists), components);
    if (components != 1 || !self_loop)
      fail(irreducible, std::to_string(components) + " strong components" + (self_loop ? "" : ", no self-loop"));
    out.insert(out.end(), {rows, support, soundness, irreducible});

    StationaryDistribution mu = stationary_distribution(chain);
    Check solved{"stochastic: stationary distribution positive, normalized, residual <= 1e-12, " + tag, true, ""};
    double total = 0;
    for (double p : mu.probabilities) {
      total += p;
      if (!(p > 0)) fail(solved, "non-positive entry");
    }
    if (std::abs(total - 1) > 1e-12) fail(solved, "sums to " + std::to_string(total));
    if (!(mu.residual <= 1e-12)) fail(solved, "residual " + std::to_string(mu.residual));
    if (solved.pass) {
      std::ostringstream s;
      s << "residual " << mu.residual;
      solved.detail = s.str();
    }
    out.push_back(solved);
    mus.push_back(std::move(mu));
  }

  if (mus.size() >= 2) {
    const auto stable = model.stochastically_stable_set();
    Check increasing{"stochastic: stationary mass of the stable set increases as epsilon decreases", true, ""};
    std::vector<double> mass;
    for (const auto& mu : mus) {
      double m = 0;
      for (auto s : stable) m += mu.probabilities[s];
      mass.push_back(m);
    }
    for (std::size_t i = 1; i < mass.size(); ++i)
      if (!(mass[i] > mass[i - 1])) fail(increasing, "mass " + std::to_string(mass[i]) + " after " + std::to_string(mass[i - 1]));
    out.push_back(increasing);

    Check decay{"stochastic: mass of x decreases when R(class) > c(x, class)", true, ""};
    std::size_t pairs = 0;
    for (std::size_t x = 0; x < N; ++x) {
      bool covered = false;
      for (int c = 0; c < k && !covered; ++c)
        covered = a.class_of[x] != c && a.radii[c] < kInfiniteCost && a.radii[c] > direct[x][c];
      if (!covered) continue;
      ++pairs;
      for (std::size_t i = 1; i < mus.size(); ++i)
        if (!(mus[i].probabilities[x] < mus[i - 1].probabilities[x]))
          fail(decay, format_state(bpop.state(x)) + " does not decrease");
    }
    if (decay.pass) decay.detail = std::to_string(pairs) + " states";
    out.push_back(decay);
  }

  if (!eps.empty() && eps.back() <= Rational(1, 10000)) {
    Check argmax{"stochastic: non-vanishing classes at the smallest epsilon are the gamma-minimal ones", true, ""};
    const auto& mu = mus.back();
    std::vector<double> mass(k, 0);
    for (int c = 0; c < k; ++c)
      for (auto s : a.classes[c]) mass[c] += mu.probabilities[s];
    double top = *std::max_element(mass.begin(), mass.end());
    std::vector<int> heavy;
    for (int c = 0; c < k; ++c)
      if (mass[c] >= 1e-2 * top) heavy.push_back(c);
    if (heavy != a.stable_classes) fail(argmax, std::to_string(heavy.size()) + " heavy classes");
    out.push_back(argmax);
  }
  return out;
}

}  // namespace popdyn
