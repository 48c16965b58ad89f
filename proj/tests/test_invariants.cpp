#include "support.hpp"

#include "popdyn/invariants.hpp"
#include "popdyn/verify.hpp"

#include <doctest.h>

using namespace testing;

namespace {

// One-step closure of {x : member(x)} checked state by state with the update rules.
template <class Member>
bool closed_by_rules(const PopulationSpec& pop, Member member) {
  for (const State& x : all_states(pop)) {
    if (!member(x)) continue;
    for (const State& y : successors_by_rules(pop, x))
      if (!member(y)) return false;
  }
  return true;
}

const InvariantSetResult& only_non_singleton(const std::vector<InvariantSetResult>& sets) {
  const InvariantSetResult* found = nullptr;
  for (const auto& s : sets)
    if (!s.singleton) {
      REQUIRE(found == nullptr);
      found = &s;
    }
  REQUIRE(found != nullptr);
  return *found;
}

}  // namespace

TEST_SUITE("invariants") {

TEST_CASE("benchmark_types_from_bounds: ex2 at (26,27)") {
  PopulationSpec pop = fixture_spec("ex2.json");
  // tau^a = 107/4, 41/4; tau^c = 47/2, 63/2, 163/4
  CHECK(benchmark_types_from_bounds(pop, 26, 27) == BenchmarkIndex{0, 2, 2, 1});
}

TEST_CASE("benchmark_types_from_bounds: each index is the extreme one with its property") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng));
    for (int S = 0; S <= pop.n(); ++S)
      for (int L = S; L <= pop.n(); L += 3) {
        BenchmarkIndex xi = benchmark_types_from_bounds(pop, S, L);
        std::vector<int> j1, j2, j2p, j1p;
        for (int j = 0; j <= pop.b() + 1; ++j) {
          if (pop.temper_a(j) > L) j1.push_back(j);
          if (pop.temper_a(j) < S) j2.push_back(j);
        }
        for (int j = 0; j <= pop.b_prime() + 1; ++j) {
          if (pop.temper_c(j) > L) j2p.push_back(j);
          if (pop.temper_c(j) < S) j1p.push_back(j);
        }
        CHECK(xi.j1 == *std::max_element(j1.begin(), j1.end()));
        CHECK(xi.j2 == *std::min_element(j2.begin(), j2.end()));
        CHECK(xi.j2p == *std::min_element(j2p.begin(), j2p.end()));
        CHECK(xi.j1p == *std::max_element(j1p.begin(), j1p.end()));
        CHECK(is_valid_index(pop, xi));
      }
    // with every temper strictly inside (0,n) the extreme bounds pin the sentinels
    bool inside = true;
    for (int j = 1; j <= pop.b(); ++j) inside = inside && pop.temper_a(j) > 0 && pop.temper_a(j) < pop.n();
    for (int j = 1; j <= pop.b_prime(); ++j) inside = inside && pop.temper_c(j) > 0 && pop.temper_c(j) < pop.n();
    if (!inside) continue;
    BenchmarkIndex zero = benchmark_types_from_bounds(pop, 0, 0);
    CHECK(zero.j2 == pop.b() + 1);
    CHECK(zero.j1p == 0);
    BenchmarkIndex full = benchmark_types_from_bounds(pop, pop.n(), pop.n());
    CHECK(full.j1 == 0);
    CHECK(full.j1p == pop.b_prime());
  }
}

TEST_CASE("membership_X") {
  PopulationSpec ex2 = fixture_spec("ex2.json");
  CHECK(membership_X(ex2, {0, 1, 1, 0}, all_defect(ex2)));
  CHECK_FALSE(membership_X(ex2, {0, 2, 3, 1}, refinements(ex2, {14, 9, 0, 0, 0, 0}).front()));
}

TEST_CASE("oracle minimal invariant sets lie in X of their benchmark types") {
  for (const char* name : {"ex2.json", "ex7_2.json", "ex7_3.json", "ex1.json"}) {
    PopulationSpec pop = fixture_spec(name);
    TransitionDigraph g = build_transition_digraph(pop, 10'000'000);
    for (const auto& s : minimal_invariant_sets(g)) {
      BenchmarkIndex xi = benchmark_types_from_bounds(pop, s.min_cooperators, s.max_cooperators);
      for (auto v : s.states) {
        State x = g.space.state(v);
        CHECK(membership_X(pop, xi, x));
        CHECK(membership_I(pop, xi, x));
      }
    }
  }
}

TEST_CASE("is_invariant_X matches closure on ex2 and ex7_3") {
  for (const char* name : {"ex7_3.json", "ex7_2.json"}) {
    PopulationSpec pop = fixture_spec(name);
    for (const BenchmarkIndex& idx : benchmark_index_set(pop))
      CHECK(is_invariant_X(pop, idx) ==
            closed_by_rules(pop, [&](const State& x) { return membership_X(pop, idx, x); }));
  }
  PopulationSpec ex2 = fixture_spec("ex2.json");
  TransitionDigraph g = build_transition_digraph(ex2, 10'000'000);
  BenchmarkIndex idx{0, 2, 3, 1};
  std::vector<bool> member(g.node_count());
  for (std::uint64_t v = 0; v < g.node_count(); ++v) member[v] = membership_X(ex2, idx, g.space.state(v));
  CHECK(is_invariant_X(ex2, idx) == closed_under_steps(g, member, nullptr));
}

TEST_CASE("is_invariant_X: extreme index and a constructed violation") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 40; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 10));
    BenchmarkIndex all{pop.b(), pop.b() + 1, pop.b_prime() + 1, pop.b_prime()};
    CHECK(is_invariant_X(pop, all) ==
          closed_by_rules(pop, [&](const State& x) { return membership_X(pop, all, x); }));
  }
  // m + everything below j2 exceeds tau_1^a: the imitators alone can push the count past it
  RawPopulation raw;
  raw.anticoordinating = {temper_type(Kind::anticoordinating, q("5/2"), 2, 4)};
  raw.coordinating = {temper_type(Kind::coordinating, q("1/2"), 1)};
  PopulationSpec pop = validate_population(raw);
  BenchmarkIndex idx{0, 1, 1, 0};
  CHECK(pop.m() + 0 > pop.temper_a(1));
  CHECK_FALSE(is_invariant_X(pop, idx));
  CHECK_FALSE(closed_by_rules(pop, [&](const State& x) { return membership_X(pop, idx, x); }));
}

TEST_CASE("is_invariant_S: ex2 index (0,2,3,1) matches closure") {
  PopulationSpec pop = fixture_spec("ex2.json");
  BenchmarkIndex idx{0, 2, 3, 1};
  SInvarianceReport rep = analyze_S(pop, idx, 10'000'000);
  REQUIRE(rep.nonempty);
  TransitionDigraph g = build_transition_digraph(pop, 10'000'000);
  std::vector<bool> member(g.node_count());
  for (std::uint64_t v = 0; v < g.node_count(); ++v) member[v] = membership_S(pop, idx, g.space.state(v));
  CHECK(rep.invariant == closed_under_steps(g, member, nullptr));
  CHECK(rep.invariant == is_invariant_S(pop, idx, 10'000'000));
}

TEST_CASE("is_invariant_S: ex7_2 set around the non-singleton class") {
  PopulationSpec pop = fixture_spec("ex7_2.json");
  TransitionDigraph g = build_transition_digraph(pop);
  const auto sets = minimal_invariant_sets(g);
  const InvariantSetResult& omega = only_non_singleton(sets);
  BenchmarkIndex xi = benchmark_types_from_bounds(pop, omega.min_cooperators, omega.max_cooperators);
  SInvarianceReport rep = analyze_S(pop, xi);
  REQUIRE(rep.nonempty);
  for (auto v : omega.states) CHECK(membership_S(pop, xi, g.space.state(v)));
  CHECK(rep.invariant);
  CHECK(closed_by_rules(pop, [&](const State& x) { return membership_S(pop, xi, x); }));
}

TEST_CASE("is_invariant_S short-circuit arms") {
  std::mt19937_64 rng(53);
  int seen = 0;
  for (int trial = 0; trial < 200 && seen < 20; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 10));
    for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
      SInvarianceReport rep = analyze_S(pop, idx);
      if (!rep.nonempty || !rep.low_short_circuit || !rep.high_short_circuit) continue;
      ++seen;
      CHECK(rep.invariant);
      CHECK(Rational(fixed_cooperators(pop, idx)) >= ceil_int(tau_max(pop, idx)));
      CHECK(Rational(max_cooperators(pop, idx)) <= floor_int(tau_min(pop, idx)));
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("empty S is refused") {
  std::mt19937_64 rng(59);
  int seen = 0;
  for (int trial = 0; trial < 50; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 10));
    for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
      if (analyze_S(pop, idx).nonempty) continue;
      ++seen;
      CHECK_THROWS_AS(is_invariant_S(pop, idx), EmptySet);
      bool any = false;
      for (const State& x : all_states(pop)) any = any || membership_S(pop, idx, x);
      CHECK_FALSE(any);
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("membership_I") {
  PopulationSpec ex2 = fixture_spec("ex2.json");
  // no wandering nonconformists when j2 = j1 + 1
  BenchmarkIndex idx{0, 1, 3, 1};
  for (const State& x : states_of_X(ex2, idx, -1, 10'000'000)) CHECK(membership_I(ex2, idx, x));

  TransitionDigraph g = build_transition_digraph(ex2, 10'000'000);
  const auto sets = minimal_invariant_sets(g);
  const InvariantSetResult& fluct = only_non_singleton(sets);
  BenchmarkIndex xi{0, 2, 2, 1};
  bool saw_full = false;
  for (auto v : fluct.states) {
    State x = g.space.state(v);
    CHECK(membership_I(ex2, xi, x));
    if (anticoordinating_cooperators(ex2, x, 1) == 9) {
      saw_full = true;
      CHECK(15 + 0 + 9 <= ceil_int(ex2.temper_a(1)));
    }
  }
  CHECK(saw_full);
}

TEST_CASE("states_of_X enumerates X") {
  PopulationSpec pop = fixture_spec("ex7_3.json");
  for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
    std::set<State> listed;
    for (const State& x : states_of_X(pop, idx, -1)) listed.insert(x);
    std::set<State> direct;
    for (const State& x : all_states(pop))
      if (membership_X(pop, idx, x)) direct.insert(x);
    CHECK(listed == direct);
  }
}

TEST_CASE("necessary conditions: ex2 fluctuation set") {
  PopulationSpec pop = fixture_spec("ex2.json");
  TransitionDigraph g = build_transition_digraph(pop, 10'000'000);
  const auto sets = minimal_invariant_sets(g);
  const InvariantSetResult& fluct = only_non_singleton(sets);
  CHECK(fluct.min_cooperators == 26);
  CHECK(fluct.max_cooperators == 27);
  NecessaryConditionReport rep = verify_necessary_conditions(g, fluct);
  CHECK(rep.xi == BenchmarkIndex{0, 2, 2, 1});
  CHECK(rep.inside_X.pass);
  CHECK(rep.extremes.pass);
  CHECK(rep.wandering_nonconformists.pass);
  CHECK(rep.inside_I.pass);
  CHECK_FALSE(rep.wandering_nonconformists.vacuous);
}

TEST_CASE("necessary conditions: ex7_2 and ex7_3 classes, singleton refused") {
  for (const char* name : {"ex7_2.json", "ex7_3.json", "ex3.json", "ex1.json"}) {
    PopulationSpec pop = fixture_spec(name);
    TransitionDigraph g = build_transition_digraph(pop, 10'000'000);
    for (const auto& s : minimal_invariant_sets(g)) {
      if (s.singleton) {
        CHECK_THROWS(verify_necessary_conditions(g, s));
        continue;
      }
      NecessaryConditionReport rep = verify_necessary_conditions(g, s);
      CHECK_MESSAGE(rep.all_pass(), name);
      CHECK(rep.inside_X.pass);
      CHECK(rep.inside_I.pass);
    }
  }
}

TEST_CASE("an invariant X contains a minimal invariant set") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 10));
    TransitionDigraph g = build_transition_digraph(pop);
    const auto sets = minimal_invariant_sets(g);
    for (const BenchmarkIndex& idx : benchmark_index_set(pop)) {
      if (!is_invariant_X(pop, idx)) continue;
      bool inside = false;
      for (const auto& s : sets) {
        bool all = true;
        for (auto v : s.states) all = all && membership_X(pop, idx, g.space.state(v));
        inside = inside || all;
      }
      CHECK(inside);
    }
  }
}

}  // TEST_SUITE
