#include "support.hpp"

#include "popdyn/stochastic.hpp"

#include <doctest.h>

#include <map>
#include <queue>
#include <sstream>

using namespace testing;

namespace {

// Sink components by brute force: x is in a sink component iff everything reachable from x reaches x back.
std::set<std::set<std::uint32_t>> sinks_by_closure(const TransitionDigraph& g) {
  const auto n = static_cast<std::uint32_t>(g.node_count());
  std::vector<std::vector<bool>> reach(n);
  for (std::uint32_t s = 0; s < n; ++s) {
    reach[s].assign(n, false);
    std::queue<std::uint32_t> todo;
    reach[s][s] = true;
    todo.push(s);
    while (!todo.empty()) {
      auto v = todo.front();
      todo.pop();
      for (auto w : g.successors(v))
        if (!reach[s][w]) reach[s][w] = true, todo.push(w);
    }
  }
  std::set<std::set<std::uint32_t>> out;
  for (std::uint32_t s = 0; s < n; ++s) {
    bool sink = true;
    std::set<std::uint32_t> members;
    for (std::uint32_t t = 0; t < n && sink; ++t)
      if (reach[s][t]) {
        sink = reach[t][s];
        members.insert(t);
      }
    if (sink) out.insert(members);
  }
  return out;
}

State refined(const char* fixture_name, RefinedState s) {
  BinaryTypePopulation bpop(fixture_spec(fixture_name));
  return bpop.to_state(s);
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("successor sets match the update rules") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 11));
    TransitionDigraph g = build_transition_digraph(pop);
    REQUIRE(g.node_count() == refined_state_space_size(pop));
    for (std::uint64_t v = 0; v < g.node_count(); ++v) {
      State x = g.space.state(v);
      CHECK(g.space.index(x) == v);
      std::set<State> expected = successors_by_rules(pop, x);
      std::set<State> got;
      for (auto w : g.successors(v)) got.insert(g.space.state(w));
      CHECK(got == expected);
      CHECK(g.cooperators[v] == x.cooperators());
    }
  }
}

TEST_CASE("threaded construction gives the same graph") {
  PopulationSpec pop = fixture_spec("ex7_3.json");
  TransitionDigraph a = build_transition_digraph(pop, kDefaultMaxStates, 1);
  TransitionDigraph b = build_transition_digraph(pop, kDefaultMaxStates, 3);
  CHECK(a.adjacency.offsets == b.adjacency.offsets);
  CHECK(a.adjacency.targets == b.adjacency.targets);
}

TEST_CASE("node counts") {
  CHECK(build_transition_digraph(fixture_spec("ex7_2.json")).node_count() == 72);
  PopulationSpec ex1 = fixture_spec("ex1.json");
  CHECK(build_transition_digraph(ex1, 2'000'000).node_count() == state_space_size(ex1));

  RawPopulation one;
  one.coordinating = {temper_type(Kind::coordinating, q("1/2"), 1)};
  TransitionDigraph g = build_transition_digraph(validate_population(one));
  REQUIRE(g.node_count() == 2);
  for (std::uint64_t v = 0; v < 2; ++v) CHECK(g.successors(v).size() == 1);
}

TEST_CASE("guard refuses oversized spaces") {
  CHECK_THROWS_AS(build_transition_digraph(fixture_spec("ex1.json"), 1000), StateSpaceTooLarge);
}

TEST_CASE("minimal invariant sets agree with brute-force closure") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 9));
    TransitionDigraph g = build_transition_digraph(pop);
    std::set<std::set<std::uint32_t>> got;
    for (const auto& s : minimal_invariant_sets(g)) {
      got.insert(std::set<std::uint32_t>(s.states.begin(), s.states.end()));
      CHECK(s.singleton == (s.states.size() == 1));
    }
    CHECK(got == sinks_by_closure(g));
  }
}

TEST_CASE("ex7_2: four equilibria and one non-singleton set") {
  PopulationSpec pop = fixture_spec("ex7_2.json");
  TransitionDigraph g = build_transition_digraph(pop);
  BinaryTypePopulation bpop(pop);
  int singletons = 0;
  std::set<RefinedState> omega;
  for (const auto& s : minimal_invariant_sets(g)) {
    if (s.singleton) {
      ++singletons;
      continue;
    }
    for (auto v : s.states) omega.insert(bpop.from_state(g.space.state(v)));
  }
  CHECK(singletons == 4);
  CHECK(omega == std::set<RefinedState>{{2, 0, 2, 0}, {2, 1, 2, 0}});
}

TEST_CASE("ex7_3: five minimal invariant sets, four of them equilibria") {
  TransitionDigraph g = build_transition_digraph(fixture_spec("ex7_3.json"));
  auto sets = minimal_invariant_sets(g);
  CHECK(sets.size() == 5);
  CHECK(std::count_if(sets.begin(), sets.end(), [](const auto& s) { return s.singleton; }) == 4);
}

TEST_CASE("ex3: no equilibrium, one set with bounds 21..35") {
  TransitionDigraph g = build_transition_digraph(fixture_spec("ex3.json"), 10'000'000);
  auto sets = minimal_invariant_sets(g);
  REQUIRE(sets.size() == 1);
  CHECK_FALSE(sets[0].singleton);
  CHECK(sets[0].min_cooperators == 21);
  CHECK(sets[0].max_cooperators == 35);
}

TEST_CASE("non-singleton minimal invariant sets are strongly connected") {
  for (const char* name : {"ex7_2.json", "ex7_3.json", "ex2.json"}) {
    TransitionDigraph g = build_transition_digraph(fixture_spec(name), 10'000'000);
    for (const auto& s : minimal_invariant_sets(g)) {
      if (s.singleton) continue;
      std::vector<bool> from_first = forward_closure(g.adjacency, {s.states.front()});
      for (auto v : s.states) {
        CHECK(from_first[v]);
        CHECK(forward_closure(g.adjacency, {v})[s.states.front()]);
      }
      std::size_t reached = std::count(from_first.begin(), from_first.end(), true);
      CHECK(reached == s.states.size());
    }
  }
}

TEST_CASE("every state reaches a minimal invariant set") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    PopulationSpec pop = validate_population(random_population(rng, 10));
    TransitionDigraph g = build_transition_digraph(pop);
    std::vector<int> owner(g.node_count(), -1);
    auto sets = minimal_invariant_sets(g);
    for (std::size_t k = 0; k < sets.size(); ++k)
      for (auto v : sets[k].states) {
        CHECK(owner[v] == -1);
        owner[v] = static_cast<int>(k);
      }
    for (std::uint64_t v = 0; v < g.node_count(); ++v) {
      auto seen = forward_closure(g.adjacency, {static_cast<std::uint32_t>(v)});
      bool hits = false;
      for (std::uint64_t w = 0; w < seen.size() && !hits; ++w) hits = seen[w] && owner[w] >= 0;
      CHECK(hits);
    }
  }
}

TEST_CASE("is_equilibrium_oracle: ex1") {
  PopulationSpec pop = fixture_spec("ex1.json");
  TransitionDigraph g = build_transition_digraph(pop, 2'000'000);
  CHECK(is_equilibrium_oracle(g, refinements(pop, {0, 9, 0, 0, 0, 15}).front()));
  CHECK_FALSE(is_equilibrium_oracle(g, all_cooperate(pop)));
}

TEST_CASE("is_stable_oracle") {
  PopulationSpec ex2 = fixture_spec("ex2.json");
  TransitionDigraph g2 = build_transition_digraph(ex2, 10'000'000);
  CHECK_FALSE(is_stable_oracle(g2, refinements(ex2, {14, 9, 0, 0, 0, 0}).front()));
  CHECK_THROWS_AS(is_stable_oracle(g2, all_defect(ex2)), NotAnEquilibrium);

  RawPopulation single;
  single.coordinating = {temper_type(Kind::coordinating, q("3/2"), 4, 1)};
  PopulationSpec pop = validate_population(single);
  TransitionDigraph g = build_transition_digraph(pop);
  REQUIRE(is_equilibrium_oracle(g, all_defect(pop)));
  CHECK(is_stable_oracle(g, all_defect(pop)));

  TransitionDigraph g71 = build_transition_digraph(fixture_spec("ex7_1.json"));
  CHECK(is_stable_oracle(g71, refined("ex7_1.json", {0, 1, 0, 0})));
}

TEST_CASE("reachable_set") {
  PopulationSpec pop = fixture_spec("ex2.json");
  TransitionDigraph g = build_transition_digraph(pop, 10'000'000);
  State eq = refinements(pop, {14, 9, 0, 0, 0, 0}).front();
  auto self = reachable_set(g, eq);
  REQUIRE(self.size() == 1);
  CHECK(self[0] == g.space.index(eq));

  auto from_zero = reachable_set(g, all_defect(pop));
  std::set<std::uint32_t> reach(from_zero.begin(), from_zero.end());
  CHECK(reach.count(g.space.index(eq)));
  for (const auto& s : minimal_invariant_sets(g))
    for (auto v : s.states) CHECK(reach.count(v));
}

TEST_CASE("adjacency export") {
  TransitionDigraph g = build_transition_digraph(fixture_spec("ex7_2.json"));
  std::ostringstream out;
  write_adjacency(out, g);
  std::istringstream in(out.str());
  std::string line;
  std::uint64_t v = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string head;
    row >> head;
    CHECK(head == std::to_string(v) + ":");
    std::vector<std::uint32_t> succ;
    std::uint32_t w;
    while (row >> w) succ.push_back(w);
    auto span = g.successors(v);
    CHECK(succ == std::vector<std::uint32_t>(span.begin(), span.end()));
    ++v;
  }
  CHECK(v == 72);
}

}  // TEST_SUITE
