#pragma once

#include "popdyn/model.hpp"
#include "popdyn/oracle.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace popdyn {

// (j1, j2, j2', j1'): anticoordinating types 1..j1 and coordinating types 1..j1' cooperate,
// anticoordinating types j2..b and coordinating types j2'..b' defect, the rest wander.
struct BenchmarkIndex {
  int j1 = 0;
  int j2 = 1;
  int j2p = 1;
  int j1p = 0;
  auto operator<=>(const BenchmarkIndex&) const = default;
};

std::string format_index(const BenchmarkIndex& idx);
bool is_valid_index(const PopulationSpec& pop, const BenchmarkIndex& idx);
std::vector<BenchmarkIndex> benchmark_index_set(const PopulationSpec& pop);

BenchmarkIndex benchmark_types_from_bounds(const PopulationSpec& pop, int S, int L);

Rational tau_max(const PopulationSpec& pop, const BenchmarkIndex& idx);  // max(tau^a_{j2}, tau^c_{j1'})
Rational tau_min(const PopulationSpec& pop, const BenchmarkIndex& idx);  // min(tau^a_{j1}, tau^c_{j2'})
int fixed_cooperators(const PopulationSpec& pop, const BenchmarkIndex& idx);
int max_cooperators(const PopulationSpec& pop, const BenchmarkIndex& idx);

bool membership_X(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x);
bool is_invariant_X(const PopulationSpec& pop, const BenchmarkIndex& idx);

bool membership_S(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x);

class EmptySet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SInvarianceReport {
  bool necessary_nonempty = false;  // the two count-vs-threshold inequalities
  bool nonempty = false;            // some integer count in (tau^max, tau^min) is reachable in X
  bool low_short_circuit = false;   // fixed cooperators >= ceil(tau^max)
  bool low_highest_earner = false;  // cooperator among the maximizers wherever an imitator cooperates, n^C = ceil(tau^max)
  bool low_brackets = false;        // tau^c_{j2'-1} < ceil(tau^max) < tau^a_{j2-1}
  bool high_short_circuit = false;  // max cooperators <= floor(tau^min)
  bool high_highest_earner = false;  // defector among the maximizers wherever an imitator defects, n^C = floor(tau^min)
  bool high_brackets = false;       // tau^a_{j1+1} < floor(tau^min) < tau^c_{j1'+1}
  bool condition_low = false;
  bool condition_high = false;
  bool invariant = false;
  std::uint64_t states_checked = 0;
};

// Theorem-based test for S; enumerates states of S at the two extreme counts.
SInvarianceReport analyze_S(const PopulationSpec& pop, const BenchmarkIndex& idx,
                            std::uint64_t max_states = kDefaultMaxStates);
// Throws EmptySet when S has no state.
bool is_invariant_S(const PopulationSpec& pop, const BenchmarkIndex& idx,
                    std::uint64_t max_states = kDefaultMaxStates);

bool membership_I(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x);

// States of X (refined) with the given cooperator count, or all of X when count < 0.
std::vector<State> states_of_X(const PopulationSpec& pop, const BenchmarkIndex& idx, int count,
                               std::uint64_t max_states = kDefaultMaxStates);

struct ConditionCheck {
  bool pass = true;
  bool vacuous = false;
  std::string witness;  // first offending state or type when failing
};

struct NecessaryConditionReport {
  BenchmarkIndex xi;
  ConditionCheck inside_X;           // O within X_xi
  ConditionCheck extremes;           // wandering conformists all defect at min n^C, all cooperate at max
  ConditionCheck wandering_nonconformists;  // each wandering anticoordinating type moves and is not frozen
  ConditionCheck inside_I;           // O within I_xi
  bool all_pass() const { return inside_X.pass && extremes.pass && wandering_nonconformists.pass && inside_I.pass; }
};

// Precondition: the set is a non-singleton oracle minimal invariant set.
NecessaryConditionReport verify_necessary_conditions(const TransitionDigraph& g, const InvariantSetResult& set);

}  // namespace popdyn
