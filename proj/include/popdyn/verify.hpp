#pragma once

#include "popdyn/oracle.hpp"
#include "popdyn/stochastic.hpp"

#include <string>
#include <vector>

namespace popdyn {

// One analytic-vs-oracle comparison.
struct Check {
  std::string name;
  bool pass = true;
  std::string detail;  // first disagreement, or a short count summary
};

bool all_pass(const std::vector<Check>& checks);

// Closed-form equilibria, stability and exclusive cooperation preservation against the digraph.
std::vector<Check> verify_equilibria(const TransitionDigraph& g);

// X and S invariance against one-step closure for every benchmark index, and the
// necessary conditions on every non-singleton minimal invariant set.
std::vector<Check> verify_invariants(const TransitionDigraph& g, std::uint64_t max_states = kDefaultMaxStates);

// Chain identities at each epsilon, class structure against the oracle, gamma cross-check,
// c >= c*, and the theorem verdict.
std::vector<Check> verify_stochastic(const StochasticModel& model, const std::vector<Rational>& epsilons);

// Closure of a membership mask under the digraph; returns the first escaping edge if any.
bool closed_under_steps(const TransitionDigraph& g, const std::vector<bool>& member, std::string* witness = nullptr);

}  // namespace popdyn
