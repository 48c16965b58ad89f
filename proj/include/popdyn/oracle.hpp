#pragma once

#include "popdyn/graph.hpp"
#include "popdyn/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace popdyn {

inline constexpr std::uint64_t kDefaultMaxStates = 1'000'000;

// POPDYN_MAX_STATES when set to a positive integer, otherwise `fallback`.
std::uint64_t max_states_from_env(std::uint64_t fallback = kDefaultMaxStates);

class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAnEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mixed-radix indexing over the cells; the last cell varies fastest.
class StateSpace {
 public:
  explicit StateSpace(const PopulationSpec& pop);

  std::uint64_t size() const { return size_; }
  std::uint64_t index(const State& x) const;
  State state(std::uint64_t i) const;
  std::uint64_t stride(std::size_t cell) const { return strides_[cell]; }
  const std::vector<int>& capacities() const { return caps_; }

 private:
  std::vector<int> caps_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 1;
};

struct TransitionDigraph {
  PopulationSpec pop;
  StateSpace space;
  Csr adjacency;
  std::vector<std::uint16_t> cooperators;  // n^C per state

  std::size_t node_count() const { return adjacency.node_count(); }
  std::span<const std::uint32_t> successors(std::uint64_t i) const { return adjacency.successors(i); }
};

TransitionDigraph build_transition_digraph(const PopulationSpec& pop,
                                           std::uint64_t max_states = kDefaultMaxStates,
                                           unsigned threads = 1);

struct InvariantSetResult {
  std::vector<std::uint32_t> states;  // sorted state indices
  bool singleton = false;
  int min_cooperators = 0;
  int max_cooperators = 0;
};

std::vector<InvariantSetResult> minimal_invariant_sets(const TransitionDigraph& g);

bool is_equilibrium_oracle(const TransitionDigraph& g, const State& x);
bool is_stable_oracle(const TransitionDigraph& g, const State& eq);
std::vector<std::uint32_t> reachable_set(const TransitionDigraph& g, const State& from);

// One line per state: "index: succ1 succ2 ...".
void write_adjacency(std::ostream& out, const TransitionDigraph& g);

}  // namespace popdyn
