#pragma once

#include "popdyn/config.hpp"
#include "popdyn/graph.hpp"
#include "popdyn/model.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace popdyn {

inline constexpr int kInfiniteCost = std::numeric_limits<int>::max() / 4;

struct RefinedState {
  int x1I = 0;  // cooperating anticoordinating imitators
  int xa = 0;   // cooperating nonconformists
  int x2I = 0;  // cooperating coordinating imitators
  int xc = 0;   // cooperating conformists
  auto operator<=>(const RefinedState&) const = default;
  int cooperators() const { return x1I + xa + x2I + xc; }
};

std::string format_state(const RefinedState& s);

class NotBinaryType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotMixed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BinaryTypePopulation {
 public:
  // One anticoordinating and one coordinating type, each with >= 1 imitator and >= 1
  // best-responder. Weights default to 1/n per agent.
  BinaryTypePopulation(PopulationSpec spec, std::optional<ActivationWeights> weights = std::nullopt);

  const PopulationSpec& spec() const { return spec_; }
  int ma() const { return ma_; }
  int na() const { return na_; }
  int mc() const { return mc_; }
  int nc() const { return nc_; }
  int m() const { return ma_ + mc_; }
  int n() const { return spec_.n(); }
  const ActivationWeights& weights() const { return weights_; }

  std::size_t state_count() const;
  std::size_t index(const RefinedState& s) const;
  RefinedState state(std::size_t i) const;
  bool contains(const RefinedState& s) const;

  State to_state(const RefinedState& s) const;
  RefinedState from_state(const State& x) const;

 private:
  PopulationSpec spec_;
  ActivationWeights weights_;
  int ma_ = 0, na_ = 0, mc_ = 0, nc_ = 0;
};

// One (subpopulation, current strategy) cell at a state: its activation mass and where
// the intended and the opposite choice lead.
struct Move {
  Rational mass;
  std::uint32_t intended = 0;
  std::uint32_t opposite = 0;
};

struct PerturbedChain {
  Rational epsilon;
  std::vector<std::vector<Move>> moves;                 // per state
  Eigen::SparseMatrix<Rational, Eigen::RowMajor> P;     // P^epsilon
  Csr support;                                          // support of P^0, self-loops included

  std::size_t size() const { return moves.size(); }
};

PerturbedChain build_chain(const BinaryTypePopulation& bpop, const Rational& epsilon);

// Edges with cost 0 or 1 between distinct states; missing pairs cost infinity.
struct CostGraph {
  std::vector<std::vector<std::pair<std::uint32_t, int>>> edges;
  int edge_cost(std::uint32_t from, std::uint32_t to) const;
};

CostGraph cost_graph(const PerturbedChain& chain);

// Minimum cost of a path from U to V whose states before the last lie outside V.
// Nodes flagged in `blocked` (if given) are never entered unless they are in V.
int cost(const CostGraph& g, const std::vector<std::uint32_t>& U, const std::vector<std::uint32_t>& V,
         const std::vector<bool>* blocked = nullptr);

std::vector<std::vector<std::uint32_t>> recurrent_classes(const PerturbedChain& chain);

// Minimum weight of a spanning in-arborescence rooted at `root` of the complete digraph W.
int gamma_brute_force(const std::vector<std::vector<int>>& W, int root);
int gamma_arborescence(const std::vector<std::vector<int>>& W, int root);

struct ClassAnalysis {
  std::vector<std::vector<std::uint32_t>> classes;
  std::vector<int> class_of;                 // per state, -1 when transient
  std::vector<std::vector<std::uint32_t>> basins;
  std::vector<int> radii;                    // kInfiniteCost when the basin is everything
  std::vector<std::vector<int>> weights;     // w(i -> j) = c(Omega_i, Omega_j)
  std::vector<int> gamma;
  std::vector<int> gamma_check;              // the other algorithm, for cross-checking
  std::vector<int> stable_classes;           // argmin gamma
};

class StochasticModel {
 public:
  explicit StochasticModel(BinaryTypePopulation bpop);

  const BinaryTypePopulation& population() const { return bpop_; }
  const PerturbedChain& unperturbed() const { return chain0_; }
  const CostGraph& costs() const { return costs_; }
  const ClassAnalysis& analysis() const { return analysis_; }

  std::vector<std::uint32_t> basin(int k) const { return analysis_.basins.at(k); }
  int radius(int k) const { return analysis_.radii.at(k); }
  int gamma(int k) const { return analysis_.gamma.at(k); }
  std::vector<std::uint32_t> stochastically_stable_set() const;

  int cost_between(const std::vector<RefinedState>& U, const std::vector<RefinedState>& V) const;
  int modified_cost(std::uint32_t x, int k) const;
  int class_containing(const RefinedState& s) const;

 private:
  BinaryTypePopulation bpop_;
  PerturbedChain chain0_;
  CostGraph costs_;
  ClassAnalysis analysis_;
  std::vector<std::vector<int>> segment_;     // restricted class-to-class costs
};

struct StationaryDistribution {
  std::vector<double> probabilities;
  std::optional<std::vector<Rational>> exact;
  double residual = 0;  // || mu P - mu ||_1
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kExactSolveLimit = 500;

// Exact rational elimination up to kExactSolveLimit states, double LU with refinement above.
StationaryDistribution stationary_distribution(const PerturbedChain& chain);

RefinedState corresponding_extreme(const BinaryTypePopulation& bpop, const RefinedState& mixed);

enum class HypothesisStatus { holds, fails, vacuous };
const char* to_string(HypothesisStatus h);

struct ExtremeTheoremVerdict {
  struct Pairing {
    RefinedState mixed;
    RefinedState extreme;
    bool extreme_is_equilibrium = false;
  };
  HypothesisStatus hypothesis = HypothesisStatus::vacuous;
  std::vector<Pairing> pairings;
  std::vector<RefinedState> stable_states;
  bool stable_set_has_equilibrium = false;
  bool stable_set_has_extreme_equilibrium = false;
  bool conclusion_holds = false;
  std::string conclusion;  // "verified", "trivially consistent", "not applicable", "violated"
};

ExtremeTheoremVerdict check_extreme_theorem(const StochasticModel& model);

void write_class_dot(std::ostream& out, const StochasticModel& model);

}  // namespace popdyn
