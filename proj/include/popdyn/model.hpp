#pragma once

#include "popdyn/rational.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace popdyn {

enum class Kind { anticoordinating, coordinating };
enum class Strategy { defect, cooperate };
enum class Role { best_responder, imitator };

const char* to_string(Kind k);
const char* to_string(Role r);
inline Strategy opposite(Strategy s) {
  return s == Strategy::cooperate ? Strategy::defect : Strategy::cooperate;
}

struct PayoffMatrix {
  Rational R, S, T, P;
};

struct UtilityLine {
  Rational slope;
  Rational intercept;

  Rational at(std::int64_t nC) const { return slope * nC + intercept; }
  Rational at(const Rational& x) const { return slope * x + intercept; }
  bool operator==(const UtilityLine&) const = default;
};

struct AgentTypeSpec {
  Kind kind = Kind::anticoordinating;
  UtilityLine cooperator;
  UtilityLine defector;
  Rational temper;
  int best_responders = 0;
  int imitators = 0;

  bool operator==(const AgentTypeSpec&) const = default;
};

// Type label: kind plus 1-based index in the temper-ordered list.
struct TypeRef {
  Kind kind = Kind::anticoordinating;
  int index = 1;
  auto operator<=>(const TypeRef&) const = default;
};

enum class PopulationErrorCode {
  degenerate_payoff,
  integer_temper,
  duplicate_temper,
  empty_population,
  imitator_without_matching_type,
  kind_mismatch,
  missing_utilities,
  inconsistent_spec,
  negative_count,
};

const char* to_string(PopulationErrorCode c);

class PopulationError : public std::runtime_error {
 public:
  PopulationError(PopulationErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  PopulationErrorCode code() const { return code_; }

 private:
  PopulationErrorCode code_;
};

struct RawTypeSpec {
  std::optional<Rational> temper;
  std::optional<PayoffMatrix> payoff;
  std::optional<UtilityLine> cooperator;
  std::optional<UtilityLine> defector;
  int best_responders = 0;
  int imitators = 0;
};

struct RawPopulation {
  std::vector<RawTypeSpec> anticoordinating;
  std::vector<RawTypeSpec> coordinating;
};

// tau = n(P - S) / (R + P - S - T).
Rational temper_from_payoffs(const PayoffMatrix& matrix, int n);

// Utility lines u^C = nC(R - S) + nS, u^D = nC(T - P) + nP.
std::pair<UtilityLine, UtilityLine> utility_lines_from_payoffs(const PayoffMatrix& matrix, int n);

// A group of agents sharing role and type; the unit of the refined state.
struct Cell {
  Role role = Role::best_responder;
  TypeRef type;
  int capacity = 0;
};

class PopulationSpec {
 public:
  const std::vector<AgentTypeSpec>& types(Kind k) const {
    return k == Kind::anticoordinating ? anti_ : coord_;
  }
  const AgentTypeSpec& type(TypeRef t) const { return types(t.kind).at(t.index - 1); }

  int b() const { return static_cast<int>(anti_.size()); }
  int b_prime() const { return static_cast<int>(coord_.size()); }
  int n() const { return n_; }
  int m() const { return m_; }

  // tau_j^a for j in 0..b+1 and tau_j^c for j in 0..b'+1, sentinels at the ends.
  const Rational& temper_a(int j) const { return tau_a_.at(j); }
  const Rational& temper_c(int j) const { return tau_c_.at(j); }
  const Rational& sentinel_high() const { return tau_a_.front(); }
  const Rational& sentinel_low() const { return tau_c_.front(); }

  // Best-responder counts n_i^a, n_i^c (1-based).
  int count_a(int i) const { return anti_.at(i - 1).best_responders; }
  int count_c(int i) const { return coord_.at(i - 1).best_responders; }

  // Imitator groups first (types with imitators, anticoordinating then coordinating),
  // then one best-responder cell per type in label order a1..ab, c1..cb'.
  const std::vector<Cell>& cells() const { return cells_; }
  int imitator_group_count() const { return groups_; }
  int cell_of_best_responders(TypeRef t) const;
  int cell_of_imitators(TypeRef t) const;  // -1 when the type has no imitators

  bool operator==(const PopulationSpec& o) const { return anti_ == o.anti_ && coord_ == o.coord_; }

 private:
  friend PopulationSpec validate_population(const RawPopulation& raw);
  std::vector<AgentTypeSpec> anti_;
  std::vector<AgentTypeSpec> coord_;
  std::vector<Rational> tau_a_;
  std::vector<Rational> tau_c_;
  std::vector<Cell> cells_;
  int groups_ = 0;
  int n_ = 0;
  int m_ = 0;
};

PopulationSpec validate_population(const RawPopulation& raw);
RawPopulation to_raw(const PopulationSpec& pop);

std::pair<Rational, Rational> utilities(const AgentTypeSpec& type, std::int64_t nC);

// Pooled-imitator state space: (m+1) prod(n_i^a+1) prod(n_i^c+1).
std::uint64_t state_space_size(const PopulationSpec& pop);
// Per-cell state space actually enumerated by the oracle.
std::uint64_t refined_state_space_size(const PopulationSpec& pop);

// Cooperator counts per cell, in PopulationSpec::cells() order.
struct State {
  std::vector<int> counts;

  int cooperators() const;
  auto operator<=>(const State&) const = default;
};

State all_defect(const PopulationSpec& pop);
State all_cooperate(const PopulationSpec& pop);
bool in_bounds(const PopulationSpec& pop, const State& x);

int cooperating_imitators(const PopulationSpec& pop, const State& x);
int anticoordinating_cooperators(const PopulationSpec& pop, const State& x, int i);
int coordinating_cooperators(const PopulationSpec& pop, const State& x, int i);

// (x^I, x_1^a..x_b^a, x_{b'}^c..x_1^c).
std::vector<int> pooled(const PopulationSpec& pop, const State& x);
std::string format_tuple(const std::vector<int>& v);
std::string format_pooled(const PopulationSpec& pop, const State& x);

// All states whose pooled coordinates equal `tuple` (congruent refinements).
std::vector<State> refinements(const PopulationSpec& pop, const std::vector<int>& tuple);

// Every analysis that relies on the closed-form conditions needs each type to own
// at least one best-responder.
bool every_type_has_best_responder(const PopulationSpec& pop);

}  // namespace popdyn
