#pragma once

#include "popdyn/model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace popdyn {

struct CandidateIndex {
  int r = 0;
  int j1 = 0;
  int j1p = 0;
  auto operator<=>(const CandidateIndex&) const = default;
};

enum class EquilibriumKind { defection, cooperation, mixed };
const char* to_string(EquilibriumKind k);

// The four conditions of the equilibrium test, each evaluated at n_{r,j1,j1'}.
struct CandidateConditions {
  bool anticoordinating_tempers = false;  // tau^a_{j1+1} < n < tau^a_{j1}
  bool coordinating_tempers = false;      // tau^c_{j1'} < n < tau^c_{j1'+1}
  bool cooperator_top = false;            // r > 0  =>  C_{j1,j1'} >= D_{j1+1,j1'+1}
  bool defector_top = false;              // r < m  =>  C_{j1,j1'} <= D_{j1+1,j1'+1}
  bool all() const { return anticoordinating_tempers && coordinating_tempers && cooperator_top && defector_top; }
};

struct EquilibriumRecord {
  CandidateIndex candidate;
  std::vector<int> state;  // pooled (x^I, x^a_1..x^a_b, x^c_{b'}..x^c_1)
  int cooperators = 0;
  EquilibriumKind kind = EquilibriumKind::defection;
  CandidateConditions conditions;
};

// sup of u^C over anticoordinating types 1..j and coordinating types 1..k.
ExtendedRational sup_C(const PopulationSpec& pop, int j, int k, std::int64_t nC);
// sup of u^D over anticoordinating types j..b and coordinating types k..b'.
ExtendedRational sup_D(const PopulationSpec& pop, int j, int k, std::int64_t nC);

int candidate_cooperators(const PopulationSpec& pop, const CandidateIndex& idx);
std::vector<int> candidate_state(const PopulationSpec& pop, const CandidateIndex& idx);
CandidateConditions evaluate_candidate(const PopulationSpec& pop, const CandidateIndex& idx);

std::vector<EquilibriumRecord> enumerate_equilibria(const PopulationSpec& pop);

class AssumptionViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StabilityVerdict {
  bool stable = false;
  std::string rule;           // "general", "all-defect", "all-cooperate"
  std::string failed_clause;  // empty when stable
  // All-cooperate case only: the verdict under the printed tau_b^c subscript, when that index exists.
  std::optional<bool> printed_subscript_reading;
  // Set when the closed form was evaluated outside the closed form's count assumptions.
  std::optional<std::string> assumption_violation;
};

enum class AssumptionPolicy { enforce, evaluate_anyway };

// The first violated count assumption (every n_i^a, n_i^c >= 2 and m >= 1), if any.
std::optional<std::string> stability_assumption_violation(const PopulationSpec& pop);

// Under AssumptionPolicy::enforce, throws AssumptionViolated when the count assumptions fail.
StabilityVerdict classify_stability(const PopulationSpec& pop, const EquilibriumRecord& rec,
                                    AssumptionPolicy policy = AssumptionPolicy::enforce);

bool is_exclusive_cooperation_preserving(const PopulationSpec& pop, const State& x);

}  // namespace popdyn
