#include "popdyn/equilibria.hpp"

#include "popdyn/dynamics.hpp"

namespace popdyn {

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::defection: return "defection";
    case EquilibriumKind::cooperation: return "cooperation";
    case EquilibriumKind::mixed: return "mixed";
  }
  return "";
}

ExtendedRational sup_C(const PopulationSpec& pop, int j, int k, std::int64_t nC) {
  ExtendedRational s;
  for (int i = 1; i <= j; ++i) s.raise_to(pop.type({Kind::anticoordinating, i}).cooperator.at(nC));
  for (int i = 1; i <= k; ++i) s.raise_to(pop.type({Kind::coordinating, i}).cooperator.at(nC));
  return s;
}

ExtendedRational sup_D(const PopulationSpec& pop, int j, int k, std::int64_t nC) {
  ExtendedRational s;
  for (int i = std::max(j, 1); i <= pop.b(); ++i) s.raise_to(pop.type({Kind::anticoordinating, i}).defector.at(nC));
  for (int i = std::max(k, 1); i <= pop.b_prime(); ++i) s.raise_to(pop.type({Kind::coordinating, i}).defector.at(nC));
  return s;
}

int candidate_cooperators(const PopulationSpec& pop, const CandidateIndex& idx) {
  int total = idx.r;
  for (int i = 1; i <= idx.j1; ++i) total += pop.count_a(i);
  for (int i = 1; i <= idx.j1p; ++i) total += pop.count_c(i);
  return total;
}

std::vector<int> candidate_state(const PopulationSpec& pop, const CandidateIndex& idx) {
  std::vector<int> v{idx.r};
  for (int i = 1; i <= pop.b(); ++i) v.push_back(i <= idx.j1 ? pop.count_a(i) : 0);
  for (int i = pop.b_prime(); i >= 1; --i) v.push_back(i <= idx.j1p ? pop.count_c(i) : 0);
  return v;
}

namespace {

struct Tops {
  bool cooperator;
  bool defector;
};

Tops highest_earner_tests(const PopulationSpec& pop, const CandidateIndex& idx, std::int64_t nC) {
  ExtendedRational c = sup_C(pop, idx.j1, idx.j1p, nC);
  ExtendedRational d = sup_D(pop, idx.j1 + 1, idx.j1p + 1, nC);
  return {idx.r == 0 || c >= d, idx.r == pop.m() || c <= d};
}

}  // namespace

CandidateConditions evaluate_candidate(const PopulationSpec& pop, const CandidateIndex& idx) {
  const Rational n = candidate_cooperators(pop, idx);
  CandidateConditions cond;
  cond.anticoordinating_tempers = pop.temper_a(idx.j1 + 1) < n && n < pop.temper_a(idx.j1);
  cond.coordinating_tempers = pop.temper_c(idx.j1p) < n && n < pop.temper_c(idx.j1p + 1);
  Tops t = highest_earner_tests(pop, idx, candidate_cooperators(pop, idx));
  cond.cooperator_top = t.cooperator;
  cond.defector_top = t.defector;
  return cond;
}

std::vector<EquilibriumRecord> enumerate_equilibria(const PopulationSpec& pop) {
  std::vector<EquilibriumRecord> out;
  for (int r = 0; r <= pop.m(); ++r)
    for (int j1 = 0; j1 <= pop.b(); ++j1)
      for (int j1p = 0; j1p <= pop.b_prime(); ++j1p) {
        CandidateIndex idx{r, j1, j1p};
        CandidateConditions cond = evaluate_candidate(pop, idx);
        if (!cond.all()) continue;
        EquilibriumRecord rec;
        rec.candidate = idx;
        rec.state = candidate_state(pop, idx);
        rec.cooperators = candidate_cooperators(pop, idx);
        rec.kind = r == 0 ? EquilibriumKind::defection
                          : (r == pop.m() ? EquilibriumKind::cooperation : EquilibriumKind::mixed);
        rec.conditions = cond;
        out.push_back(std::move(rec));
      }
  return out;
}

std::optional<std::string> stability_assumption_violation(const PopulationSpec& pop) {
  if (pop.m() < 1) return "stability closed forms need at least one imitator";
  for (int i = 1; i <= pop.b(); ++i)
    if (pop.count_a(i) < 2) return "anticoordinating type " + std::to_string(i) + " has fewer than 2 best-responders";
  for (int i = 1; i <= pop.b_prime(); ++i)
    if (pop.count_c(i) < 2) return "coordinating type " + std::to_string(i) + " has fewer than 2 best-responders";
  return std::nullopt;
}

namespace {

StabilityVerdict closed_form_stability(const PopulationSpec& pop, const EquilibriumRecord& rec) {
  const CandidateIndex& idx = rec.candidate;
  const int nC = rec.cooperators;
  const Rational n = nC;
  StabilityVerdict v;

  if (idx.r == 0 && idx.j1 == 0 && idx.j1p == 0) {
    v.rule = "all-defect";
    v.stable = pop.temper_c(1) > 1;
    if (!v.stable) v.failed_clause = "tau^c_1 > 1";
    return v;
  }
  if (idx.r == pop.m() && idx.j1 == pop.b() && idx.j1p == pop.b_prime()) {
    v.rule = "all-cooperate";
    v.stable = Rational(pop.n()) > pop.temper_c(pop.b_prime()) + 1;
    if (!v.stable) v.failed_clause = "n > tau^c_{b'} + 1";
    if (pop.b() <= pop.b_prime() + 1)
      v.printed_subscript_reading = Rational(pop.n()) > pop.temper_c(pop.b()) + 1;
    return v;
  }

  v.rule = "general";
  v.stable = true;
  if (!(pop.temper_a(idx.j1 + 1) + 1 < n && n < pop.temper_a(idx.j1) - 1)) {
    v.stable = false;
    v.failed_clause = "tau^a_{j1+1} + 1 < n < tau^a_{j1} - 1";
    return v;
  }
  if (!(pop.temper_c(idx.j1p) + 1 < n && n < pop.temper_c(idx.j1p + 1) - 1)) {
    v.stable = false;
    v.failed_clause = "tau^c_{j1'} + 1 < n < tau^c_{j1'+1} - 1";
    return v;
  }
  for (int k : {nC - 1, nC, nC + 1}) {
    Tops t = highest_earner_tests(pop, idx, k);
    if (!t.defector) {
      v.stable = false;
      v.failed_clause = "C <= D at nC = " + std::to_string(k);
      return v;
    }
    if (!t.cooperator) {
      v.stable = false;
      v.failed_clause = "C >= D at nC = " + std::to_string(k);
      return v;
    }
  }
  return v;
}

}  // namespace

StabilityVerdict classify_stability(const PopulationSpec& pop, const EquilibriumRecord& rec, AssumptionPolicy policy) {
  std::optional<std::string> violation = stability_assumption_violation(pop);
  if (violation && policy == AssumptionPolicy::enforce) throw AssumptionViolated(*violation);
  StabilityVerdict v = closed_form_stability(pop, rec);
  v.assumption_violation = violation;
  return v;
}

bool is_exclusive_cooperation_preserving(const PopulationSpec& pop, const State& x) {
  const int nC = x.cooperators();
  const auto& cells = pop.cells();
  bool imitator_inside = false, imitator_outside = false;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    bool has_c = x.counts[c] > 0, has_d = x.counts[c] < cells[c].capacity;
    if (cells[c].role == Role::imitator) {
      imitator_inside |= has_c;
      imitator_outside |= has_d;
      continue;
    }
    const AgentTypeSpec& t = pop.type(cells[c].type);
    if (has_c && best_response_next(t.kind, t.temper, Strategy::cooperate, nC) != Strategy::cooperate) return false;
    if (has_d && best_response_next(t.kind, t.temper, Strategy::defect, nC) != Strategy::defect) return false;
  }
  HighestEarners h = highest_earners(pop, x);
  if (imitator_inside && !(h.cooperators >= h.defectors)) return false;
  if (imitator_outside && !(h.defectors >= h.cooperators)) return false;
  return true;
}

}  // namespace popdyn
