#include "popdyn/model.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace popdyn {

const char* to_string(Kind k) {
  return k == Kind::anticoordinating ? "anticoordinating" : "coordinating";
}

const char* to_string(Role r) { return r == Role::imitator ? "imitator" : "best_responder"; }

const char* to_string(PopulationErrorCode c) {
  switch (c) {
    case PopulationErrorCode::degenerate_payoff: return "DegeneratePayoff";
    case PopulationErrorCode::integer_temper: return "IntegerTemper";
    case PopulationErrorCode::duplicate_temper: return "DuplicateTemper";
    case PopulationErrorCode::empty_population: return "EmptyPopulation";
    case PopulationErrorCode::imitator_without_matching_type: return "ImitatorWithoutMatchingType";
    case PopulationErrorCode::kind_mismatch: return "KindMismatch";
    case PopulationErrorCode::missing_utilities: return "MissingUtilities";
    case PopulationErrorCode::inconsistent_spec: return "InconsistentSpec";
    case PopulationErrorCode::negative_count: return "NegativeCount";
  }
  return "PopulationError";
}

Rational temper_from_payoffs(const PayoffMatrix& mat, int n) {
  Rational denom = mat.R + mat.P - mat.S - mat.T;
  if (denom == 0)
    throw PopulationError(PopulationErrorCode::degenerate_payoff, "R + P = T + S");
  Rational tau = Rational(n) * (mat.P - mat.S) / denom;
  if (is_integer(tau))
    throw PopulationError(PopulationErrorCode::integer_temper, "temper " + to_string(tau));
  return tau;
}

std::pair<UtilityLine, UtilityLine> utility_lines_from_payoffs(const PayoffMatrix& mat, int n) {
  UtilityLine c{mat.R - mat.S, Rational(n) * mat.S};
  UtilityLine d{mat.T - mat.P, Rational(n) * mat.P};
  return {c, d};
}

std::pair<Rational, Rational> utilities(const AgentTypeSpec& type, std::int64_t nC) {
  return {type.cooperator.at(nC), type.defector.at(nC)};
}

namespace {

AgentTypeSpec normalize_type(const RawTypeSpec& raw, Kind listed, int n, const std::string& label) {
  if (raw.best_responders < 0 || raw.imitators < 0)
    throw PopulationError(PopulationErrorCode::negative_count, label);
  if (raw.imitators > 0 && raw.best_responders == 0)
    throw PopulationError(PopulationErrorCode::imitator_without_matching_type,
                          label + " has imitators but no best-responders");
  AgentTypeSpec t;
  t.best_responders = raw.best_responders;
  t.imitators = raw.imitators;
  if (raw.cooperator.has_value() != raw.defector.has_value())
    throw PopulationError(PopulationErrorCode::missing_utilities, label + " needs both uC and uD");
  if (raw.payoff) {
    auto [c, d] = utility_lines_from_payoffs(*raw.payoff, n);
    if (raw.cooperator && (*raw.cooperator != c || *raw.defector != d))
      throw PopulationError(PopulationErrorCode::inconsistent_spec,
                            label + " payoff matrix disagrees with its utility lines");
    t.cooperator = c;
    t.defector = d;
  } else if (raw.cooperator) {
    t.cooperator = *raw.cooperator;
    t.defector = *raw.defector;
  } else {
    throw PopulationError(PopulationErrorCode::missing_utilities, label);
  }
  Rational gap = t.cooperator.slope - t.defector.slope;
  if (gap == 0)
    throw PopulationError(PopulationErrorCode::degenerate_payoff, label + " has parallel utility lines");
  Kind kind = gap < 0 ? Kind::anticoordinating : Kind::coordinating;
  if (kind != listed)
    throw PopulationError(PopulationErrorCode::kind_mismatch,
                          label + " lines describe a " + to_string(kind) + " type");
  t.kind = kind;
  t.temper = (t.defector.intercept - t.cooperator.intercept) / gap;
  if (is_integer(t.temper))
    throw PopulationError(PopulationErrorCode::integer_temper, label + " temper " + to_string(t.temper));
  if (raw.temper && *raw.temper != t.temper)
    throw PopulationError(PopulationErrorCode::inconsistent_spec,
                          label + " temper " + to_string(*raw.temper) + " but lines cross at " +
                              to_string(t.temper));
  return t;
}

}  // namespace

PopulationSpec validate_population(const RawPopulation& raw) {
  if (raw.anticoordinating.empty() && raw.coordinating.empty())
    throw PopulationError(PopulationErrorCode::empty_population, "no agent types");
  int n = 0;
  for (const auto* list : {&raw.anticoordinating, &raw.coordinating})
    for (const auto& t : *list) {
      if (t.best_responders < 0 || t.imitators < 0)
        throw PopulationError(PopulationErrorCode::negative_count, "negative agent count");
      n += t.best_responders + t.imitators;
    }

  PopulationSpec pop;
  for (std::size_t i = 0; i < raw.anticoordinating.size(); ++i)
    pop.anti_.push_back(normalize_type(raw.anticoordinating[i], Kind::anticoordinating, n,
                                       "anticoordinating entry " + std::to_string(i + 1)));
  for (std::size_t i = 0; i < raw.coordinating.size(); ++i)
    pop.coord_.push_back(normalize_type(raw.coordinating[i], Kind::coordinating, n,
                                        "coordinating entry " + std::to_string(i + 1)));

  std::stable_sort(pop.anti_.begin(), pop.anti_.end(),
                   [](const auto& a, const auto& b) { return a.temper > b.temper; });
  std::stable_sort(pop.coord_.begin(), pop.coord_.end(),
                   [](const auto& a, const auto& b) { return a.temper < b.temper; });
  for (const auto* list : {&pop.anti_, &pop.coord_})
    for (std::size_t i = 1; i < list->size(); ++i)
      if ((*list)[i].temper == (*list)[i - 1].temper)
        throw PopulationError(PopulationErrorCode::duplicate_temper,
                              std::string(to_string((*list)[i].kind)) + " temper " +
                                  to_string((*list)[i].temper));

  pop.n_ = n;
  pop.m_ = 0;
  Rational hi = n, lo = 0;
  for (const auto* list : {&pop.anti_, &pop.coord_})
    for (const auto& t : *list) {
      pop.m_ += t.imitators;
      if (t.temper > hi) hi = t.temper;
      if (t.temper < lo) lo = t.temper;
    }
  Rational high = Rational(floor_int(hi) + 1) + Rational(1, 2);
  Rational low = Rational(ceil_int(lo) - 1) - Rational(1, 2);

  pop.tau_a_.push_back(high);
  for (const auto& t : pop.anti_) pop.tau_a_.push_back(t.temper);
  pop.tau_a_.push_back(low);
  pop.tau_c_.push_back(low);
  for (const auto& t : pop.coord_) pop.tau_c_.push_back(t.temper);
  pop.tau_c_.push_back(high);

  for (Kind k : {Kind::anticoordinating, Kind::coordinating})
    for (int i = 1; i <= static_cast<int>(pop.types(k).size()); ++i)
      if (pop.type({k, i}).imitators > 0)
        pop.cells_.push_back({Role::imitator, {k, i}, pop.type({k, i}).imitators});
  pop.groups_ = static_cast<int>(pop.cells_.size());
  for (Kind k : {Kind::anticoordinating, Kind::coordinating})
    for (int i = 1; i <= static_cast<int>(pop.types(k).size()); ++i)
      pop.cells_.push_back({Role::best_responder, {k, i}, pop.type({k, i}).best_responders});
  return pop;
}

int PopulationSpec::cell_of_best_responders(TypeRef t) const {
  return groups_ + (t.kind == Kind::anticoordinating ? t.index - 1 : b() + t.index - 1);
}

int PopulationSpec::cell_of_imitators(TypeRef t) const {
  for (int c = 0; c < groups_; ++c)
    if (cells_[c].type == t) return c;
  return -1;
}

RawPopulation to_raw(const PopulationSpec& pop) {
  RawPopulation raw;
  for (Kind k : {Kind::anticoordinating, Kind::coordinating})
    for (const auto& t : pop.types(k)) {
      RawTypeSpec r;
      r.temper = t.temper;
      r.cooperator = t.cooperator;
      r.defector = t.defector;
      r.best_responders = t.best_responders;
      r.imitators = t.imitators;
      (k == Kind::anticoordinating ? raw.anticoordinating : raw.coordinating).push_back(r);
    }
  return raw;
}

std::uint64_t state_space_size(const PopulationSpec& pop) {
  std::uint64_t size = static_cast<std::uint64_t>(pop.m()) + 1;
  for (int i = 1; i <= pop.b(); ++i) size *= static_cast<std::uint64_t>(pop.count_a(i)) + 1;
  for (int i = 1; i <= pop.b_prime(); ++i) size *= static_cast<std::uint64_t>(pop.count_c(i)) + 1;
  return size;
}

std::uint64_t refined_state_space_size(const PopulationSpec& pop) {
  std::uint64_t size = 1;
  for (const auto& c : pop.cells()) size *= static_cast<std::uint64_t>(c.capacity) + 1;
  return size;
}

int State::cooperators() const { return std::accumulate(counts.begin(), counts.end(), 0); }

State all_defect(const PopulationSpec& pop) { return State{std::vector<int>(pop.cells().size(), 0)}; }

State all_cooperate(const PopulationSpec& pop) {
  State x;
  for (const auto& c : pop.cells()) x.counts.push_back(c.capacity);
  return x;
}

bool in_bounds(const PopulationSpec& pop, const State& x) {
  if (x.counts.size() != pop.cells().size()) return false;
  for (std::size_t c = 0; c < x.counts.size(); ++c)
    if (x.counts[c] < 0 || x.counts[c] > pop.cells()[c].capacity) return false;
  return true;
}

int cooperating_imitators(const PopulationSpec& pop, const State& x) {
  int total = 0;
  for (int c = 0; c < pop.imitator_group_count(); ++c) total += x.counts[c];
  return total;
}

int anticoordinating_cooperators(const PopulationSpec& pop, const State& x, int i) {
  return x.counts[pop.cell_of_best_responders({Kind::anticoordinating, i})];
}

int coordinating_cooperators(const PopulationSpec& pop, const State& x, int i) {
  return x.counts[pop.cell_of_best_responders({Kind::coordinating, i})];
}

std::vector<int> pooled(const PopulationSpec& pop, const State& x) {
  std::vector<int> v{cooperating_imitators(pop, x)};
  for (int i = 1; i <= pop.b(); ++i) v.push_back(anticoordinating_cooperators(pop, x, i));
  for (int i = pop.b_prime(); i >= 1; --i) v.push_back(coordinating_cooperators(pop, x, i));
  return v;
}

std::string format_tuple(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

std::string format_pooled(const PopulationSpec& pop, const State& x) {
  return format_tuple(pooled(pop, x));
}

std::vector<State> refinements(const PopulationSpec& pop, const std::vector<int>& tuple) {
  std::vector<State> out;
  if (tuple.size() != static_cast<std::size_t>(1 + pop.b() + pop.b_prime())) return out;
  State base = all_defect(pop);
  for (int i = 1; i <= pop.b(); ++i) base.counts[pop.cell_of_best_responders({Kind::anticoordinating, i})] = tuple[i];
  for (int i = 1; i <= pop.b_prime(); ++i)
    base.counts[pop.cell_of_best_responders({Kind::coordinating, i})] = tuple[pop.b() + pop.b_prime() - i + 1];
  int groups = pop.imitator_group_count();
  std::function<void(int, int)> fill = [&](int g, int left) {
    if (g == groups) {
      if (left == 0 && in_bounds(pop, base)) out.push_back(base);
      return;
    }
    for (int v = 0; v <= std::min(left, pop.cells()[g].capacity); ++v) {
      base.counts[g] = v;
      fill(g + 1, left - v);
    }
    base.counts[g] = 0;
  };
  fill(0, tuple[0]);
  return out;
}

bool every_type_has_best_responder(const PopulationSpec& pop) {
  for (Kind k : {Kind::anticoordinating, Kind::coordinating})
    for (const auto& t : pop.types(k))
      if (t.best_responders < 1) return false;
  return true;
}

}  // namespace popdyn
