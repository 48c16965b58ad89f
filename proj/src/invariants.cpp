#include "popdyn/invariants.hpp"

#include "popdyn/dynamics.hpp"

#include <algorithm>
#include <functional>

namespace popdyn {

std::string format_index(const BenchmarkIndex& idx) {
  return "(" + std::to_string(idx.j1) + "," + std::to_string(idx.j2) + "," + std::to_string(idx.j2p) + "," +
         std::to_string(idx.j1p) + ")";
}

bool is_valid_index(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  return 0 <= idx.j1 && idx.j1 < idx.j2 && idx.j2 <= pop.b() + 1 && 0 <= idx.j1p && idx.j1p < idx.j2p &&
         idx.j2p <= pop.b_prime() + 1;
}

std::vector<BenchmarkIndex> benchmark_index_set(const PopulationSpec& pop) {
  std::vector<BenchmarkIndex> out;
  for (int j1 = 0; j1 <= pop.b(); ++j1)
    for (int j2 = j1 + 1; j2 <= pop.b() + 1; ++j2)
      for (int j1p = 0; j1p <= pop.b_prime(); ++j1p)
        for (int j2p = j1p + 1; j2p <= pop.b_prime() + 1; ++j2p) out.push_back({j1, j2, j2p, j1p});
  return out;
}

BenchmarkIndex benchmark_types_from_bounds(const PopulationSpec& pop, int S, int L) {
  if (S < 0 || S > L || L > pop.n()) throw std::invalid_argument("need 0 <= S <= L <= n");
  const Rational s = S, l = L;
  BenchmarkIndex xi{0, pop.b() + 1, pop.b_prime() + 1, 0};
  for (int j = 0; j <= pop.b() + 1; ++j)
    if (pop.temper_a(j) > l) xi.j1 = j;
  for (int j = pop.b() + 1; j >= 0; --j)
    if (pop.temper_a(j) < s) xi.j2 = j;
  for (int j = pop.b_prime() + 1; j >= 0; --j)
    if (pop.temper_c(j) > l) xi.j2p = j;
  for (int j = 0; j <= pop.b_prime() + 1; ++j)
    if (pop.temper_c(j) < s) xi.j1p = j;
  return xi;
}

Rational tau_max(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  return std::max(pop.temper_a(idx.j2), pop.temper_c(idx.j1p));
}

Rational tau_min(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  return std::min(pop.temper_a(idx.j1), pop.temper_c(idx.j2p));
}

int fixed_cooperators(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  int total = 0;
  for (int i = 1; i <= idx.j1; ++i) total += pop.count_a(i);
  for (int i = 1; i <= idx.j1p; ++i) total += pop.count_c(i);
  return total;
}

int max_cooperators(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  int total = pop.m();
  for (int i = 1; i < idx.j2; ++i) total += pop.count_a(i);
  for (int i = 1; i < idx.j2p; ++i) total += pop.count_c(i);
  return total;
}

bool membership_X(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x) {
  for (int i = 1; i <= pop.b(); ++i) {
    int v = anticoordinating_cooperators(pop, x, i);
    if (i <= idx.j1 && v != pop.count_a(i)) return false;
    if (i >= idx.j2 && v != 0) return false;
  }
  for (int i = 1; i <= pop.b_prime(); ++i) {
    int v = coordinating_cooperators(pop, x, i);
    if (i <= idx.j1p && v != pop.count_c(i)) return false;
    if (i >= idx.j2p && v != 0) return false;
  }
  return true;
}

bool is_invariant_X(const PopulationSpec& pop, const BenchmarkIndex& idx) {
  return tau_max(pop, idx) < fixed_cooperators(pop, idx) && Rational(max_cooperators(pop, idx)) < tau_min(pop, idx);
}

bool membership_S(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x) {
  if (!membership_X(pop, idx, x)) return false;
  Rational nC = x.cooperators();
  return tau_max(pop, idx) < nC && nC < tau_min(pop, idx);
}

std::vector<State> states_of_X(const PopulationSpec& pop, const BenchmarkIndex& idx, int count,
                               std::uint64_t max_states) {
  State base = all_defect(pop);
  std::vector<int> free_cells;
  for (int c = 0; c < pop.imitator_group_count(); ++c) free_cells.push_back(c);
  for (int i = 1; i <= pop.b(); ++i) {
    int c = pop.cell_of_best_responders({Kind::anticoordinating, i});
    if (i <= idx.j1) base.counts[c] = pop.count_a(i);
    else if (i < idx.j2) free_cells.push_back(c);
  }
  for (int i = 1; i <= pop.b_prime(); ++i) {
    int c = pop.cell_of_best_responders({Kind::coordinating, i});
    if (i <= idx.j1p) base.counts[c] = pop.count_c(i);
    else if (i < idx.j2p) free_cells.push_back(c);
  }
  std::vector<State> out;
  const int fixed = base.cooperators();
  if (count >= 0 && count < fixed) return out;
  std::vector<int> suffix(free_cells.size() + 1, 0);
  for (std::size_t k = free_cells.size(); k-- > 0;) suffix[k] = suffix[k + 1] + pop.cells()[free_cells[k]].capacity;

  std::function<void(std::size_t, int)> fill = [&](std::size_t k, int left) {
    if (k == free_cells.size()) {
      if (count < 0 || left == 0) {
        if (out.size() >= max_states) throw StateSpaceTooLarge("set enumeration exceeds the state guard");
        out.push_back(base);
      }
      return;
    }
    int c = free_cells[k];
    int cap = pop.cells()[c].capacity;
    for (int v = 0; v <= cap; ++v) {
      if (count >= 0) {
        if (v > left) break;
        if (left - v > suffix[k + 1]) continue;
      }
      base.counts[c] = v;
      fill(k + 1, count >= 0 ? left - v : 0);
    }
    base.counts[c] = 0;
  };
  fill(0, count >= 0 ? count - fixed : 0);
  return out;
}

SInvarianceReport analyze_S(const PopulationSpec& pop, const BenchmarkIndex& idx, std::uint64_t max_states) {
  if (!is_valid_index(pop, idx)) throw std::invalid_argument("index outside the benchmark set");
  SInvarianceReport rep;
  const Rational tmax = tau_max(pop, idx), tmin = tau_min(pop, idx);
  const int lo = fixed_cooperators(pop, idx), hi = max_cooperators(pop, idx);
  rep.necessary_nonempty = tmax < hi && Rational(lo) < tmin;
  // Every count in [lo, hi] is realized in X, so S is nonempty iff an integer in
  // (tmax, tmin) falls into [lo, hi].
  const std::int64_t first = std::max<std::int64_t>(lo, floor_int(tmax) + 1);
  const std::int64_t last = std::min<std::int64_t>(hi, ceil_int(tmin) - 1);
  rep.nonempty = first <= last;
  if (!rep.nonempty) return rep;

  const std::int64_t cmax = ceil_int(tmax), fmin = floor_int(tmin);
  rep.low_short_circuit = lo >= cmax;
  if (!rep.low_short_circuit) {
    // only a cooperating imitator can react to a defecting highest earner
    rep.low_highest_earner = true;
    if (pop.m() > 0) {
      for (const State& x : states_of_X(pop, idx, static_cast<int>(cmax), max_states)) {
        ++rep.states_checked;
        if (cooperating_imitators(pop, x) == 0) continue;
        HighestEarners h = highest_earners(pop, x);
        if (!(h.cooperators.is_finite() && h.cooperators >= h.defectors)) {
          rep.low_highest_earner = false;
          break;
        }
      }
    }
    rep.low_brackets = pop.temper_c(idx.j2p - 1) < cmax && Rational(cmax) < pop.temper_a(idx.j2 - 1);
  }
  rep.condition_low = rep.low_short_circuit || (rep.low_highest_earner && rep.low_brackets);

  rep.high_short_circuit = hi <= fmin;
  if (!rep.high_short_circuit) {
    rep.high_highest_earner = true;
    if (pop.m() > 0) {
      for (const State& x : states_of_X(pop, idx, static_cast<int>(fmin), max_states)) {
        ++rep.states_checked;
        if (cooperating_imitators(pop, x) == pop.m()) continue;
        HighestEarners h = highest_earners(pop, x);
        if (!(h.defectors.is_finite() && h.defectors >= h.cooperators)) {
          rep.high_highest_earner = false;
          break;
        }
      }
    }
    rep.high_brackets = pop.temper_a(idx.j1 + 1) < fmin && Rational(fmin) < pop.temper_c(idx.j1p + 1);
  }
  rep.condition_high = rep.high_short_circuit || (rep.high_highest_earner && rep.high_brackets);
  rep.invariant = rep.condition_low && rep.condition_high;
  return rep;
}

bool is_invariant_S(const PopulationSpec& pop, const BenchmarkIndex& idx, std::uint64_t max_states) {
  SInvarianceReport rep = analyze_S(pop, idx, max_states);
  if (!rep.nonempty) throw EmptySet("S" + format_index(idx) + " is empty");
  return rep.invariant;
}

bool membership_I(const PopulationSpec& pop, const BenchmarkIndex& idx, const State& x) {
  if (!membership_X(pop, idx, x)) return false;
  int base_low = 0, base_high = pop.m();
  for (int k = 1; k <= idx.j1p; ++k) base_low += pop.count_c(k);
  for (int k = 1; k <= idx.j1; ++k) base_low += pop.count_a(k);
  for (int k = 1; k < idx.j2p; ++k) base_high += pop.count_c(k);
  for (int k = 1; k <= idx.j1; ++k) base_high += pop.count_a(k);
  for (int i = idx.j1 + 1; i <= idx.j2 - 1; ++i) {
    int right = base_low;
    for (int k = i; k <= idx.j2 - 1; ++k) right += anticoordinating_cooperators(pop, x, k);
    if (right > ceil_int(pop.temper_a(i))) return false;
    int left = base_high;
    for (int k = idx.j1 + 1; k <= i; ++k) left += anticoordinating_cooperators(pop, x, k);
    for (int k = i + 1; k <= idx.j2 - 1; ++k) left += pop.count_a(k);
    if (left < floor_int(pop.temper_a(i))) return false;
  }
  return true;
}

NecessaryConditionReport verify_necessary_conditions(const TransitionDigraph& g, const InvariantSetResult& set) {
  if (set.states.size() < 2) throw std::invalid_argument("necessary conditions apply to non-singleton sets");
  const PopulationSpec& pop = g.pop;
  NecessaryConditionReport rep;
  rep.xi = benchmark_types_from_bounds(pop, set.min_cooperators, set.max_cooperators);
  const BenchmarkIndex& xi = rep.xi;

  auto fail = [&](ConditionCheck& c, const std::string& why) {
    if (c.pass) {
      c.pass = false;
      c.witness = why;
    }
  };

  std::vector<State> states;
  states.reserve(set.states.size());
  for (std::uint32_t v : set.states) states.push_back(g.space.state(v));

  rep.extremes.vacuous = xi.j2p - xi.j1p <= 1;
  rep.wandering_nonconformists.vacuous = xi.j2 - xi.j1 <= 1;
  for (const State& x : states) {
    if (!membership_X(pop, xi, x)) fail(rep.inside_X, format_pooled(pop, x));
    if (!membership_I(pop, xi, x)) fail(rep.inside_I, format_pooled(pop, x));
    int nC = x.cooperators();
    for (int i = xi.j1p + 1; i <= xi.j2p - 1; ++i) {
      int v = coordinating_cooperators(pop, x, i);
      if (nC == set.min_cooperators && v != 0)
        fail(rep.extremes, format_pooled(pop, x) + " conformist type " + std::to_string(i) + " at minimum");
      if (nC == set.max_cooperators && v != pop.count_c(i))
        fail(rep.extremes, format_pooled(pop, x) + " conformist type " + std::to_string(i) + " at maximum");
    }
  }
  for (int i = xi.j1 + 1; i <= xi.j2 - 1; ++i) {
    int lo = pop.count_a(i), hi = 0;
    for (const State& x : states) {
      int v = anticoordinating_cooperators(pop, x, i);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo == hi) fail(rep.wandering_nonconformists, "anticoordinating type " + std::to_string(i) + " frozen at " + std::to_string(lo));
    if (!(hi > 0 && lo < pop.count_a(i)))
      fail(rep.wandering_nonconformists, "anticoordinating type " + std::to_string(i) + " never both cooperating and defecting");
  }
  return rep;
}

}  // namespace popdyn
