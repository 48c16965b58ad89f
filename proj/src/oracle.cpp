#include "popdyn/oracle.hpp"

#include "popdyn/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace popdyn {

std::uint64_t max_states_from_env(std::uint64_t fallback) {
  const char* v = std::getenv("POPDYN_MAX_STATES");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  unsigned long long parsed = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0' || parsed == 0) return fallback;
  return parsed;
}

StateSpace::StateSpace(const PopulationSpec& pop) {
  for (const auto& c : pop.cells()) caps_.push_back(c.capacity);
  strides_.assign(caps_.size(), 1);
  for (std::size_t c = caps_.size(); c-- > 0;) {
    strides_[c] = size_;
    std::uint64_t radix = static_cast<std::uint64_t>(caps_[c]) + 1;
    if (size_ > std::numeric_limits<std::uint64_t>::max() / radix)
      throw StateSpaceTooLarge("state space overflows 64-bit indexing");
    size_ *= radix;
  }
}

std::uint64_t StateSpace::index(const State& x) const {
  std::uint64_t i = 0;
  for (std::size_t c = 0; c < caps_.size(); ++c) i += strides_[c] * static_cast<std::uint64_t>(x.counts[c]);
  return i;
}

State StateSpace::state(std::uint64_t i) const {
  State x;
  x.counts.resize(caps_.size());
  for (std::size_t c = 0; c < caps_.size(); ++c) {
    x.counts[c] = static_cast<int>(i / strides_[c]);
    i %= strides_[c];
  }
  return x;
}

namespace {

// Integer tables so the per-state successor loop never touches rationals.
struct Kernel {
  int cells = 0;
  std::vector<int> caps;
  std::vector<std::uint64_t> strides;
  std::vector<int> type_of_cell;
  std::vector<bool> imitator_cell;
  int type_count = 0;
  // Indexed [nC][type]: rank of u^C / u^D among all utility values at nC.
  std::vector<std::vector<int>> rank_c, rank_d;
  // Indexed [nC][cell][current]: best-responder next strategy (1 = C).
  std::vector<std::vector<std::array<std::uint8_t, 2>>> br_next;

  Kernel(const PopulationSpec& pop, const StateSpace& space) {
    cells = static_cast<int>(pop.cells().size());
    caps = space.capacities();
    for (int c = 0; c < cells; ++c) strides.push_back(space.stride(c));
    std::vector<TypeRef> types;
    for (Kind k : {Kind::anticoordinating, Kind::coordinating})
      for (int i = 1; i <= static_cast<int>(pop.types(k).size()); ++i) types.push_back({k, i});
    type_count = static_cast<int>(types.size());
    for (const auto& cell : pop.cells()) {
      type_of_cell.push_back(static_cast<int>(std::find(types.begin(), types.end(), cell.type) - types.begin()));
      imitator_cell.push_back(cell.role == Role::imitator);
    }
    const int n = pop.n();
    rank_c.assign(n + 1, std::vector<int>(type_count));
    rank_d.assign(n + 1, std::vector<int>(type_count));
    br_next.assign(n + 1, std::vector<std::array<std::uint8_t, 2>>(cells));
    for (int nC = 0; nC <= n; ++nC) {
      std::vector<Rational> values;
      for (const auto& t : types) {
        values.push_back(pop.type(t).cooperator.at(nC));
        values.push_back(pop.type(t).defector.at(nC));
      }
      std::vector<Rational> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      auto rank = [&](const Rational& v) {
        return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
      };
      for (int t = 0; t < type_count; ++t) {
        rank_c[nC][t] = rank(values[2 * t]);
        rank_d[nC][t] = rank(values[2 * t + 1]);
      }
      for (int c = 0; c < cells; ++c) {
        const AgentTypeSpec& t = pop.type(pop.cells()[c].type);
        for (int cur = 0; cur < 2; ++cur) {
          Strategy s = cur ? Strategy::cooperate : Strategy::defect;
          br_next[nC][c][cur] = best_response_next(t.kind, t.temper, s, nC) == Strategy::cooperate;
        }
      }
    }
  }

  // Writes the sorted distinct successors of state i into out; returns their number.
  int successors(std::uint64_t i, const int* counts, std::uint32_t* out) const {
    int nC = 0;
    for (int c = 0; c < cells; ++c) nC += counts[c];
    int best_c = -1, best_d = -1;
    for (int c = 0; c < cells; ++c) {
      if (counts[c] > 0) best_c = std::max(best_c, rank_c[nC][type_of_cell[c]]);
      if (counts[c] < caps[c]) best_d = std::max(best_d, rank_d[nC][type_of_cell[c]]);
    }
    int len = 0;
    for (int c = 0; c < cells; ++c) {
      for (int cur = 0; cur < 2; ++cur) {
        if (cur == 1 && counts[c] == 0) continue;
        if (cur == 0 && counts[c] == caps[c]) continue;
        int next;
        if (imitator_cell[c])
          next = best_c > best_d ? 1 : (best_c < best_d ? 0 : cur);
        else
          next = br_next[nC][c][cur];
        std::uint64_t j = i;
        if (next != cur) j = next ? i + strides[c] : i - strides[c];
        out[len++] = static_cast<std::uint32_t>(j);
      }
    }
    std::sort(out, out + len);
    return static_cast<int>(std::unique(out, out + len) - out);
  }
};

template <class F>
void for_each_in_range(const StateSpace& space, std::uint64_t begin, std::uint64_t end, F&& f) {
  if (begin >= end) return;
  State x = space.state(begin);
  std::vector<int>& counts = x.counts;
  const auto& caps = space.capacities();
  for (std::uint64_t i = begin; i < end; ++i) {
    f(i, counts.data());
    for (std::size_t c = counts.size(); c-- > 0;) {
      if (counts[c] < caps[c]) {
        ++counts[c];
        break;
      }
      counts[c] = 0;
    }
  }
}

template <class F>
void parallel_ranges(std::uint64_t total, unsigned threads, F&& f) {
  threads = std::max(1u, threads);
  if (threads == 1 || total < 4096) {
    f(0, total);
    return;
  }
  std::vector<std::thread> pool;
  std::uint64_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::uint64_t b = t * chunk, e = std::min(total, b + chunk);
    if (b < e) pool.emplace_back([&f, b, e] { f(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

TransitionDigraph build_transition_digraph(const PopulationSpec& pop, std::uint64_t max_states,
                                           unsigned threads) {
  StateSpace space(pop);
  const std::uint64_t size = space.size();
  if (size > max_states)
    throw StateSpaceTooLarge("state space has " + std::to_string(size) + " states, guard is " +
                             std::to_string(max_states));
  if (size >= std::numeric_limits<std::uint32_t>::max())
    throw StateSpaceTooLarge("state space exceeds 32-bit node ids");
  if (pop.n() > std::numeric_limits<std::uint16_t>::max())
    throw StateSpaceTooLarge("population too large");

  Kernel kernel(pop, space);
  TransitionDigraph g{pop, space, Csr{}, {}};
  g.cooperators.resize(size);
  std::vector<std::uint64_t>& offsets = g.adjacency.offsets;
  offsets.assign(size + 1, 0);

  const std::size_t max_deg = 2 * pop.cells().size() + 1;
  parallel_ranges(size, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<std::uint32_t> buf(max_deg);
    for_each_in_range(space, b, e, [&](std::uint64_t i, const int* counts) {
      offsets[i + 1] = static_cast<std::uint64_t>(kernel.successors(i, counts, buf.data()));
      int nC = 0;
      for (int c = 0; c < kernel.cells; ++c) nC += counts[c];
      g.cooperators[i] = static_cast<std::uint16_t>(nC);
    });
  });
  for (std::uint64_t i = 0; i < size; ++i) offsets[i + 1] += offsets[i];
  g.adjacency.targets.resize(offsets[size]);
  parallel_ranges(size, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<std::uint32_t> buf(max_deg);
    for_each_in_range(space, b, e, [&](std::uint64_t i, const int* counts) {
      int len = kernel.successors(i, counts, buf.data());
      std::copy(buf.begin(), buf.begin() + len, g.adjacency.targets.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
    });
  });
  return g;
}

std::vector<InvariantSetResult> minimal_invariant_sets(const TransitionDigraph& g) {
  std::vector<InvariantSetResult> out;
  for (auto& members : sink_components(g.adjacency)) {
    InvariantSetResult r;
    r.singleton = members.size() == 1;
    r.min_cooperators = std::numeric_limits<int>::max();
    r.max_cooperators = std::numeric_limits<int>::min();
    for (std::uint32_t v : members) {
      r.min_cooperators = std::min<int>(r.min_cooperators, g.cooperators[v]);
      r.max_cooperators = std::max<int>(r.max_cooperators, g.cooperators[v]);
    }
    r.states = std::move(members);
    out.push_back(std::move(r));
  }
  return out;
}

bool is_equilibrium_oracle(const TransitionDigraph& g, const State& x) {
  if (!in_bounds(g.pop, x)) throw std::invalid_argument("state out of bounds");
  std::uint64_t i = g.space.index(x);
  auto succ = g.successors(i);
  return succ.size() == 1 && succ[0] == i;
}

bool is_stable_oracle(const TransitionDigraph& g, const State& eq) {
  if (!is_equilibrium_oracle(g, eq)) throw NotAnEquilibrium(format_pooled(g.pop, eq) + " is not an equilibrium");
  std::vector<std::uint32_t> neighbours;
  for (std::size_t c = 0; c < eq.counts.size(); ++c)
    for (int d : {-1, 1}) {
      State y = eq;
      y.counts[c] += d;
      if (in_bounds(g.pop, y)) neighbours.push_back(static_cast<std::uint32_t>(g.space.index(y)));
    }
  std::vector<bool> seen = forward_closure(g.adjacency, neighbours);
  for (std::uint64_t v = 0; v < seen.size(); ++v) {
    if (!seen[v]) continue;
    State z = g.space.state(v);
    int dist = 0;
    for (std::size_t c = 0; c < z.counts.size(); ++c) dist += std::abs(z.counts[c] - eq.counts[c]);
    if (dist > 1) return false;
  }
  return true;
}

std::vector<std::uint32_t> reachable_set(const TransitionDigraph& g, const State& from) {
  std::vector<bool> seen = forward_closure(g.adjacency, {static_cast<std::uint32_t>(g.space.index(from))});
  std::vector<std::uint32_t> out;
  for (std::uint64_t v = 0; v < seen.size(); ++v)
    if (seen[v]) out.push_back(static_cast<std::uint32_t>(v));
  return out;
}

void write_adjacency(std::ostream& out, const TransitionDigraph& g) {
  for (std::uint64_t v = 0; v < g.node_count(); ++v) {
    out << v << ':';
    for (std::uint32_t w : g.successors(v)) out << ' ' << w;
    out << '\n';
  }
}

}  // namespace popdyn
