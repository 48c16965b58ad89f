#include "popdyn/graph.hpp"

#include <algorithm>
#include <limits>

namespace popdyn {

Csr csr_from_lists(const std::vector<std::vector<std::uint32_t>>& lists) {
  Csr g;
  g.offsets.reserve(lists.size() + 1);
  for (const auto& l : lists) {
    g.targets.insert(g.targets.end(), l.begin(), l.end());
    g.offsets.push_back(g.targets.size());
  }
  return g;
}

std::vector<std::uint32_t> strongly_connected_components(const Csr& g, std::uint32_t& component_count) {
  constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> frames;  // node, next edge
  std::uint32_t counter = 0;
  component_count = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.emplace_back(static_cast<std::uint32_t>(root), g.offsets[root]);
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::uint32_t>(root));
    while (!frames.empty()) {
      auto& [v, e] = frames.back();
      if (e < g.offsets[v + 1]) {
        std::uint32_t w = g.targets[e++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          frames.emplace_back(w, g.offsets[w]);
        } else if (comp[w] == unvisited) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      std::uint32_t done = v;
      frames.pop_back();
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          comp[w] = component_count;
        } while (w != done);
        ++component_count;
      }
      if (!frames.empty()) {
        std::uint32_t parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

std::vector<std::vector<std::uint32_t>> sink_components(const Csr& g) {
  std::uint32_t count = 0;
  std::vector<std::uint32_t> comp = strongly_connected_components(g, count);
  std::vector<bool> leaks(count, false);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    for (std::uint32_t w : g.successors(v))
      if (comp[w] != comp[v]) leaks[comp[v]] = true;
  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (!leaks[comp[v]]) members[comp[v]].push_back(static_cast<std::uint32_t>(v));
  std::vector<std::vector<std::uint32_t>> sinks;
  for (auto& m : members)
    if (!m.empty()) sinks.push_back(std::move(m));
  std::sort(sinks.begin(), sinks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return sinks;
}

std::vector<bool> forward_closure(const Csr& g, const std::vector<std::uint32_t>& sources) {
  std::vector<bool> seen(g.node_count(), false);
  std::vector<std::uint32_t> todo;
  for (std::uint32_t s : sources)
    if (!seen[s]) {
      seen[s] = true;
      todo.push_back(s);
    }
  while (!todo.empty()) {
    std::uint32_t v = todo.back();
    todo.pop_back();
    for (std::uint32_t w : g.successors(v))
      if (!seen[w]) {
        seen[w] = true;
        todo.push_back(w);
      }
  }
  return seen;
}

}  // namespace popdyn
