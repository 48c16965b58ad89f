#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace popdyn {

// Compressed adjacency: successors of v are targets[offsets[v] .. offsets[v+1]).
struct Csr {
  std::vector<std::uint64_t> offsets{0};
  std::vector<std::uint32_t> targets;

  std::size_t node_count() const { return offsets.size() - 1; }
  std::span<const std::uint32_t> successors(std::size_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
};

Csr csr_from_lists(const std::vector<std::vector<std::uint32_t>>& lists);

// Tarjan, iterative. Returns the component id of every node; ids are in reverse
// topological order of the condensation (sinks first).
std::vector<std::uint32_t> strongly_connected_components(const Csr& g, std::uint32_t& component_count);

// Node sets of the components with no edge leaving them, each sorted ascending,
// ordered by their smallest node.
std::vector<std::vector<std::uint32_t>> sink_components(const Csr& g);

// Forward closure of `sources`, as a membership mask.
std::vector<bool> forward_closure(const Csr& g, const std::vector<std::uint32_t>& sources);

}  // namespace popdyn
