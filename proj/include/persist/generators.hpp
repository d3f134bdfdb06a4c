#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "persist/cfg.hpp"

namespace persist {

/// Simple undirected graph over vertices 0..n-1.
struct UndirectedGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // i < j, sorted, unique

  /// Normalizes edge orientation and drops duplicates. Throws ValidationError
  /// on self-loops or out-of-range vertices.
  UndirectedGraph(std::uint32_t vertices, std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list);
  UndirectedGraph() = default;

  bool adjacent(std::uint32_t a, std::uint32_t b) const;

  /// One `i j` pair per line; an optional `vertices N` line fixes the vertex
  /// count, which otherwise is one more than the largest index. `#` starts a
  /// comment.
  static UndirectedGraph parse_edge_list(std::string_view text);
};

/// Exhaustive search for a Hamiltonian circuit. Requires n <= 10. On two
/// vertices the single edge counts as a circuit.
bool brute_force_hamiltonian(const UndirectedGraph& g);

/// Each of the n(n-1)/2 possible edges present with probability `density`.
UndirectedGraph random_undirected_graph(std::uint32_t n, double density, std::mt19937_64& rng);

struct HamiltonianInstance {
  ControlFlowGraph cfg;
  BlockId target;         // the block on the back edge
  std::uint32_t k = 0;    // associativity at which the reduction holds
};

/// CFG in which `target` is persistent at k = n exactly when `g` has no
/// Hamiltonian circuit. Blocks a0..a{n-1} stand for the vertices. Addresses
/// are spaced `address_stride` bytes apart; the default keeps every block in
/// cache set 0 of the default cache. Unreachable layer copies are pruned.
HamiltonianInstance gen_hamiltonian_cfg(const UndirectedGraph& g, std::uint64_t address_stride = 512);

struct RandomCfgParams {
  std::uint32_t nodes = 5;
  std::uint32_t blocks = 3;
  /// Expected out-degree from forward edges (at least one edge per node
  /// keeps everything reachable).
  double branch_factor = 1.5;
  /// Chance that a node gets a back edge to one of its dominators.
  double loop_probability = 0.3;
  double empty_rate = 0.15;
  double many_rate = 0.0;
  double unknown_rate = 0.0;
  /// Largest candidate set of a Many label.
  std::uint32_t max_many = 3;
  std::uint64_t address_stride = 512;
};

/// Reducible, fully reachable random CFG; identical for identical seeds.
/// Throws ValidationError for out-of-range parameters.
ControlFlowGraph gen_random_cfg(std::uint64_t seed, const RandomCfgParams& params);

}  // namespace persist
