#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "persist/cfg.hpp"

namespace persist {

/// Hit (true) or miss (false) for each access of `trace` in a
/// fully-associative LRU cache holding k blocks.
std::vector<bool> lru_simulate(std::span<const BlockId> trace, std::uint32_t k);

/// A path from the entry on which the target block misses twice.
struct Witness {
  std::vector<std::uint32_t> path;  // edge indices
  std::size_t first_miss = 0;       // positions in the access trace of the path
  std::size_t second_miss = 0;
};

/// Accesses along a path, skipping Empty edges.
std::vector<BlockId> path_trace(const ControlFlowGraph& cfg, std::span<const std::uint32_t> path);

/// True when `w` starts at the entry, is connected, and replays to misses of
/// `b` exactly at the flagged positions (the first two misses of `b`).
bool validate_witness(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k, const Witness& w);

/// Longest witness that has to be considered: |V| + |V|·|E| + 2 edges.
std::size_t witness_length_bound(const ControlFlowGraph& cfg);

struct OracleOptions {
  /// Largest |V|·|E| searched; larger graphs raise BudgetExceeded.
  std::size_t budget = 2000;
  /// Multiplies the path length bound (2 probes the bound's adequacy).
  std::size_t length_factor = 1;
};

/// Shortest witness path within the length bound, or nullopt when `b` is
/// persistent. Accepts Single and Empty labels only.
std::optional<Witness> find_witness(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k,
                                    const OracleOptions& options = {});

bool brute_force_persistent(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k,
                            const OracleOptions& options = {});

}  // namespace persist
