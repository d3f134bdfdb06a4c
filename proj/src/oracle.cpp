#include "persist/oracle.hpp"

#include <algorithm>
#include <unordered_set>

namespace persist {

std::vector<bool> lru_simulate(std::span<const BlockId> trace, std::uint32_t k) {
  std::vector<bool> hits;
  hits.reserve(trace.size());
  std::vector<BlockId> recency;  // most recent first
  for (BlockId b : trace) {
    auto it = std::find(recency.begin(), recency.end(), b);
    const bool hit = it != recency.end() && static_cast<std::size_t>(it - recency.begin()) < k;
    hits.push_back(hit);
    if (it != recency.end()) recency.erase(it);
    recency.insert(recency.begin(), b);
  }
  return hits;
}

std::vector<BlockId> path_trace(const ControlFlowGraph& cfg, std::span<const std::uint32_t> path) {
  std::vector<BlockId> trace;
  for (auto e : path) {
    const auto& label = cfg.edge(e).label;
    if (label.is_single()) trace.push_back(label.block());
  }
  return trace;
}

namespace {

// First two miss positions of `b` in the access trace.
std::vector<std::size_t> misses_of(const std::vector<BlockId>& trace, BlockId b, std::uint32_t k) {
  const auto hits = lru_simulate(trace, k);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trace.size() && out.size() < 2; ++i)
    if (trace[i] == b && !hits[i]) out.push_back(i);
  return out;
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (auto x : v) h = h * 0x100000001b3ull ^ x;
    return h;
  }
};

}  // namespace

bool validate_witness(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k, const Witness& w) {
  if (w.path.empty()) return false;
  NodeId at = cfg.entry();
  for (auto e : w.path) {
    if (e >= cfg.edges().size() || cfg.edge(e).source != at) return false;
    at = cfg.edge(e).target;
  }
  const auto trace = path_trace(cfg, w.path);
  const auto misses = misses_of(trace, b, k);
  return misses.size() == 2 && misses[0] == w.first_miss && misses[1] == w.second_miss;
}

std::size_t witness_length_bound(const ControlFlowGraph& cfg) {
  return cfg.num_nodes() + cfg.num_nodes() * cfg.edges().size() + 2;
}

std::optional<Witness> find_witness(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k,
                                    const OracleOptions& options) {
  if (k < 1) throw AnalysisError("associativity must be at least 1");
  for (const auto& e : cfg.edges())
    if (e.label.is_many() || e.label.is_unknown())
      throw AnalysisError("the witness search supports only single-block accesses");
  if (cfg.num_nodes() * cfg.edges().size() > options.budget)
    throw BudgetExceeded("graph too large for the witness search (|V|*|E| = " +
                         std::to_string(cfg.num_nodes() * cfg.edges().size()) + ", budget " +
                         std::to_string(options.budget) + ")");

  // Breadth-first over (node, misses of b so far, LRU stack). The future of a
  // path depends only on this triple, so each is expanded once.
  struct Visit {
    std::uint32_t parent;
    std::uint32_t edge;
  };
  std::vector<Visit> visits;
  std::unordered_set<std::vector<std::uint32_t>, KeyHash> seen;

  // key layout: node, misses, stack...
  std::vector<std::uint32_t> start{index_of(cfg.entry()), 0};
  seen.insert(start);
  visits.push_back({~0u, ~0u});
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> frontier{{0, start}};

  const std::size_t limit = witness_length_bound(cfg) * std::max<std::size_t>(options.length_factor, 1);
  for (std::size_t depth = 0; depth < limit && !frontier.empty(); ++depth) {
    std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> next;
    for (const auto& [visit, key] : frontier) {
      for (auto e : cfg.out_edges(NodeId{key[0]})) {
        const Edge& edge = cfg.edge(e);
        std::vector<std::uint32_t> succ{index_of(edge.target), key[1]};
        std::vector<std::uint32_t> stack(key.begin() + 2, key.end());
        if (edge.label.is_single()) {
          const auto x = index_of(edge.label.block());
          auto it = std::find(stack.begin(), stack.end(), x);
          if (x == index_of(b) && it == stack.end()) ++succ[1];
          if (it != stack.end()) stack.erase(it);
          stack.insert(stack.begin(), x);
          if (stack.size() > k) stack.pop_back();
        }
        succ.insert(succ.end(), stack.begin(), stack.end());
        if (!seen.insert(succ).second) continue;
        visits.push_back({visit, e});
        const auto id = static_cast<std::uint32_t>(visits.size() - 1);
        if (succ[1] >= 2) {
          Witness w;
          for (auto v = id; visits[v].parent != ~0u; v = visits[v].parent) w.path.push_back(visits[v].edge);
          std::reverse(w.path.begin(), w.path.end());
          const auto misses = misses_of(path_trace(cfg, w.path), b, k);
          w.first_miss = misses.at(0);
          w.second_miss = misses.at(1);
          return w;
        }
        next.emplace_back(id, std::move(succ));
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

bool brute_force_persistent(const ControlFlowGraph& cfg, BlockId b, std::uint32_t k, const OracleOptions& options) {
  return !find_witness(cfg, b, k, options).has_value();
}

}  // namespace persist
