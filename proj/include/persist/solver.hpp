#pragma once

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "persist/cfg.hpp"
#include "persist/domain.hpp"
#include "persist/error.hpp"

namespace persist {

enum class WorklistOrder : std::uint8_t { ReversePostorder, Fifo };

struct SolverOptions {
  WorklistOrder order = WorklistOrder::ReversePostorder;
  std::size_t max_iterations = 1'000'000;
};

/// Least solution: one state per node. Unreached nodes keep bottom.
template <typename State>
struct FixpointResult {
  std::vector<State> states;
  std::vector<bool> reached;
  std::size_t iterations = 0;
};

/// Callback hooks invoked on every intermediate state; the default does nothing.
struct NoObserver {
  template <typename State>
  void after_update(const Edge&, const State&) {}
  template <typename State>
  void after_join(NodeId, const State&) {}
};

/// Worklist iteration from init_entry at the entry node and bottom elsewhere.
/// Throws AnalysisError when the iteration guard trips.
template <PersistenceDomain D, typename Observer = NoObserver>
FixpointResult<typename D::State> solve_fixpoint(const ControlFlowGraph& cfg, const D& domain,
                                                 const SolverOptions& options = {}, Observer&& observer = {}) {
  using State = typename D::State;
  FixpointResult<State> r;
  r.states.assign(cfg.num_nodes(), domain.bottom());
  r.reached.assign(cfg.num_nodes(), false);

  const NodeId entry = cfg.entry();
  r.states[index_of(entry)] = domain.init_entry();
  r.reached[index_of(entry)] = true;

  std::vector<std::uint32_t> rank(cfg.num_nodes(), 0);
  {
    auto rpo = reverse_postorder(cfg);
    for (std::uint32_t i = 0; i < rpo.size(); ++i) rank[index_of(rpo[i])] = i;
  }
  // Ordered by (rank, node) so ties break by declaration order.
  std::set<std::pair<std::uint32_t, std::uint32_t>> prioritized;
  std::deque<NodeId> fifo;
  std::vector<bool> queued(cfg.num_nodes(), false);
  auto push = [&](NodeId n) {
    if (queued[index_of(n)]) return;
    queued[index_of(n)] = true;
    if (options.order == WorklistOrder::Fifo)
      fifo.push_back(n);
    else
      prioritized.emplace(rank[index_of(n)], index_of(n));
  };
  auto pop = [&]() {
    NodeId n;
    if (options.order == WorklistOrder::Fifo) {
      n = fifo.front();
      fifo.pop_front();
    } else {
      n = NodeId{prioritized.begin()->second};
      prioritized.erase(prioritized.begin());
    }
    queued[index_of(n)] = false;
    return n;
  };
  push(entry);

  while (!fifo.empty() || !prioritized.empty()) {
    if (++r.iterations > options.max_iterations)
      throw AnalysisError("fixpoint did not converge within " + std::to_string(options.max_iterations) +
                          " iterations");
    const NodeId v = pop();
    for (auto e : cfg.out_edges(v)) {
      const Edge& edge = cfg.edge(e);
      State out = domain.update(r.states[index_of(v)], edge.label);
      observer.after_update(edge, out);
      const auto w = index_of(edge.target);
      if (!r.reached[w]) {
        r.states[w] = domain.join(domain.bottom(), out);
        r.reached[w] = true;
        observer.after_join(edge.target, r.states[w]);
        push(edge.target);
        continue;
      }
      State joined = domain.join(r.states[w], out);
      observer.after_join(edge.target, joined);
      if (!(joined == r.states[w])) {
        r.states[w] = std::move(joined);
        push(edge.target);
      }
    }
  }
  return r;
}

/// Classification of every block at every reached node, indexed [node][block].
template <PersistenceDomain D>
std::vector<std::vector<bool>> classification_table(const ControlFlowGraph& cfg, const D& domain,
                                                    const FixpointResult<typename D::State>& result) {
  std::vector<std::vector<bool>> table(cfg.num_nodes(), std::vector<bool>(cfg.num_blocks(), true));
  for (std::uint32_t v = 0; v < cfg.num_nodes(); ++v) {
    if (!result.reached[v]) continue;
    for (std::uint32_t b = 0; b < cfg.num_blocks(); ++b) table[v][b] = domain.classify(result.states[v], BlockId{b});
  }
  return table;
}

/// Persistence of each block: classification conjoined over the reached nodes
/// with an outgoing edge that may access it.
template <PersistenceDomain D>
std::vector<bool> persistent_blocks(const ControlFlowGraph& cfg, const D& domain,
                                    const FixpointResult<typename D::State>& result) {
  std::vector<bool> out(cfg.num_blocks(), true);
  for (std::uint32_t b = 0; b < cfg.num_blocks(); ++b)
    for (NodeId v : cfg.accessing_nodes(BlockId{b}))
      if (result.reached[index_of(v)] && !domain.classify(result.states[index_of(v)], BlockId{b})) {
        out[b] = false;
        break;
      }
  return out;
}

}  // namespace persist
