#include <algorithm>
#include <map>

#include "persist/cfg.hpp"

namespace persist {

namespace {

struct DfsInfo {
  std::vector<NodeId> postorder;
  std::vector<std::uint32_t> retreating;  // edge indices targeting a node on the DFS stack
};

DfsInfo depth_first(const ControlFlowGraph& cfg) {
  DfsInfo info;
  enum class Mark : std::uint8_t { White, Active, Done };
  std::vector<Mark> mark(cfg.num_nodes(), Mark::White);
  // Explicit stack of (node, next out-edge position) to keep deep graphs off the call stack.
  std::vector<std::pair<NodeId, std::size_t>> stack{{cfg.entry(), 0}};
  mark[index_of(cfg.entry())] = Mark::Active;
  while (!stack.empty()) {
    auto& [v, pos] = stack.back();
    auto outs = cfg.out_edges(v);
    if (pos == outs.size()) {
      mark[index_of(v)] = Mark::Done;
      info.postorder.push_back(v);
      stack.pop_back();
      continue;
    }
    std::uint32_t e = outs[pos++];
    NodeId w = cfg.edge(e).target;
    if (mark[index_of(w)] == Mark::White) {
      mark[index_of(w)] = Mark::Active;
      stack.emplace_back(w, 0);
    } else if (mark[index_of(w)] == Mark::Active) {
      info.retreating.push_back(e);
    }
  }
  return info;
}

}  // namespace

std::vector<NodeId> reverse_postorder(const ControlFlowGraph& cfg) {
  auto order = depth_first(cfg).postorder;
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<NodeId> immediate_dominators(const ControlFlowGraph& cfg) {
  // Iterative scheme of Cooper, Harvey and Kennedy over reverse postorder.
  const auto rpo = reverse_postorder(cfg);
  constexpr std::uint32_t kUndef = ~0u;
  std::vector<std::uint32_t> rank(cfg.num_nodes(), kUndef);
  for (std::uint32_t i = 0; i < rpo.size(); ++i) rank[index_of(rpo[i])] = i;

  std::vector<std::uint32_t> idom(cfg.num_nodes(), kUndef);
  idom[index_of(cfg.entry())] = index_of(cfg.entry());
  auto intersect = [&](std::uint32_t a, std::uint32_t b) {
    while (a != b) {
      while (rank[a] > rank[b]) a = idom[a];
      while (rank[b] > rank[a]) b = idom[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v : rpo) {
      if (v == cfg.entry()) continue;
      std::uint32_t best = kUndef;
      for (auto e : cfg.in_edges(v)) {
        std::uint32_t p = index_of(cfg.edge(e).source);
        if (idom[p] == kUndef) continue;
        best = best == kUndef ? p : intersect(p, best);
      }
      if (best != idom[index_of(v)]) {
        idom[index_of(v)] = best;
        changed = true;
      }
    }
  }
  std::vector<NodeId> out;
  out.reserve(idom.size());
  for (auto d : idom) out.push_back(NodeId{d == kUndef ? index_of(cfg.entry()) : d});
  return out;
}

bool dominates(const std::vector<NodeId>& idom, NodeId dominator, NodeId node, NodeId entry) {
  for (;;) {
    if (node == dominator) return true;
    if (node == entry) return false;
    node = idom[index_of(node)];
  }
}

std::vector<Scope> detect_natural_loops(const ControlFlowGraph& cfg) {
  const auto idom = immediate_dominators(cfg);
  const auto dfs = depth_first(cfg);
  for (auto e : dfs.retreating) {
    const auto& edge = cfg.edge(e);
    if (!dominates(idom, edge.target, edge.source, cfg.entry()))
      throw ValidationError("irreducible loop; declare scopes explicitly");
  }

  std::map<NodeId, std::vector<bool>> bodies;
  for (const auto& edge : cfg.edges()) {
    if (!dominates(idom, edge.target, edge.source, cfg.entry())) continue;
    auto [it, fresh] = bodies.try_emplace(edge.target, std::vector<bool>(cfg.num_nodes(), false));
    auto& body = it->second;
    body[index_of(edge.target)] = true;
    std::vector<NodeId> work;
    if (!body[index_of(edge.source)]) {
      body[index_of(edge.source)] = true;
      work.push_back(edge.source);
    }
    while (!work.empty()) {
      NodeId v = work.back();
      work.pop_back();
      for (auto in : cfg.in_edges(v)) {
        NodeId p = cfg.edge(in).source;
        if (!body[index_of(p)]) {
          body[index_of(p)] = true;
          work.push_back(p);
        }
      }
    }
  }

  std::vector<Scope> loops;
  for (const auto& [header, body] : bodies) {
    Scope s;
    s.header = header;
    for (std::uint32_t v = 0; v < body.size(); ++v)
      if (body[v]) s.members.push_back(NodeId{v});
    loops.push_back(std::move(s));
  }
  std::stable_sort(loops.begin(), loops.end(), [](const Scope& a, const Scope& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.header < b.header;
  });
  for (std::size_t i = 0; i < loops.size(); ++i) loops[i].name = "loop" + std::to_string(i + 1);
  return loops;
}

}  // namespace persist
