#include "persist/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace persist {

UndirectedGraph::UndirectedGraph(std::uint32_t vertices,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list)
    : n(vertices) {
  for (auto [a, b] : edge_list) {
    if (a == b) throw ValidationError("self-loop on vertex " + std::to_string(a));
    if (a >= n || b >= n) throw ValidationError("edge endpoint out of range");
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

bool UndirectedGraph::adjacent(std::uint32_t a, std::uint32_t b) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(std::min(a, b), std::max(a, b)));
}

UndirectedGraph UndirectedGraph::parse_edge_list(std::string_view text) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> list;
  std::optional<std::uint32_t> declared;
  std::uint32_t max_index = 0;
  bool any = false;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto bad = [&] { return ParseError(lineno, 1, "expected 'vertices N' or a vertex pair"); };
    if (first == "vertices") {
      long long v;
      if (!(ls >> v) || v < 0) throw bad();
      declared = static_cast<std::uint32_t>(v);
    } else {
      long long a, b;
      try {
        a = std::stoll(first);
      } catch (const std::exception&) {
        throw bad();
      }
      if (!(ls >> b) || a < 0 || b < 0) throw bad();
      list.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
      max_index = std::max({max_index, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
      any = true;
    }
    std::string rest;
    if (ls >> rest) throw bad();
  }
  const std::uint32_t n = declared ? *declared : (any ? max_index + 1 : 0);
  return UndirectedGraph(n, std::move(list));
}

bool brute_force_hamiltonian(const UndirectedGraph& g) {
  if (g.n > 10) throw ValidationError("Hamiltonian brute force is limited to 10 vertices");
  if (g.n < 2) return false;
  if (g.n == 2) return g.adjacent(0, 1);
  std::vector<bool> used(g.n, false);
  used[0] = true;
  auto extend = [&](auto&& self, std::uint32_t last, std::uint32_t placed) -> bool {
    if (placed == g.n) return g.adjacent(last, 0);
    for (std::uint32_t v = 1; v < g.n; ++v) {
      if (used[v] || !g.adjacent(last, v)) continue;
      used[v] = true;
      if (self(self, v, placed + 1)) return true;
      used[v] = false;
    }
    return false;
  };
  return extend(extend, 0, 1);
}

UndirectedGraph random_undirected_graph(std::uint32_t n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return UndirectedGraph(n, std::move(edges));
}

HamiltonianInstance gen_hamiltonian_cfg(const UndirectedGraph& g, std::uint64_t address_stride) {
  const std::uint32_t n = g.n;
  if (n < 2) throw ValidationError("the reduction needs at least two vertices");

  // Layer 0 holds only v0, layers 1..n-1 hold v1..v{n-1}, layer n holds only v0.
  struct Proto {
    std::uint32_t vertex, layer;
  };
  std::vector<Proto> protos{{0, 0}};
  for (std::uint32_t l = 1; l < n; ++l)
    for (std::uint32_t j = 1; j < n; ++j) protos.push_back({j, l});
  protos.push_back({0, n});
  auto proto_index = [&](std::uint32_t vertex, std::uint32_t layer) -> std::uint32_t {
    if (layer == 0) return 0;
    if (layer == n) return static_cast<std::uint32_t>(protos.size() - 1);
    return 1 + (layer - 1) * (n - 1) + (vertex - 1);
  };
  struct ProtoEdge {
    std::uint32_t from, to, block;  // block == n marks the back edge
  };
  std::vector<ProtoEdge> pedges;
  for (std::uint32_t p = 0; p + 1 < protos.size(); ++p) {
    const auto [j, l] = protos[p];
    if (l + 1 == n) {
      if (g.adjacent(j, 0)) pedges.push_back({p, proto_index(0, n), 0});
      continue;
    }
    for (std::uint32_t jj = 1; jj < n; ++jj)
      if (g.adjacent(j, jj)) pedges.push_back({p, proto_index(jj, l + 1), jj});
  }
  pedges.push_back({proto_index(0, n), 0, n});

  std::vector<bool> live(protos.size(), false);
  live[0] = true;
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& e : pedges)
      if (live[e.from] && !live[e.to]) live[e.to] = grew = true;
  }

  CfgBuilder b;
  std::vector<BlockId> blocks;
  for (std::uint32_t j = 0; j < n; ++j) blocks.push_back(b.add_block("a" + std::to_string(j), j * address_stride));
  const BlockId target = b.add_block("b", std::uint64_t{n} * address_stride);
  std::vector<std::optional<NodeId>> ids(protos.size());
  for (std::uint32_t p = 0; p < protos.size(); ++p)
    if (live[p])
      ids[p] = b.add_node("v" + std::to_string(protos[p].vertex) + "_" + std::to_string(protos[p].layer));
  for (const auto& e : pedges) {
    if (!live[e.from]) continue;
    b.add_edge(*ids[e.from], AccessLabel::single(e.block == n ? target : blocks[e.block]), *ids[e.to]);
  }
  b.set_entry(*ids[0]);
  return HamiltonianInstance{std::move(b).build(), target, n};
}

ControlFlowGraph gen_random_cfg(std::uint64_t seed, const RandomCfgParams& p) {
  if (p.nodes < 1) throw ValidationError("a random CFG needs at least one node");
  if (p.blocks < 1) throw ValidationError("a random CFG needs at least one block");
  for (double rate : {p.loop_probability, p.empty_rate, p.many_rate, p.unknown_rate})
    if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("probabilities must lie in [0, 1]");
  if (p.empty_rate + p.many_rate + p.unknown_rate > 1.0)
    throw ValidationError("label rates must not sum to more than 1");
  if (p.branch_factor < 1.0) throw ValidationError("branch factor must be at least 1");

  std::mt19937_64 rng(seed);
  auto uniform = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution loop_coin(p.loop_probability);
  const double extra = p.branch_factor - 1.0;
  const auto whole_extra = static_cast<std::uint32_t>(std::floor(extra));
  std::bernoulli_distribution extra_coin(extra - std::floor(extra));

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 1; i < p.nodes; ++i) edges.emplace_back(uniform(0, i - 1), i);
  for (std::uint32_t i = 0; i + 1 < p.nodes; ++i) {
    const std::uint32_t count = whole_extra + (extra_coin(rng) ? 1 : 0);
    for (std::uint32_t c = 0; c < count; ++c) edges.emplace_back(i, uniform(i + 1, p.nodes - 1));
  }

  // Dominators of the forward skeleton; back edges only go to them.
  std::vector<NodeId> idom;
  {
    CfgBuilder skel;
    for (std::uint32_t i = 0; i < p.nodes; ++i) skel.add_node("n" + std::to_string(i));
    for (auto [s, t] : edges) skel.add_edge(NodeId{s}, AccessLabel::empty(), NodeId{t});
    skel.set_entry(NodeId{0});
    idom = immediate_dominators(std::move(skel).build());
  }
  for (std::uint32_t i = 0; i < p.nodes; ++i) {
    if (!loop_coin(rng)) continue;
    std::vector<std::uint32_t> doms{i};
    for (std::uint32_t v = i; v != 0;) {
      v = index_of(idom[v]);
      doms.push_back(v);
    }
    edges.emplace_back(i, doms[uniform(0, static_cast<std::uint32_t>(doms.size() - 1))]);
  }
  std::stable_sort(edges.begin(), edges.end());

  CfgBuilder b;
  for (std::uint32_t i = 0; i < p.nodes; ++i) b.add_node("n" + std::to_string(i));
  for (std::uint32_t i = 0; i < p.blocks; ++i) b.add_block("b" + std::to_string(i), i * p.address_stride);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint32_t many_cap = std::min(p.max_many, p.blocks);
  for (auto [s, t] : edges) {
    const double r = unit(rng);
    AccessLabel label;
    if (r < p.unknown_rate) {
      label = AccessLabel::unknown();
    } else if (r < p.unknown_rate + p.many_rate && many_cap >= 2) {
      std::vector<std::uint32_t> pool(p.blocks);
      for (std::uint32_t i = 0; i < p.blocks; ++i) pool[i] = i;
      std::shuffle(pool.begin(), pool.end(), rng);
      BlockSet set;
      const std::uint32_t size = uniform(2, many_cap);
      for (std::uint32_t i = 0; i < size; ++i) set.insert(BlockId{pool[i]});
      label = AccessLabel::many(std::move(set));
    } else if (r < p.unknown_rate + p.many_rate + p.empty_rate) {
      label = AccessLabel::empty();
    } else {
      label = AccessLabel::single(BlockId{uniform(0, p.blocks - 1)});
    }
    b.add_edge(NodeId{s}, std::move(label), NodeId{t});
  }
  b.set_entry(NodeId{0});
  return std::move(b).build();
}

}  // namespace persist
