#include "persist/cfg.hpp"

#include <algorithm>
#include <bit>
#include <deque>

namespace persist {

AccessLabel AccessLabel::single(BlockId b) {
  AccessLabel l;
  l.kind_ = Kind::Single;
  l.blocks_ = BlockSet{b};
  return l;
}

AccessLabel AccessLabel::many(BlockSet blocks) {
  if (blocks.empty()) throw ValidationError("access set must not be empty");
  if (blocks.size() == 1) return single(*blocks.begin());
  AccessLabel l;
  l.kind_ = Kind::Many;
  l.blocks_ = std::move(blocks);
  return l;
}

AccessLabel AccessLabel::unknown() {
  AccessLabel l;
  l.kind_ = Kind::Unknown;
  return l;
}

BlockId AccessLabel::block() const {
  if (kind_ != Kind::Single) throw std::logic_error("AccessLabel::block on a non-Single label");
  return *blocks_.begin();
}

bool AccessLabel::may_access(BlockId b) const {
  switch (kind_) {
    case Kind::Empty: return false;
    case Kind::Unknown: return true;
    default: return blocks_.contains(b);
  }
}

bool Scope::contains(NodeId n) const { return std::binary_search(members.begin(), members.end(), n); }

void CacheConfig::validate() const {
  if (associativity < 1) throw ValidationError("associativity must be at least 1");
  if (num_sets < 1) throw ValidationError("number of cache sets must be at least 1");
  if (line_size < 1 || !std::has_single_bit(line_size))
    throw ValidationError("line size must be a positive power of two");
}

std::optional<NodeId> ControlFlowGraph::find_node(std::string_view name) const {
  auto it = node_by_name_.find(std::string(name));
  if (it == node_by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<BlockId> ControlFlowGraph::find_block(std::string_view name) const {
  auto it = block_by_name_.find(std::string(name));
  if (it == block_by_name_.end()) return std::nullopt;
  return it->second;
}

const Scope* ControlFlowGraph::find_scope(std::string_view name) const {
  for (const auto& s : scopes_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<NodeId> ControlFlowGraph::accessing_nodes(BlockId b) const {
  std::vector<NodeId> out;
  for (std::uint32_t v = 0; v < nodes_.size(); ++v) {
    for (auto e : out_[v]) {
      if (edges_[e].label.may_access(b)) {
        out.push_back(NodeId{v});
        break;
      }
    }
  }
  return out;
}

bool ControlFlowGraph::has_label(AccessLabel::Kind kind) const {
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) { return e.label.kind() == kind; });
}

bool operator==(const ControlFlowGraph& a, const ControlFlowGraph& b) {
  return a.nodes_ == b.nodes_ && a.blocks_ == b.blocks_ && a.edges_ == b.edges_ && a.entry_ == b.entry_ &&
         a.scopes_ == b.scopes_;
}

void ControlFlowGraph::index() {
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    out_[index_of(edges_[i].source)].push_back(i);
    in_[index_of(edges_[i].target)].push_back(i);
  }
}

namespace {

// Nodes reachable from `start` using only edges whose endpoints satisfy `allowed`.
template <typename Pred>
std::vector<bool> reachable_from(const ControlFlowGraph& g, NodeId start, Pred allowed) {
  std::vector<bool> seen(g.num_nodes(), false);
  std::deque<NodeId> queue{start};
  seen[index_of(start)] = true;
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (auto e : g.out_edges(v)) {
      NodeId w = g.edge(e).target;
      if (!seen[index_of(w)] && allowed(w)) {
        seen[index_of(w)] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

void ControlFlowGraph::validate() const {
  auto seen = reachable_from(*this, entry_, [](NodeId) { return true; });
  for (std::uint32_t v = 0; v < nodes_.size(); ++v)
    if (!seen[v]) throw ValidationError("unreachable node '" + nodes_[v].name + "'");

  if (scopes_.empty()) return;
  auto idom = immediate_dominators(*this);
  for (const auto& s : scopes_) {
    if (!s.contains(s.header))
      throw ValidationError("scope '" + s.name + "': header is not a member");
    auto inside = reachable_from(*this, s.header, [&](NodeId n) { return s.contains(n); });
    for (NodeId m : s.members)
      if (!inside[index_of(m)])
        throw ValidationError("scope '" + s.name + "': member '" + node(m).name +
                              "' is not reachable from the header inside the scope");
    for (auto e : in_[index_of(s.header)]) {
      NodeId src = edges_[e].source;
      if (dominates(idom, s.header, src, entry_) && !s.contains(src))
        throw ValidationError("scope '" + s.name + "': back edge from '" + node(src).name +
                              "' into the header originates outside the scope");
    }
  }
}

CfgBuilder CfgBuilder::with_blocks_of(const ControlFlowGraph& cfg) {
  CfgBuilder b;
  b.graph_.blocks_ = cfg.blocks_;
  b.graph_.block_by_name_ = cfg.block_by_name_;
  return b;
}

NodeId CfgBuilder::add_node(std::string name, std::optional<std::uint64_t> address) {
  if (graph_.node_by_name_.contains(name)) throw ValidationError("duplicate node declaration '" + name + "'");
  NodeId id{static_cast<std::uint32_t>(graph_.nodes_.size())};
  graph_.node_by_name_.emplace(name, id);
  graph_.nodes_.push_back(Node{std::move(name), address});
  return id;
}

BlockId CfgBuilder::add_block(std::string name, std::optional<std::uint64_t> address) {
  if (graph_.block_by_name_.contains(name)) throw ValidationError("duplicate block declaration '" + name + "'");
  BlockId id{static_cast<std::uint32_t>(graph_.blocks_.size())};
  graph_.block_by_name_.emplace(name, id);
  graph_.blocks_.push_back(MemoryBlock{std::move(name), address});
  return id;
}

BlockId CfgBuilder::intern_block(std::string_view name) {
  if (auto b = find_block(name)) return *b;
  return add_block(std::string(name));
}

std::optional<NodeId> CfgBuilder::find_node(std::string_view name) const { return graph_.find_node(name); }
std::optional<BlockId> CfgBuilder::find_block(std::string_view name) const { return graph_.find_block(name); }

void CfgBuilder::add_edge(NodeId source, AccessLabel label, NodeId target) {
  if (index_of(source) >= graph_.nodes_.size() || index_of(target) >= graph_.nodes_.size())
    throw ValidationError("edge endpoint undeclared");
  for (BlockId b : label.blocks())
    if (index_of(b) >= graph_.blocks_.size()) throw ValidationError("edge accesses an undeclared block");
  graph_.edges_.push_back(Edge{source, std::move(label), target});
}

void CfgBuilder::set_entry(NodeId entry) {
  if (index_of(entry) >= graph_.nodes_.size()) throw ValidationError("entry node undeclared");
  graph_.entry_ = entry;
  has_entry_ = true;
}

void CfgBuilder::add_scope(Scope scope) {
  if (scope.name == kProgramScope)
    throw ValidationError("scope name '" + std::string(kProgramScope) + "' is reserved");
  if (graph_.find_scope(scope.name)) throw ValidationError("duplicate scope '" + scope.name + "'");
  for (NodeId m : scope.members)
    if (index_of(m) >= graph_.nodes_.size()) throw ValidationError("scope member undeclared");
  std::sort(scope.members.begin(), scope.members.end());
  scope.members.erase(std::unique(scope.members.begin(), scope.members.end()), scope.members.end());
  graph_.scopes_.push_back(std::move(scope));
}

ControlFlowGraph CfgBuilder::build() && {
  if (!has_entry_) throw ValidationError("missing entry declaration");
  graph_.index();
  graph_.validate();
  return std::move(graph_);
}

namespace {

std::optional<std::uint32_t> block_set_index(const ControlFlowGraph& cfg, const CacheConfig& config, BlockId b) {
  if (config.num_sets == 1) return 0u;
  const auto& blk = cfg.block(b);
  if (!blk.address)
    throw ValidationError("block '" + blk.name + "' has no address; addresses are required with " +
                          std::to_string(config.num_sets) + " cache sets (use a single set for address-less input)");
  return config.set_of(*blk.address);
}

CfgBuilder copy_nodes(const ControlFlowGraph& cfg) {
  CfgBuilder b = CfgBuilder::with_blocks_of(cfg);
  for (const auto& n : cfg.nodes()) b.add_node(n.name, n.address);
  b.set_entry(cfg.entry());
  return b;
}

void copy_scopes(const ControlFlowGraph& cfg, CfgBuilder& b) {
  for (const auto& s : cfg.scopes()) b.add_scope(s);
}

}  // namespace

std::uint32_t cache_set_of(const ControlFlowGraph& cfg, const CacheConfig& config, BlockId b) {
  return *block_set_index(cfg, config, b);
}

ControlFlowGraph project_to_cache_set(const ControlFlowGraph& cfg, const CacheConfig& config,
                                      std::uint32_t set_index) {
  config.validate();
  if (set_index >= config.num_sets) throw ValidationError("cache set index out of range");
  for (const auto& blk : cfg.blocks())
    if (blk.address && *blk.address % config.line_size != 0)
      throw ValidationError("block '" + blk.name + "' address is not aligned to the line size");

  std::vector<std::uint32_t> set_of(cfg.num_blocks());
  for (std::uint32_t i = 0; i < cfg.num_blocks(); ++i) set_of[i] = cache_set_of(cfg, config, BlockId{i});

  CfgBuilder b = copy_nodes(cfg);
  for (const auto& e : cfg.edges()) {
    AccessLabel label = e.label;
    if (label.is_single() || label.is_many()) {
      BlockSet kept;
      for (BlockId x : label.blocks())
        if (set_of[index_of(x)] == set_index) kept.insert(x);
      label = kept.empty() ? AccessLabel::empty() : AccessLabel::many(std::move(kept));
    }
    b.add_edge(e.source, std::move(label), e.target);
  }
  copy_scopes(cfg, b);
  return std::move(b).build();
}

ControlFlowGraph restrict_to_scope(const ControlFlowGraph& cfg, const Scope& scope) {
  CfgBuilder b = CfgBuilder::with_blocks_of(cfg);
  std::vector<std::optional<NodeId>> remap(cfg.num_nodes());
  for (NodeId m : scope.members) {
    const auto& n = cfg.node(m);
    remap[index_of(m)] = b.add_node(n.name, n.address);
  }
  for (const auto& e : cfg.edges()) {
    auto s = remap[index_of(e.source)];
    auto t = remap[index_of(e.target)];
    if (s && t) b.add_edge(*s, e.label, *t);
  }
  b.set_entry(*remap.at(index_of(scope.header)));
  return std::move(b).build();
}

ControlFlowGraph expand_many_edges(const ControlFlowGraph& cfg) {
  CfgBuilder b = copy_nodes(cfg);
  for (const auto& e : cfg.edges()) {
    if (e.label.is_many()) {
      for (BlockId x : e.label.blocks()) b.add_edge(e.source, AccessLabel::single(x), e.target);
    } else {
      b.add_edge(e.source, e.label, e.target);
    }
  }
  copy_scopes(cfg, b);
  return std::move(b).build();
}

ControlFlowGraph concretize_uncertain_edges(const ControlFlowGraph& cfg, std::uint32_t extra_blocks) {
  CfgBuilder b = copy_nodes(cfg);
  std::vector<BlockId> universe;
  for (std::uint32_t i = 0; i < cfg.num_blocks(); ++i) universe.push_back(BlockId{i});
  for (std::uint32_t i = 0; i < extra_blocks; ++i) {
    std::string name = "anon" + std::to_string(i);
    while (b.find_block(name)) name.insert(0, "_");
    universe.push_back(b.add_block(name));
  }
  for (const auto& e : cfg.edges()) {
    if (e.label.is_many()) {
      for (BlockId x : e.label.blocks()) b.add_edge(e.source, AccessLabel::single(x), e.target);
    } else if (e.label.is_unknown()) {
      for (BlockId x : universe) b.add_edge(e.source, AccessLabel::single(x), e.target);
    } else {
      b.add_edge(e.source, e.label, e.target);
    }
  }
  copy_scopes(cfg, b);
  return std::move(b).build();
}

}  // namespace persist
