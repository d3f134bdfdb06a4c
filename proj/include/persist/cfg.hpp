#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "persist/block_set.hpp"
#include "persist/error.hpp"

namespace persist {

/// A cache-line-sized block of memory. Names are unique within one CFG.
struct MemoryBlock {
  std::string name;
  std::optional<std::uint64_t> address;

  friend bool operator==(const MemoryBlock&, const MemoryBlock&) = default;
};

struct Node {
  std::string name;
  std::optional<std::uint64_t> address;

  friend bool operator==(const Node&, const Node&) = default;
};

/// What an edge accesses: nothing, one known block, one of several known
/// blocks, or an arbitrary block the preprocessing could not pin down.
class AccessLabel {
 public:
  enum class Kind : std::uint8_t { Empty, Single, Many, Unknown };

  AccessLabel() = default;

  static AccessLabel empty() { return AccessLabel(); }
  static AccessLabel single(BlockId b);
  /// Normalizes: one block becomes Single. Throws on an empty set.
  static AccessLabel many(BlockSet blocks);
  static AccessLabel unknown();

  Kind kind() const noexcept { return kind_; }
  bool is_empty() const noexcept { return kind_ == Kind::Empty; }
  bool is_single() const noexcept { return kind_ == Kind::Single; }
  bool is_many() const noexcept { return kind_ == Kind::Many; }
  bool is_unknown() const noexcept { return kind_ == Kind::Unknown; }

  /// The accessed block of a Single label.
  BlockId block() const;
  /// Candidate blocks of a Single or Many label; empty for Empty/Unknown.
  const BlockSet& blocks() const noexcept { return blocks_; }

  /// True when an access through this label may touch `b`.
  bool may_access(BlockId b) const;

  friend bool operator==(const AccessLabel&, const AccessLabel&) = default;

 private:
  Kind kind_ = Kind::Empty;
  BlockSet blocks_;
};

struct Edge {
  NodeId source;
  AccessLabel label;
  NodeId target;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A persistence scope: a region entered through `header`.
struct Scope {
  std::string name;
  NodeId header;
  std::vector<NodeId> members;  // sorted, contains header

  bool contains(NodeId n) const;

  friend bool operator==(const Scope&, const Scope&) = default;
};

/// Name of the implicit outermost scope (the whole program).
inline constexpr std::string_view kProgramScope = "program";

struct CacheConfig {
  std::uint32_t associativity = 8;
  std::uint32_t num_sets = 32;
  std::uint32_t line_size = 16;

  /// Throws ValidationError unless all fields are positive and the line size
  /// is a power of two.
  void validate() const;

  /// Cache set of a block address.
  std::uint32_t set_of(std::uint64_t address) const {
    return static_cast<std::uint32_t>((address / line_size) % num_sets);
  }
};

/// A validated control-flow graph. Immutable; build one with CfgBuilder.
class ControlFlowGraph {
 public:
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(NodeId n) const { return nodes_.at(index_of(n)); }
  const std::vector<MemoryBlock>& blocks() const noexcept { return blocks_; }
  const MemoryBlock& block(BlockId b) const { return blocks_.at(index_of(b)); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::uint32_t e) const { return edges_.at(e); }
  NodeId entry() const noexcept { return entry_; }
  const std::vector<Scope>& scopes() const noexcept { return scopes_; }

  /// Indices into edges() of the edges leaving / entering `n`, in input order.
  std::span<const std::uint32_t> out_edges(NodeId n) const { return out_.at(index_of(n)); }
  std::span<const std::uint32_t> in_edges(NodeId n) const { return in_.at(index_of(n)); }

  std::optional<NodeId> find_node(std::string_view name) const;
  std::optional<BlockId> find_block(std::string_view name) const;
  const Scope* find_scope(std::string_view name) const;

  /// V_b: nodes with an outgoing edge that may access `b`, in node order.
  std::vector<NodeId> accessing_nodes(BlockId b) const;

  bool has_label(AccessLabel::Kind kind) const;

  friend bool operator==(const ControlFlowGraph& a, const ControlFlowGraph& b);

 private:
  friend class CfgBuilder;
  ControlFlowGraph() = default;
  void index();
  void validate() const;

  std::vector<Node> nodes_;
  std::vector<MemoryBlock> blocks_;
  std::vector<Edge> edges_;
  NodeId entry_{0};
  std::vector<Scope> scopes_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
  std::unordered_map<std::string, NodeId> node_by_name_;
  std::unordered_map<std::string, BlockId> block_by_name_;
};

/// Incrementally assembles a graph; build() validates it.
class CfgBuilder {
 public:
  CfgBuilder() = default;

  /// Starts from the block table of `cfg` so block ids stay comparable.
  static CfgBuilder with_blocks_of(const ControlFlowGraph& cfg);

  NodeId add_node(std::string name, std::optional<std::uint64_t> address = std::nullopt);
  BlockId add_block(std::string name, std::optional<std::uint64_t> address = std::nullopt);
  /// Returns the existing id, or interns a new address-less block.
  BlockId intern_block(std::string_view name);

  std::optional<NodeId> find_node(std::string_view name) const;
  std::optional<BlockId> find_block(std::string_view name) const;
  std::size_t num_nodes() const noexcept { return graph_.nodes_.size(); }

  void add_edge(NodeId source, AccessLabel label, NodeId target);
  void set_entry(NodeId entry);
  void add_scope(Scope scope);

  /// Validates and returns the graph. Throws ValidationError.
  ControlFlowGraph build() &&;

 private:
  ControlFlowGraph graph_;
  bool has_entry_ = false;
};

/// Parses the line-oriented CFG document format. Throws ParseError for
/// syntax problems and ValidationError for semantic ones.
ControlFlowGraph parse_cfg(std::string_view text);

/// Canonical document: entry, nodes, blocks, edges, scopes, each group in
/// declaration order. parse_cfg(print_cfg(g)) == g.
std::string print_cfg(const ControlFlowGraph& cfg);

/// Depth-first reverse postorder from the entry, following out-edges in order.
std::vector<NodeId> reverse_postorder(const ControlFlowGraph& cfg);

/// Immediate dominator of every node; the entry maps to itself.
std::vector<NodeId> immediate_dominators(const ControlFlowGraph& cfg);
bool dominates(const std::vector<NodeId>& idom, NodeId dominator, NodeId node, NodeId entry);

/// One scope per natural loop, innermost first, named loop1, loop2, ...
/// Throws ValidationError on irreducible control flow.
std::vector<Scope> detect_natural_loops(const ControlFlowGraph& cfg);

/// Accesses to blocks outside cache set `set_index` become Empty; Unknown
/// accesses are kept. Throws ValidationError when a block lacks an address
/// (num_sets > 1) or an address is not line aligned.
ControlFlowGraph project_to_cache_set(const ControlFlowGraph& cfg, const CacheConfig& config,
                                      std::uint32_t set_index);

/// The cache set holding `b` (0 when the cache has a single set).
std::uint32_t cache_set_of(const ControlFlowGraph& cfg, const CacheConfig& config, BlockId b);

/// The scope's member subgraph entered at its header; exit edges dropped,
/// block table preserved, no scopes.
ControlFlowGraph restrict_to_scope(const ControlFlowGraph& cfg, const Scope& scope);

/// Replaces every Many edge by one parallel Single edge per candidate block.
ControlFlowGraph expand_many_edges(const ControlFlowGraph& cfg);

/// Replaces every Many edge by parallel Single edges over its candidates and
/// every Unknown edge by parallel Single edges over the whole block table plus
/// `extra_blocks` fresh blocks appended to it.
ControlFlowGraph concretize_uncertain_edges(const ControlFlowGraph& cfg, std::uint32_t extra_blocks);

}  // namespace persist
