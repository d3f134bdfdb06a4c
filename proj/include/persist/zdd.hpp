#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "persist/block_set.hpp"
#include "persist/error.hpp"

namespace persist {

class ZddManager;

/// Reference-counted root into a ZddManager. Canonicity makes handle equality
/// equivalent to family equality within one manager.
class ZddHandle {
 public:
  ZddHandle() = default;
  ZddHandle(const ZddHandle& other);
  ZddHandle(ZddHandle&& other) noexcept;
  ZddHandle& operator=(const ZddHandle& other);
  ZddHandle& operator=(ZddHandle&& other) noexcept;
  ~ZddHandle();

  bool valid() const noexcept { return mgr_ != nullptr; }
  ZddManager* manager() const noexcept { return mgr_; }
  std::uint32_t node() const noexcept { return node_; }

  friend bool operator==(const ZddHandle& a, const ZddHandle& b) noexcept {
    return a.mgr_ == b.mgr_ && a.node_ == b.node_;
  }

 private:
  friend class ZddManager;
  ZddHandle(ZddManager* mgr, std::uint32_t node);
  void release() noexcept;

  ZddManager* mgr_ = nullptr;
  std::uint32_t node_ = 0;
};

/// Zero-suppressed decision diagrams over variables 0..num_vars-1, one per
/// block index. Smaller indices sit nearer the root.
///
/// Single-threaded. Nodes stay alive while a handle references them; call
/// collect_garbage() to reclaim the rest.
class ZddManager {
 public:
  explicit ZddManager(std::uint32_t num_vars);
  ZddManager(const ZddManager&) = delete;
  ZddManager& operator=(const ZddManager&) = delete;
  ~ZddManager();

  std::uint32_t num_vars() const noexcept { return num_vars_; }

  /// {} and {∅}.
  ZddHandle empty();
  ZddHandle base();
  /// {{b}}. Throws Error for a block outside the variable range.
  ZddHandle singleton_family(BlockId b);
  /// {s}.
  ZddHandle from_set(const BlockSet& s);
  ZddHandle from_sets(const std::vector<BlockSet>& sets);
  ZddHandle from_family(const Family& family);

  bool is_empty(const ZddHandle& f) const;
  bool is_base(const ZddHandle& f) const;

  ZddHandle set_union(const ZddHandle& f, const ZddHandle& g);
  /// Members of f not contained in any member of g.
  ZddHandle remove_subsumed(const ZddHandle& f, const ZddHandle& g);
  ZddHandle max_set(const ZddHandle& f);
  /// maxSet(f ∪ g).
  ZddHandle max_union(const ZddHandle& f, const ZddHandle& g);
  /// maxSet({s ∪ t | s ∈ f, t ∈ g}).
  ZddHandle max_dot_product(const ZddHandle& f, const ZddHandle& g);

  /// Largest member size; 0 for both {} and {∅}.
  std::uint32_t max_cardinality(const ZddHandle& f);
  std::uint64_t count_sets(const ZddHandle& f);
  /// Internal nodes reachable from f.
  std::size_t node_count(const ZddHandle& f) const;

  /// Members in lexicographic order. Throws Error above `cap` members.
  std::vector<BlockSet> enumerate(const ZddHandle& f, std::uint64_t cap = 1u << 16);
  Family to_family(const ZddHandle& f, std::uint64_t cap = 1u << 16);

  /// DOT rendering; `name` labels variables.
  std::string to_dot(const ZddHandle& f, const std::function<std::string(BlockId)>& name,
                     const std::string& graph_name = "zdd") const;

  std::size_t live_nodes() const noexcept { return live_; }
  std::size_t peak_nodes() const noexcept { return peak_; }

  void clear_caches();
  /// Frees every internal node unreachable from a live handle and clears the
  /// operation caches. Returns the number of nodes freed.
  std::size_t collect_garbage();

 private:
  friend class ZddHandle;

  static constexpr std::uint32_t kEmpty = 0;
  static constexpr std::uint32_t kBase = 1;

  struct NodeData {
    std::uint32_t var;
    std::uint32_t lo;
    std::uint32_t hi;
  };
  struct KeyHash {
    std::size_t operator()(const NodeData& n) const noexcept;
  };
  struct KeyEq {
    bool operator()(const NodeData& a, const NodeData& b) const noexcept {
      return a.var == b.var && a.lo == b.lo && a.hi == b.hi;
    }
  };
  using Cache = std::unordered_map<std::uint64_t, std::uint32_t>;

  void check(const ZddHandle& f) const;
  ZddHandle wrap(std::uint32_t node) { return ZddHandle(this, node); }
  std::uint32_t make(std::uint32_t var, std::uint32_t lo, std::uint32_t hi);
  std::uint32_t var_of(std::uint32_t n) const { return nodes_[n].var; }

  std::uint32_t union_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t nonsub_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t maxset_rec(std::uint32_t f);
  std::uint32_t maxunion_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t mdp_rec(std::uint32_t f, std::uint32_t g);
  std::uint32_t maxcard_rec(std::uint32_t f);
  void enumerate_rec(std::uint32_t f, std::vector<BlockId>& prefix, std::vector<BlockSet>& out) const;

  std::uint32_t num_vars_;
  std::vector<NodeData> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<NodeData, std::uint32_t, KeyHash, KeyEq> unique_;
  Cache union_cache_, nonsub_cache_, maxset_cache_, maxunion_cache_, mdp_cache_, maxcard_cache_;
  std::size_t live_ = 0;
  std::size_t peak_ = 0;
  std::size_t handles_ = 0;
};

}  // namespace persist
