#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace persist {

/// Index of an interned memory block inside one CFG's block table.
enum class BlockId : std::uint32_t {};

/// Index of a control location inside one CFG.
enum class NodeId : std::uint32_t {};

constexpr std::uint32_t index_of(BlockId b) noexcept { return static_cast<std::uint32_t>(b); }
constexpr std::uint32_t index_of(NodeId n) noexcept { return static_cast<std::uint32_t>(n); }

/// A finite set of blocks kept as a sorted, duplicate-free vector.
///
/// Sets are small in every use (conflict sets are capped near the
/// associativity), so a flat vector beats node-based containers and gives a
/// canonical representation that orders lexicographically by block index.
class BlockSet {
 public:
  BlockSet() = default;
  BlockSet(std::initializer_list<BlockId> blocks);
  explicit BlockSet(std::vector<BlockId> blocks);

  static BlockSet of(std::initializer_list<std::uint32_t> indices);

  bool insert(BlockId b);
  bool erase(BlockId b);
  bool contains(BlockId b) const;

  std::size_t size() const noexcept { return blocks_.size(); }
  bool empty() const noexcept { return blocks_.empty(); }

  /// `*this` ⊆ `other`.
  bool is_subset_of(const BlockSet& other) const;
  /// `*this` ⊊ `other`.
  bool is_proper_subset_of(const BlockSet& other) const;

  BlockSet united(const BlockSet& other) const;
  BlockSet with(BlockId b) const;

  auto begin() const noexcept { return blocks_.begin(); }
  auto end() const noexcept { return blocks_.end(); }
  std::span<const BlockId> view() const noexcept { return blocks_; }

  friend bool operator==(const BlockSet&, const BlockSet&) = default;
  friend std::strong_ordering operator<=>(const BlockSet& a, const BlockSet& b);

 private:
  std::vector<BlockId> blocks_;
};

/// A set of block sets in canonical (sorted) order.
using Family = std::set<BlockSet>;

}  // namespace persist
