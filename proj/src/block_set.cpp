#include "persist/block_set.hpp"

#include <algorithm>

namespace persist {

BlockSet::BlockSet(std::initializer_list<BlockId> blocks) : blocks_(blocks) {
  std::sort(blocks_.begin(), blocks_.end());
  blocks_.erase(std::unique(blocks_.begin(), blocks_.end()), blocks_.end());
}

BlockSet::BlockSet(std::vector<BlockId> blocks) : blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end());
  blocks_.erase(std::unique(blocks_.begin(), blocks_.end()), blocks_.end());
}

BlockSet BlockSet::of(std::initializer_list<std::uint32_t> indices) {
  std::vector<BlockId> blocks;
  blocks.reserve(indices.size());
  for (auto i : indices) blocks.push_back(BlockId{i});
  return BlockSet(std::move(blocks));
}

bool BlockSet::insert(BlockId b) {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), b);
  if (it != blocks_.end() && *it == b) return false;
  blocks_.insert(it, b);
  return true;
}

bool BlockSet::erase(BlockId b) {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), b);
  if (it == blocks_.end() || *it != b) return false;
  blocks_.erase(it);
  return true;
}

bool BlockSet::contains(BlockId b) const {
  return std::binary_search(blocks_.begin(), blocks_.end(), b);
}

bool BlockSet::is_subset_of(const BlockSet& other) const {
  return size() <= other.size() &&
         std::includes(other.blocks_.begin(), other.blocks_.end(), blocks_.begin(), blocks_.end());
}

bool BlockSet::is_proper_subset_of(const BlockSet& other) const {
  return size() < other.size() && is_subset_of(other);
}

BlockSet BlockSet::united(const BlockSet& other) const {
  BlockSet out;
  out.blocks_.reserve(size() + other.size());
  std::set_union(blocks_.begin(), blocks_.end(), other.blocks_.begin(), other.blocks_.end(),
                 std::back_inserter(out.blocks_));
  return out;
}

BlockSet BlockSet::with(BlockId b) const {
  BlockSet out = *this;
  out.insert(b);
  return out;
}

std::strong_ordering operator<=>(const BlockSet& a, const BlockSet& b) {
  return std::lexicographical_compare_three_way(a.blocks_.begin(), a.blocks_.end(),
                                                b.blocks_.begin(), b.blocks_.end());
}

}  // namespace persist
