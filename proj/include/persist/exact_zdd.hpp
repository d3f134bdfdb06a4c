#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "persist/domain.hpp"
#include "persist/exact_explicit.hpp"
#include "persist/zdd.hpp"

namespace persist {

/// Conflict families of one block, split by how many distinct anonymous
/// blocks (from unknown accesses) each conflict set additionally contains:
/// slot i holds the sets with i anonymous blocks.
struct Layers {
  bool top = false;
  std::vector<ZddHandle> slots;  // k entries unless top

  friend bool operator==(const Layers&, const Layers&) = default;
};

/// Absent blocks have never been accessed.
struct LayeredState {
  std::map<BlockId, Layers> blocks;

  friend bool operator==(const LayeredState&, const LayeredState&) = default;
};

/// The exact analysis with ZDD-backed families. Accesses to at most
/// `many_threshold` candidate blocks are joined per block; larger candidate
/// sets and unknown accesses add one anonymous block instead.
class ZddExactDomain {
 public:
  using State = LayeredState;

  ZddExactDomain(ZddManager& mgr, DomainParams params);
  ZddExactDomain(ZddManager& mgr, DomainParams params, std::uint32_t many_threshold);

  ZddManager& manager() const noexcept { return *mgr_; }
  std::uint32_t k() const noexcept { return p_.k; }

  State bottom() const { return {}; }
  State init_entry() const { return {}; }
  State update(const State& s, const AccessLabel& label) const;
  State access(const State& s, BlockId b) const;
  State access_unknown(const State& s, const BlockSet& candidates) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

  /// Slot-0 family of `b` in explicit form, for comparisons with the explicit
  /// tiers; only meaningful while no unknown access has occurred.
  ConflictFamily slot0_family(const State& s, BlockId b) const;

  /// Internal ZDD nodes referenced by the state.
  std::size_t node_count(const State& s) const;

 private:
  Layers fresh(BlockId b) const;
  Layers top() const { return Layers{true, {}}; }

  ZddManager* mgr_;
  DomainParams p_;
  std::uint32_t threshold_;
};

static_assert(PersistenceDomain<ZddExactDomain>);

}  // namespace persist
