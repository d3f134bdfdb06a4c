#pragma once

#include <concepts>
#include <cstdint>

#include "persist/block_set.hpp"
#include "persist/cfg.hpp"

namespace persist {

/// The interface every persistence analysis offers to the fixpoint solver.
/// `leq(x, y)` must coincide with `join(x, y) == y`.
template <typename D>
concept PersistenceDomain = requires(const D& d, const typename D::State& s, const AccessLabel& label, BlockId b) {
  { d.bottom() } -> std::same_as<typename D::State>;
  { d.init_entry() } -> std::same_as<typename D::State>;
  { d.update(s, label) } -> std::same_as<typename D::State>;
  { d.join(s, s) } -> std::same_as<typename D::State>;
  { d.leq(s, s) } -> std::convertible_to<bool>;
  { d.classify(s, b) } -> std::convertible_to<bool>;
  requires std::equality_comparable<typename D::State>;
};

/// Parameters shared by all domains of one analysis run.
struct DomainParams {
  std::uint32_t k = 8;
  /// Blocks an Unknown access may touch. Blocks outside are never classified.
  BlockSet universe;
};

}  // namespace persist
