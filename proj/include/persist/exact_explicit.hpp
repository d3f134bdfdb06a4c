#pragma once

#include <cstdint>
#include <map>

#include "persist/domain.hpp"

namespace persist {

/// Members of `family` not strictly contained in another member.
Family max_set(const Family& family);

/// Largest member size; 0 for the empty family.
std::uint32_t max_cardinality(const Family& family);

/// The conflict sets of one block: an explicit family, or Top (some conflict
/// set may exceed the associativity). An empty family means never accessed.
class ConflictFamily {
 public:
  ConflictFamily() = default;
  explicit ConflictFamily(Family sets) : sets_(std::move(sets)) {}
  static ConflictFamily top() {
    ConflictFamily f;
    f.top_ = true;
    return f;
  }

  bool is_top() const noexcept { return top_; }
  /// Members; empty for Top.
  const Family& sets() const noexcept { return sets_; }

  friend bool operator==(const ConflictFamily&, const ConflictFamily&) = default;

 private:
  bool top_ = false;
  Family sets_;
};

/// Top when some member has more than k blocks, otherwise the family itself.
ConflictFamily limit(const Family& family, std::uint32_t k);

enum class ExactTier : std::uint8_t {
  Raw,      // every conflict set kept
  Maximal,  // only maximal conflict sets kept
  Bounded,  // maximal sets, collapsed to Top once one exceeds k
};

/// Per-block conflict families. Absent blocks have never been accessed.
struct ExactState {
  std::map<BlockId, ConflictFamily> families;

  const ConflictFamily& at(BlockId b) const;
  friend bool operator==(const ExactState&, const ExactState&) = default;
};

/// Exact conflict-set analysis over explicit families. Handles Single and
/// Empty labels only; expand Many edges first.
class ExplicitExactDomain {
 public:
  using State = ExactState;

  ExplicitExactDomain(ExactTier tier, std::uint32_t k) : tier_(tier), k_(k) {}

  ExactTier tier() const noexcept { return tier_; }

  State bottom() const { return {}; }
  State init_entry() const { return {}; }
  /// Throws AnalysisError for Many and Unknown labels.
  State update(const State& s, const AccessLabel& label) const;
  State access(const State& s, BlockId b) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

 private:
  ConflictFamily normalize(Family f) const;

  ExactTier tier_;
  std::uint32_t k_;
};

static_assert(PersistenceDomain<ExplicitExactDomain>);

}  // namespace persist
