#pragma once

#include <cstdint>
#include <limits>
#include <map>

#include "persist/domain.hpp"

namespace persist {

/// LRU must analysis: upper bounds on ages of blocks guaranteed cached.
class MustDomain {
 public:
  struct State {
    bool reachable = false;
    std::map<BlockId, std::uint32_t> ages;  // 1..k

    friend bool operator==(const State&, const State&) = default;
  };

  explicit MustDomain(DomainParams params) : p_(std::move(params)) {}

  State bottom() const { return {}; }
  State init_entry() const { return State{true, {}}; }
  State update(const State& s, const AccessLabel& label) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const { return !s.reachable || s.ages.contains(b); }

  State access(const State& s, BlockId b) const;

 private:
  DomainParams p_;
};

/// Scalar bound on the conflict-set size of each block.
class CMustDomain {
 public:
  static constexpr std::uint32_t kInfinite = std::numeric_limits<std::uint32_t>::max();

  /// Absent blocks have never been accessed.
  struct State {
    std::map<BlockId, std::uint32_t> bounds;  // 1..k or kInfinite

    friend bool operator==(const State&, const State&) = default;
  };

  /// `classify_slack` > 0 deliberately weakens the classification; used only
  /// to check that the differential harness catches unsound analyses.
  explicit CMustDomain(DomainParams params, std::uint32_t classify_slack = 0)
      : p_(std::move(params)), slack_(classify_slack) {}

  State bottom() const { return {}; }
  State init_entry() const { return {}; }
  State update(const State& s, const AccessLabel& label) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

  State access(const State& s, BlockId b) const;

 private:
  DomainParams p_;
  std::uint32_t slack_;
};

/// One superset of all conflict sets per block. Unknown accesses are kept as
/// a count of anonymous blocks, saturating at k + 1.
class BlockCsDomain {
 public:
  struct Entry {
    BlockSet named;
    std::uint32_t anonymous = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };
  struct State {
    std::map<BlockId, Entry> sets;

    friend bool operator==(const State&, const State&) = default;
  };

  explicit BlockCsDomain(DomainParams params) : p_(std::move(params)) {}

  State bottom() const { return {}; }
  State init_entry() const { return {}; }
  State update(const State& s, const AccessLabel& label) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

  State access(const State& s, BlockId b) const;

 private:
  DomainParams p_;
};

/// One conflict superset shared by all blocks: everything accessed since the
/// scope was entered.
class GlobalCsDomain {
 public:
  struct State {
    BlockSet named;
    std::uint32_t anonymous = 0;

    friend bool operator==(const State&, const State&) = default;
  };

  explicit GlobalCsDomain(DomainParams params) : p_(std::move(params)) {}

  State bottom() const { return {}; }
  State init_entry() const { return {}; }
  State update(const State& s, const AccessLabel& label) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

 private:
  DomainParams p_;
};

/// C-Must x Must x Block-CS. With cooperation on, each update lowers the
/// C-Must bound of a block to its Must age when that is smaller.
class ProductDomain {
 public:
  struct State {
    CMustDomain::State cmust;
    MustDomain::State must;
    BlockCsDomain::State blockcs;

    friend bool operator==(const State&, const State&) = default;
  };

  explicit ProductDomain(DomainParams params, bool cooperative = true)
      : cmust_(params), must_(params), blockcs_(params), k_(params.k), cooperative_(cooperative) {}

  State bottom() const { return {cmust_.bottom(), must_.bottom(), blockcs_.bottom()}; }
  State init_entry() const { return {cmust_.init_entry(), must_.init_entry(), blockcs_.init_entry()}; }
  State update(const State& s, const AccessLabel& label) const;
  State join(const State& a, const State& b) const;
  bool leq(const State& a, const State& b) const { return join(a, b) == b; }
  bool classify(const State& s, BlockId b) const;

 private:
  void reduce(State& s) const;

  CMustDomain cmust_;
  MustDomain must_;
  BlockCsDomain blockcs_;
  std::uint32_t k_;
  bool cooperative_;
};

static_assert(PersistenceDomain<MustDomain>);
static_assert(PersistenceDomain<CMustDomain>);
static_assert(PersistenceDomain<BlockCsDomain>);
static_assert(PersistenceDomain<GlobalCsDomain>);
static_assert(PersistenceDomain<ProductDomain>);

}  // namespace persist
