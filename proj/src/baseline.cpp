#include "persist/baseline.hpp"

#include <algorithm>

namespace persist {

namespace {

// Many-block accesses are the join of the single-block updates.
template <typename D>
typename D::State join_over(const D& d, const typename D::State& s, const BlockSet& blocks) {
  auto it = blocks.begin();
  auto acc = d.access(s, *it);
  for (++it; it != blocks.end(); ++it) acc = d.join(acc, d.access(s, *it));
  return acc;
}

}  // namespace

// --- Must ---------------------------------------------------------------

MustDomain::State MustDomain::access(const State& s, BlockId b) const {
  if (!s.reachable) return s;
  auto found = s.ages.find(b);
  const std::uint32_t old = found == s.ages.end() ? p_.k + 1 : found->second;
  State out{true, {}};
  for (const auto& [x, age] : s.ages) {
    if (x == b) continue;
    const std::uint32_t aged = age < old ? age + 1 : age;
    if (aged <= p_.k) out.ages.emplace(x, aged);
  }
  out.ages[b] = 1;
  return out;
}

MustDomain::State MustDomain::update(const State& s, const AccessLabel& label) const {
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: return s;
    case AccessLabel::Kind::Single: return access(s, label.block());
    case AccessLabel::Kind::Many: return join_over(*this, s, label.blocks());
    case AccessLabel::Kind::Unknown: {
      if (!s.reachable) return s;
      State out{true, {}};
      for (const auto& [x, age] : s.ages)
        if (age + 1 <= p_.k) out.ages.emplace(x, age + 1);
      return out;
    }
  }
  return s;
}

MustDomain::State MustDomain::join(const State& a, const State& b) const {
  if (!a.reachable) return b;
  if (!b.reachable) return a;
  State out{true, {}};
  for (const auto& [x, age] : a.ages) {
    auto it = b.ages.find(x);
    if (it != b.ages.end()) out.ages.emplace(x, std::max(age, it->second));
  }
  return out;
}

// --- C-Must -------------------------------------------------------------

CMustDomain::State CMustDomain::access(const State& s, BlockId b) const {
  State out;
  for (const auto& [x, bound] : s.bounds) {
    if (x == b) continue;
    const bool saturated = bound == kInfinite || bound + 1 > p_.k + slack_;
    out.bounds.emplace(x, saturated ? kInfinite : bound + 1);
  }
  out.bounds[b] = 1;
  return out;
}

CMustDomain::State CMustDomain::update(const State& s, const AccessLabel& label) const {
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: return s;
    case AccessLabel::Kind::Single: return access(s, label.block());
    case AccessLabel::Kind::Many: return join_over(*this, s, label.blocks());
    case AccessLabel::Kind::Unknown: {
      State out;
      for (const auto& [x, bound] : s.bounds) {
        const bool saturated = bound == kInfinite || bound + 1 > p_.k + slack_;
        out.bounds.emplace(x, saturated ? kInfinite : bound + 1);
      }
      // The unknown access may be the first access to any untouched block.
      for (BlockId x : p_.universe) out.bounds.try_emplace(x, 1);
      return out;
    }
  }
  return s;
}

CMustDomain::State CMustDomain::join(const State& a, const State& b) const {
  State out = a;
  for (const auto& [x, bound] : b.bounds) {
    auto [it, inserted] = out.bounds.try_emplace(x, bound);
    if (!inserted) it->second = std::max(it->second, bound);
  }
  return out;
}

bool CMustDomain::classify(const State& s, BlockId b) const {
  auto it = s.bounds.find(b);
  return it == s.bounds.end() || (it->second != kInfinite && it->second <= p_.k + slack_);
}

// --- Block-CS -----------------------------------------------------------

BlockCsDomain::State BlockCsDomain::access(const State& s, BlockId b) const {
  State out = s;
  for (auto& [x, entry] : out.sets)
    if (x != b) entry.named.insert(b);
  out.sets[b] = Entry{BlockSet{b}, 0};
  return out;
}

BlockCsDomain::State BlockCsDomain::update(const State& s, const AccessLabel& label) const {
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: return s;
    case AccessLabel::Kind::Single: return access(s, label.block());
    case AccessLabel::Kind::Many: return join_over(*this, s, label.blocks());
    case AccessLabel::Kind::Unknown: {
      State out = s;
      for (auto& [x, entry] : out.sets) entry.anonymous = std::min(entry.anonymous + 1, p_.k + 1);
      for (BlockId x : p_.universe) out.sets.try_emplace(x, Entry{BlockSet{x}, 0});
      return out;
    }
  }
  return s;
}

BlockCsDomain::State BlockCsDomain::join(const State& a, const State& b) const {
  State out = a;
  for (const auto& [x, entry] : b.sets) {
    auto [it, inserted] = out.sets.try_emplace(x, entry);
    if (!inserted) {
      it->second.named = it->second.named.united(entry.named);
      it->second.anonymous = std::max(it->second.anonymous, entry.anonymous);
    }
  }
  return out;
}

bool BlockCsDomain::classify(const State& s, BlockId b) const {
  auto it = s.sets.find(b);
  return it == s.sets.end() || it->second.named.size() + it->second.anonymous <= p_.k;
}

// --- Global-CS ----------------------------------------------------------

GlobalCsDomain::State GlobalCsDomain::update(const State& s, const AccessLabel& label) const {
  State out = s;
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: break;
    case AccessLabel::Kind::Single:
    case AccessLabel::Kind::Many: out.named = out.named.united(label.blocks()); break;
    case AccessLabel::Kind::Unknown: out.anonymous = std::min(out.anonymous + 1, p_.k + 1); break;
  }
  return out;
}

GlobalCsDomain::State GlobalCsDomain::join(const State& a, const State& b) const {
  return State{a.named.united(b.named), std::max(a.anonymous, b.anonymous)};
}

bool GlobalCsDomain::classify(const State& s, BlockId) const { return s.named.size() + s.anonymous <= p_.k; }

// --- Product ------------------------------------------------------------

void ProductDomain::reduce(State& s) const {
  if (!cooperative_ || !s.must.reachable) return;
  for (const auto& [x, age] : s.must.ages) {
    auto it = s.cmust.bounds.find(x);
    if (it != s.cmust.bounds.end() && age < it->second) it->second = age;
  }
}

ProductDomain::State ProductDomain::update(const State& s, const AccessLabel& label) const {
  State out{cmust_.update(s.cmust, label), must_.update(s.must, label), blockcs_.update(s.blockcs, label)};
  reduce(out);
  return out;
}

ProductDomain::State ProductDomain::join(const State& a, const State& b) const {
  State out{cmust_.join(a.cmust, b.cmust), must_.join(a.must, b.must), blockcs_.join(a.blockcs, b.blockcs)};
  reduce(out);
  return out;
}

bool ProductDomain::classify(const State& s, BlockId b) const {
  auto it = s.cmust.bounds.find(b);
  const bool cmust_ok = it == s.cmust.bounds.end() || it->second <= k_;
  return cmust_ok || blockcs_.classify(s.blockcs, b);
}

}  // namespace persist
