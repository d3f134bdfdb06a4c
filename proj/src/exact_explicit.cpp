#include "persist/exact_explicit.hpp"

#include <algorithm>

#include "persist/error.hpp"

namespace persist {

Family max_set(const Family& family) {
  Family out;
  for (const auto& s : family) {
    bool subsumed = std::any_of(family.begin(), family.end(),
                                [&](const BlockSet& t) { return s.is_proper_subset_of(t); });
    if (!subsumed) out.insert(s);
  }
  return out;
}

std::uint32_t max_cardinality(const Family& family) {
  std::size_t m = 0;
  for (const auto& s : family) m = std::max(m, s.size());
  return static_cast<std::uint32_t>(m);
}

ConflictFamily limit(const Family& family, std::uint32_t k) {
  if (max_cardinality(family) > k) return ConflictFamily::top();
  return ConflictFamily(family);
}

const ConflictFamily& ExactState::at(BlockId b) const {
  static const ConflictFamily kNever;
  auto it = families.find(b);
  return it == families.end() ? kNever : it->second;
}

ConflictFamily ExplicitExactDomain::normalize(Family f) const {
  switch (tier_) {
    case ExactTier::Raw: return ConflictFamily(std::move(f));
    case ExactTier::Maximal: return ConflictFamily(max_set(f));
    case ExactTier::Bounded: return limit(max_set(f), k_);
  }
  return ConflictFamily(std::move(f));
}

ExactState ExplicitExactDomain::access(const State& s, BlockId b) const {
  State out;
  for (const auto& [x, fam] : s.families) {
    if (x == b) continue;
    if (fam.is_top()) {
      out.families.emplace(x, fam);
      continue;
    }
    Family grown;
    for (const auto& set : fam.sets()) grown.insert(set.with(b));
    out.families.emplace(x, normalize(std::move(grown)));
  }
  out.families[b] = ConflictFamily(Family{BlockSet{b}});
  return out;
}

ExactState ExplicitExactDomain::update(const State& s, const AccessLabel& label) const {
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: return s;
    case AccessLabel::Kind::Single: return access(s, label.block());
    default: throw AnalysisError("explicit exact analysis supports only single-block accesses");
  }
}

ExactState ExplicitExactDomain::join(const State& a, const State& b) const {
  State out = a;
  for (const auto& [x, fam] : b.families) {
    auto [it, inserted] = out.families.try_emplace(x, fam);
    if (inserted || it->second.is_top()) continue;
    if (fam.is_top()) {
      it->second = fam;
      continue;
    }
    Family merged = it->second.sets();
    merged.insert(fam.sets().begin(), fam.sets().end());
    it->second = normalize(std::move(merged));
  }
  return out;
}

bool ExplicitExactDomain::classify(const State& s, BlockId b) const {
  const auto& fam = s.at(b);
  return !fam.is_top() && max_cardinality(fam.sets()) <= k_;
}

}  // namespace persist
