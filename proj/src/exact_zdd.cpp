#include "persist/exact_zdd.hpp"

namespace persist {

ZddExactDomain::ZddExactDomain(ZddManager& mgr, DomainParams params)
    : ZddExactDomain(mgr, params, params.k) {}

ZddExactDomain::ZddExactDomain(ZddManager& mgr, DomainParams params, std::uint32_t many_threshold)
    : mgr_(&mgr), p_(std::move(params)), threshold_(many_threshold) {
  if (p_.k < 1) throw AnalysisError("associativity must be at least 1");
}

Layers ZddExactDomain::fresh(BlockId b) const {
  Layers l;
  l.slots.assign(p_.k, mgr_->empty());
  l.slots[0] = mgr_->singleton_family(b);
  return l;
}

LayeredState ZddExactDomain::access(const State& s, BlockId b) const {
  const ZddHandle accessed = mgr_->singleton_family(b);
  State out;
  for (const auto& [x, layers] : s.blocks) {
    if (x == b) continue;
    if (layers.top) {
      out.blocks.emplace(x, layers);
      continue;
    }
    Layers next;
    next.slots.reserve(p_.k);
    for (std::uint32_t i = 0; i < p_.k; ++i) {
      const ZddHandle& slot = layers.slots[i];
      if (mgr_->is_empty(slot)) {
        next.slots.push_back(slot);
        continue;
      }
      ZddHandle grown = mgr_->max_dot_product(slot, accessed);
      if (mgr_->max_cardinality(grown) + i > p_.k) {
        next = top();
        break;
      }
      next.slots.push_back(std::move(grown));
    }
    out.blocks.emplace(x, std::move(next));
  }
  out.blocks[b] = fresh(b);
  return out;
}

LayeredState ZddExactDomain::access_unknown(const State& s, const BlockSet& candidates) const {
  State out;
  for (const auto& [x, layers] : s.blocks) {
    if (layers.top || !mgr_->is_empty(layers.slots[p_.k - 1])) {
      out.blocks.emplace(x, top());
      continue;
    }
    Layers next;
    next.slots.reserve(p_.k);
    next.slots.push_back(mgr_->empty());
    for (std::uint32_t i = 0; i + 1 < p_.k; ++i) {
      const ZddHandle& slot = layers.slots[i];
      if (!mgr_->is_empty(slot) && mgr_->max_cardinality(slot) + i + 1 > p_.k) {
        next = top();
        break;
      }
      next.slots.push_back(slot);
    }
    out.blocks.emplace(x, std::move(next));
  }
  // A block never accessed so far may be the one this access touches.
  for (BlockId x : candidates) out.blocks.try_emplace(x, fresh(x));
  return out;
}

LayeredState ZddExactDomain::update(const State& s, const AccessLabel& label) const {
  switch (label.kind()) {
    case AccessLabel::Kind::Empty: return s;
    case AccessLabel::Kind::Single: return access(s, label.block());
    case AccessLabel::Kind::Many: {
      if (label.blocks().size() > threshold_) return access_unknown(s, label.blocks());
      auto it = label.blocks().begin();
      State acc = access(s, *it);
      for (++it; it != label.blocks().end(); ++it) acc = join(acc, access(s, *it));
      return acc;
    }
    case AccessLabel::Kind::Unknown: return access_unknown(s, p_.universe);
  }
  return s;
}

LayeredState ZddExactDomain::join(const State& a, const State& b) const {
  State out = a;
  for (const auto& [x, layers] : b.blocks) {
    auto [it, inserted] = out.blocks.try_emplace(x, layers);
    if (inserted || it->second.top) continue;
    if (layers.top) {
      it->second = layers;
      continue;
    }
    for (std::uint32_t i = 0; i < p_.k; ++i)
      it->second.slots[i] = mgr_->max_union(it->second.slots[i], layers.slots[i]);
  }
  return out;
}

bool ZddExactDomain::classify(const State& s, BlockId b) const {
  auto it = s.blocks.find(b);
  if (it == s.blocks.end()) return true;
  if (it->second.top) return false;
  for (std::uint32_t i = 0; i < p_.k; ++i) {
    const ZddHandle& slot = it->second.slots[i];
    if (!mgr_->is_empty(slot) && mgr_->max_cardinality(slot) + i > p_.k) return false;
  }
  return true;
}

ConflictFamily ZddExactDomain::slot0_family(const State& s, BlockId b) const {
  auto it = s.blocks.find(b);
  if (it == s.blocks.end()) return ConflictFamily();
  if (it->second.top) return ConflictFamily::top();
  return ConflictFamily(mgr_->to_family(it->second.slots[0]));
}

std::size_t ZddExactDomain::node_count(const State& s) const {
  // Shared nodes are counted once per slot; this is a size indicator only.
  std::size_t n = 0;
  for (const auto& [x, layers] : s.blocks)
    for (const auto& slot : layers.slots) n += mgr_->node_count(slot);
  return n;
}

}  // namespace persist
