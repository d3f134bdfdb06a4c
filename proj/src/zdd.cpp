#include "persist/zdd.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <utility>

namespace persist {

namespace {

constexpr std::uint32_t kFreeVar = ~0u;
constexpr std::size_t kCacheLimit = std::size_t{1} << 22;

std::uint64_t key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

std::uint64_t sym_key(std::uint32_t a, std::uint32_t b) { return a < b ? key(a, b) : key(b, a); }

}  // namespace

ZddHandle::ZddHandle(ZddManager* mgr, std::uint32_t node) : mgr_(mgr), node_(node) {
  ++mgr_->refs_[node_];
  ++mgr_->handles_;
}

ZddHandle::ZddHandle(const ZddHandle& other) : mgr_(other.mgr_), node_(other.node_) {
  if (mgr_) {
    ++mgr_->refs_[node_];
    ++mgr_->handles_;
  }
}

ZddHandle::ZddHandle(ZddHandle&& other) noexcept
    : mgr_(std::exchange(other.mgr_, nullptr)), node_(std::exchange(other.node_, 0)) {}

ZddHandle& ZddHandle::operator=(const ZddHandle& other) {
  if (this != &other) {
    ZddHandle copy(other);
    *this = std::move(copy);
  }
  return *this;
}

ZddHandle& ZddHandle::operator=(ZddHandle&& other) noexcept {
  if (this != &other) {
    release();
    mgr_ = std::exchange(other.mgr_, nullptr);
    node_ = std::exchange(other.node_, 0);
  }
  return *this;
}

ZddHandle::~ZddHandle() { release(); }

void ZddHandle::release() noexcept {
  if (mgr_) {
    --mgr_->refs_[node_];
    --mgr_->handles_;
    mgr_ = nullptr;
  }
}

std::size_t ZddManager::KeyHash::operator()(const NodeData& n) const noexcept {
  std::uint64_t h = n.var;
  h = h * 0x9e3779b97f4a7c15ull + n.lo;
  h = h * 0x9e3779b97f4a7c15ull + n.hi;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

ZddManager::ZddManager(std::uint32_t num_vars) : num_vars_(num_vars) {
  nodes_.push_back({num_vars_, kEmpty, kEmpty});
  nodes_.push_back({num_vars_, kBase, kBase});
  refs_.assign(2, 0);
}

ZddManager::~ZddManager() { assert(handles_ == 0 && "ZddHandle outlived its manager"); }

void ZddManager::check(const ZddHandle& f) const {
  if (!f.valid()) throw Error("null ZDD handle");
  if (f.manager() != this) throw Error("ZDD handles belong to different managers");
}

std::uint32_t ZddManager::make(std::uint32_t var, std::uint32_t lo, std::uint32_t hi) {
  if (hi == kEmpty) return lo;
  NodeData data{var, lo, hi};
  if (auto it = unique_.find(data); it != unique_.end()) return it->second;
  std::uint32_t idx;
  if (!free_.empty()) {
    idx = free_.back();
    free_.pop_back();
    nodes_[idx] = data;
  } else {
    idx = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(data);
    refs_.push_back(0);
  }
  unique_.emplace(data, idx);
  peak_ = std::max(peak_, ++live_);
  return idx;
}

ZddHandle ZddManager::empty() { return wrap(kEmpty); }
ZddHandle ZddManager::base() { return wrap(kBase); }

ZddHandle ZddManager::singleton_family(BlockId b) { return from_set(BlockSet{b}); }

ZddHandle ZddManager::from_set(const BlockSet& s) {
  std::uint32_t n = kBase;
  auto v = s.view();
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (index_of(*it) >= num_vars_)
      throw Error("unknown block " + std::to_string(index_of(*it)) + " for a ZDD over " +
                  std::to_string(num_vars_) + " blocks");
    n = make(index_of(*it), kEmpty, n);
  }
  return wrap(n);
}

ZddHandle ZddManager::from_sets(const std::vector<BlockSet>& sets) {
  ZddHandle acc = empty();
  for (const auto& s : sets) acc = set_union(acc, from_set(s));
  return acc;
}

ZddHandle ZddManager::from_family(const Family& family) {
  return from_sets(std::vector<BlockSet>(family.begin(), family.end()));
}

bool ZddManager::is_empty(const ZddHandle& f) const {
  check(f);
  return f.node() == kEmpty;
}

bool ZddManager::is_base(const ZddHandle& f) const {
  check(f);
  return f.node() == kBase;
}

std::uint32_t ZddManager::union_rec(std::uint32_t f, std::uint32_t g) {
  if (f == kEmpty || f == g) return g;
  if (g == kEmpty) return f;
  auto k = sym_key(f, g);
  if (auto it = union_cache_.find(k); it != union_cache_.end()) return it->second;
  const std::uint32_t vf = var_of(f), vg = var_of(g);
  std::uint32_t r;
  if (vf < vg) {
    const auto [var, lo, hi] = nodes_[f];
    r = make(var, union_rec(lo, g), hi);
  } else if (vg < vf) {
    const auto [var, lo, hi] = nodes_[g];
    r = make(var, union_rec(f, lo), hi);
  } else {
    const auto [var, flo, fhi] = nodes_[f];
    const auto [var2, glo, ghi] = nodes_[g];
    const std::uint32_t lo = union_rec(flo, glo);
    r = make(var, lo, union_rec(fhi, ghi));
  }
  union_cache_.emplace(k, r);
  return r;
}

std::uint32_t ZddManager::nonsub_rec(std::uint32_t f, std::uint32_t g) {
  if (f == kEmpty || f == g) return kEmpty;
  if (g == kEmpty) return f;
  if (f == kBase) return kEmpty;  // ∅ lies below every member of a non-empty g
  auto k = key(f, g);
  if (auto it = nonsub_cache_.find(k); it != nonsub_cache_.end()) return it->second;
  const std::uint32_t v = std::min(var_of(f), var_of(g));
  const std::uint32_t f0 = var_of(f) == v ? nodes_[f].lo : f;
  const std::uint32_t f1 = var_of(f) == v ? nodes_[f].hi : kEmpty;
  const std::uint32_t g0 = var_of(g) == v ? nodes_[g].lo : g;
  const std::uint32_t g1 = var_of(g) == v ? nodes_[g].hi : kEmpty;
  const std::uint32_t hi = nonsub_rec(f1, g1);
  const std::uint32_t lo = nonsub_rec(nonsub_rec(f0, g0), g1);
  const std::uint32_t r = make(v, lo, hi);
  nonsub_cache_.emplace(k, r);
  return r;
}

std::uint32_t ZddManager::maxset_rec(std::uint32_t f) {
  if (f == kEmpty || f == kBase) return f;
  if (auto it = maxset_cache_.find(f); it != maxset_cache_.end()) return it->second;
  const auto [var, flo, fhi] = nodes_[f];
  const std::uint32_t hi = maxset_rec(fhi);
  const std::uint32_t lo = nonsub_rec(maxset_rec(flo), hi);
  const std::uint32_t r = make(var, lo, hi);
  maxset_cache_.emplace(f, r);
  return r;
}

std::uint32_t ZddManager::maxunion_rec(std::uint32_t f, std::uint32_t g) {
  if (f == kEmpty || f == g) return maxset_rec(g);
  if (g == kEmpty) return maxset_rec(f);
  if (f == kBase) return maxset_rec(g);  // g is non-empty and not {∅}, so ∅ is subsumed
  if (g == kBase) return maxset_rec(f);
  auto k = sym_key(f, g);
  if (auto it = maxunion_cache_.find(k); it != maxunion_cache_.end()) return it->second;
  const std::uint32_t v = std::min(var_of(f), var_of(g));
  const std::uint32_t f0 = var_of(f) == v ? nodes_[f].lo : f;
  const std::uint32_t f1 = var_of(f) == v ? nodes_[f].hi : kEmpty;
  const std::uint32_t g0 = var_of(g) == v ? nodes_[g].lo : g;
  const std::uint32_t g1 = var_of(g) == v ? nodes_[g].hi : kEmpty;
  const std::uint32_t hi = maxunion_rec(f1, g1);
  const std::uint32_t lo = nonsub_rec(maxunion_rec(f0, g0), hi);
  const std::uint32_t r = make(v, lo, hi);
  maxunion_cache_.emplace(k, r);
  return r;
}

std::uint32_t ZddManager::mdp_rec(std::uint32_t f, std::uint32_t g) {
  if (f == kEmpty || g == kEmpty) return kEmpty;
  if (f == kBase) return maxset_rec(g);
  if (g == kBase) return maxset_rec(f);
  auto k = sym_key(f, g);
  if (auto it = mdp_cache_.find(k); it != mdp_cache_.end()) return it->second;
  const std::uint32_t v = std::min(var_of(f), var_of(g));
  const std::uint32_t f0 = var_of(f) == v ? nodes_[f].lo : f;
  const std::uint32_t f1 = var_of(f) == v ? nodes_[f].hi : kEmpty;
  const std::uint32_t g0 = var_of(g) == v ? nodes_[g].lo : g;
  const std::uint32_t g1 = var_of(g) == v ? nodes_[g].hi : kEmpty;
  const std::uint32_t a = mdp_rec(f1, g0);
  const std::uint32_t b = mdp_rec(f0, g1);
  const std::uint32_t c = mdp_rec(f1, g1);
  const std::uint32_t hi = maxunion_rec(maxunion_rec(a, b), c);
  const std::uint32_t lo = nonsub_rec(mdp_rec(f0, g0), hi);
  const std::uint32_t r = make(v, lo, hi);
  mdp_cache_.emplace(k, r);
  return r;
}

std::uint32_t ZddManager::maxcard_rec(std::uint32_t f) {
  if (f == kEmpty || f == kBase) return 0;
  if (auto it = maxcard_cache_.find(f); it != maxcard_cache_.end()) return it->second;
  const auto [var, lo, hi] = nodes_[f];
  const std::uint32_t r = std::max(maxcard_rec(lo), 1 + maxcard_rec(hi));
  maxcard_cache_.emplace(f, r);
  return r;
}

namespace {

// Keeps the operation caches bounded on long runs.
void trim(std::unordered_map<std::uint64_t, std::uint32_t>& cache) {
  if (cache.size() > kCacheLimit) cache.clear();
}

}  // namespace

ZddHandle ZddManager::set_union(const ZddHandle& f, const ZddHandle& g) {
  check(f);
  check(g);
  trim(union_cache_);
  return wrap(union_rec(f.node(), g.node()));
}

ZddHandle ZddManager::remove_subsumed(const ZddHandle& f, const ZddHandle& g) {
  check(f);
  check(g);
  trim(nonsub_cache_);
  return wrap(nonsub_rec(f.node(), g.node()));
}

ZddHandle ZddManager::max_set(const ZddHandle& f) {
  check(f);
  trim(maxset_cache_);
  trim(nonsub_cache_);
  return wrap(maxset_rec(f.node()));
}

ZddHandle ZddManager::max_union(const ZddHandle& f, const ZddHandle& g) {
  check(f);
  check(g);
  trim(maxunion_cache_);
  trim(maxset_cache_);
  trim(nonsub_cache_);
  return wrap(maxunion_rec(f.node(), g.node()));
}

ZddHandle ZddManager::max_dot_product(const ZddHandle& f, const ZddHandle& g) {
  check(f);
  check(g);
  trim(mdp_cache_);
  trim(maxunion_cache_);
  trim(maxset_cache_);
  trim(nonsub_cache_);
  return wrap(mdp_rec(f.node(), g.node()));
}

std::uint32_t ZddManager::max_cardinality(const ZddHandle& f) {
  check(f);
  trim(maxcard_cache_);
  return maxcard_rec(f.node());
}

std::uint64_t ZddManager::count_sets(const ZddHandle& f) {
  check(f);
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  auto rec = [&](auto&& self, std::uint32_t n) -> std::uint64_t {
    if (n == kEmpty) return 0;
    if (n == kBase) return 1;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const auto [var, lo, hi] = nodes_[n];
    const std::uint64_t r = self(self, lo) + self(self, hi);
    memo.emplace(n, r);
    return r;
  };
  return rec(rec, f.node());
}

std::size_t ZddManager::node_count(const ZddHandle& f) const {
  check(f);
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::uint32_t> work{f.node()};
  std::size_t count = 0;
  while (!work.empty()) {
    std::uint32_t n = work.back();
    work.pop_back();
    if (n <= kBase || seen[n]) continue;
    seen[n] = true;
    ++count;
    work.push_back(nodes_[n].lo);
    work.push_back(nodes_[n].hi);
  }
  return count;
}

void ZddManager::enumerate_rec(std::uint32_t f, std::vector<BlockId>& prefix, std::vector<BlockSet>& out) const {
  if (f == kEmpty) return;
  if (f == kBase) {
    out.emplace_back(prefix);
    return;
  }
  const auto [var, lo, hi] = nodes_[f];
  enumerate_rec(lo, prefix, out);
  prefix.push_back(BlockId{var});
  enumerate_rec(hi, prefix, out);
  prefix.pop_back();
}

std::vector<BlockSet> ZddManager::enumerate(const ZddHandle& f, std::uint64_t cap) {
  const std::uint64_t n = count_sets(f);
  if (n > cap)
    throw Error("refusing to enumerate " + std::to_string(n) + " sets (cap " + std::to_string(cap) + ")");
  std::vector<BlockSet> out;
  out.reserve(n);
  std::vector<BlockId> prefix;
  enumerate_rec(f.node(), prefix, out);
  std::sort(out.begin(), out.end());
  return out;
}

Family ZddManager::to_family(const ZddHandle& f, std::uint64_t cap) {
  auto sets = enumerate(f, cap);
  return Family(sets.begin(), sets.end());
}

std::string ZddManager::to_dot(const ZddHandle& f, const std::function<std::string(BlockId)>& name,
                               const std::string& graph_name) const {
  check(f);
  std::ostringstream os;
  os << "digraph \"" << graph_name << "\" {\n  t0 [shape=box,label=\"0\"];\n  t1 [shape=box,label=\"1\"];\n";
  auto id = [](std::uint32_t n) { return n <= kBase ? "t" + std::to_string(n) : "n" + std::to_string(n); };
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::uint32_t> work{f.node()};
  std::vector<std::uint32_t> order;
  while (!work.empty()) {
    std::uint32_t n = work.back();
    work.pop_back();
    if (n <= kBase || seen[n]) continue;
    seen[n] = true;
    order.push_back(n);
    work.push_back(nodes_[n].hi);
    work.push_back(nodes_[n].lo);
  }
  for (std::uint32_t n : order) {
    const auto& d = nodes_[n];
    os << "  " << id(n) << " [label=\"" << name(BlockId{d.var}) << "\"];\n";
    os << "  " << id(n) << " -> " << id(d.lo) << " [style=dashed];\n";
    os << "  " << id(n) << " -> " << id(d.hi) << ";\n";
  }
  os << "  root -> " << id(f.node()) << ";\n  root [shape=plaintext,label=\"\"];\n}\n";
  return os.str();
}

void ZddManager::clear_caches() {
  union_cache_.clear();
  nonsub_cache_.clear();
  maxset_cache_.clear();
  maxunion_cache_.clear();
  mdp_cache_.clear();
  maxcard_cache_.clear();
}

std::size_t ZddManager::collect_garbage() {
  clear_caches();
  std::vector<bool> marked(nodes_.size(), false);
  std::vector<std::uint32_t> work;
  for (std::uint32_t n = 2; n < nodes_.size(); ++n)
    if (refs_[n] > 0 && nodes_[n].var != kFreeVar) work.push_back(n);
  while (!work.empty()) {
    std::uint32_t n = work.back();
    work.pop_back();
    if (n <= kBase || marked[n]) continue;
    marked[n] = true;
    work.push_back(nodes_[n].lo);
    work.push_back(nodes_[n].hi);
  }
  std::size_t freed = 0;
  for (std::uint32_t n = 2; n < nodes_.size(); ++n) {
    if (marked[n] || nodes_[n].var == kFreeVar) continue;
    unique_.erase(nodes_[n]);
    nodes_[n].var = kFreeVar;
    free_.push_back(n);
    ++freed;
  }
  live_ -= freed;
  return freed;
}

}  // namespace persist
