#include "persist/analysis.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <utility>

#include "persist/baseline.hpp"
#include "persist/exact_explicit.hpp"
#include "persist/exact_zdd.hpp"

namespace persist {

namespace {

constexpr std::array<DomainKind, 9> kAllDomains = {
    DomainKind::Must,    DomainKind::CMust, DomainKind::BlockCs,     DomainKind::GlobalCs,        DomainKind::Product,
    DomainKind::Exact,   DomainKind::ExplicitRaw, DomainKind::ExplicitMaximal, DomainKind::ExplicitBounded,
};

bool is_explicit(DomainKind d) {
  return d == DomainKind::ExplicitRaw || d == DomainKind::ExplicitMaximal || d == DomainKind::ExplicitBounded;
}

// Calls `f` with a freshly constructed domain of kind `kind`.
template <typename F>
auto visit_domain(DomainKind kind, const DomainParams& p, const AnalysisOptions& o, ZddManager& mgr, F&& f) {
  switch (kind) {
    case DomainKind::Must: return f(MustDomain(p));
    case DomainKind::CMust: return f(CMustDomain(p, o.cmust_slack));
    case DomainKind::BlockCs: return f(BlockCsDomain(p));
    case DomainKind::GlobalCs: return f(GlobalCsDomain(p));
    case DomainKind::Product: return f(ProductDomain(p, o.cooperative_product));
    case DomainKind::Exact: return f(ZddExactDomain(mgr, p, o.many_threshold ? o.many_threshold : p.k));
    case DomainKind::ExplicitRaw: return f(ExplicitExactDomain(ExactTier::Raw, p.k));
    case DomainKind::ExplicitMaximal: return f(ExplicitExactDomain(ExactTier::Maximal, p.k));
    case DomainKind::ExplicitBounded: return f(ExplicitExactDomain(ExactTier::Bounded, p.k));
  }
  throw std::logic_error("unhandled domain kind");
}

// The explicit tiers see Many edges as parallel single accesses.
ControlFlowGraph prepare_for(const ControlFlowGraph& graph, DomainKind kind, const DomainParams& params,
                             const AnalysisOptions& options) {
  if (!is_explicit(kind)) return graph;
  if (graph.has_label(AccessLabel::Kind::Unknown))
    throw AnalysisError(std::string(domain_name(kind)) + " does not support unknown accesses");
  if (kind == DomainKind::ExplicitRaw && params.universe.size() > options.raw_tier_block_limit)
    throw AnalysisError(std::string(domain_name(kind)) + " is limited to " +
                        std::to_string(options.raw_tier_block_limit) + " blocks per cache set");
  return expand_many_edges(graph);
}

BlockSet all_blocks(const ControlFlowGraph& cfg) {
  BlockSet out;
  for (std::uint32_t i = 0; i < cfg.num_blocks(); ++i) out.insert(BlockId{i});
  return out;
}

Scope program_scope(const ControlFlowGraph& cfg) {
  Scope s;
  s.name = std::string(kProgramScope);
  s.header = cfg.entry();
  for (std::uint32_t i = 0; i < cfg.num_nodes(); ++i) s.members.push_back(NodeId{i});
  return s;
}

}  // namespace

const std::vector<std::string_view>& domain_names() {
  static const std::vector<std::string_view> names = {
      "must",  "cmust", "blockcs", "globalcs", "product", "exact", "exact-explicit-0", "exact-explicit-up",
      "exact-explicit-k",
  };
  return names;
}

std::string_view domain_name(DomainKind d) { return domain_names().at(static_cast<std::size_t>(d)); }

std::optional<DomainKind> parse_domain_name(std::string_view name) {
  for (DomainKind d : kAllDomains)
    if (domain_name(d) == name) return d;
  return std::nullopt;
}

std::vector<DomainKind> parse_domain_list(std::string_view csv) {
  std::vector<DomainKind> out;
  while (!csv.empty()) {
    auto comma = csv.find(',');
    std::string_view item = csv.substr(0, comma);
    csv = comma == std::string_view::npos ? std::string_view{} : csv.substr(comma + 1);
    if (item.empty()) continue;
    auto d = parse_domain_name(item);
    if (!d) throw ValidationError("unknown domain '" + std::string(item) + "'");
    if (std::find(out.begin(), out.end(), *d) == out.end()) out.push_back(*d);
  }
  if (out.empty()) throw ValidationError("no domain selected");
  return out;
}

std::vector<Scope> select_scopes(const ControlFlowGraph& cfg, ScopeMode mode) {
  switch (mode) {
    case ScopeMode::Explicit: return cfg.scopes();
    case ScopeMode::Whole: return {program_scope(cfg)};
    case ScopeMode::Auto: {
      auto scopes = cfg.scopes().empty() ? detect_natural_loops(cfg) : cfg.scopes();
      scopes.push_back(program_scope(cfg));
      return scopes;
    }
  }
  return {};
}

ControlFlowGraph scope_graph(const ControlFlowGraph& cfg, const Scope& scope) {
  return restrict_to_scope(cfg, scope);
}

DomainRun run_domain(const ControlFlowGraph& graph, DomainKind kind, const DomainParams& params,
                     const AnalysisOptions& options) {
  const ControlFlowGraph g = prepare_for(graph, kind, params, options);
  ZddManager mgr(static_cast<std::uint32_t>(g.num_blocks()));
  DomainRun run = visit_domain(kind, params, options, mgr, [&](const auto& domain) {
    auto result = solve_fixpoint(g, domain, options.solver);
    return DomainRun{persistent_blocks(g, domain, result), result.iterations, 0};
  });
  run.peak_zdd_nodes = mgr.peak_nodes();
  return run;
}

std::vector<bool> analyze_scope(const ControlFlowGraph& cfg, const Scope& scope, DomainKind domain,
                                const AnalysisOptions& options) {
  DomainParams params{options.cache.associativity, all_blocks(cfg)};
  return run_domain(scope_graph(cfg, scope), domain, params, options).persistent;
}

std::optional<bool> AnalysisReport::persistent(std::uint32_t set, std::string_view scope, std::string_view block,
                                               DomainKind domain) const {
  auto d = std::find(domains.begin(), domains.end(), domain);
  if (d == domains.end()) return std::nullopt;
  const auto col = static_cast<std::size_t>(d - domains.begin());
  for (const auto& sr : sets) {
    if (sr.set != set) continue;
    for (const auto& sc : sr.scopes) {
      if (sc.name != scope) continue;
      for (const auto& bv : sc.blocks)
        if (bv.block == block) return bv.persistent[col];
    }
  }
  return std::nullopt;
}

namespace {

// Per cache set: the projected graph and the blocks it holds.
struct SetView {
  std::uint32_t set;
  ControlFlowGraph graph;
  BlockSet blocks;
};

std::vector<SetView> cache_sets(const ControlFlowGraph& cfg, const CacheConfig& cache) {
  cache.validate();
  std::map<std::uint32_t, BlockSet> by_set;
  for (std::uint32_t b = 0; b < cfg.num_blocks(); ++b) by_set[cache_set_of(cfg, cache, BlockId{b})].insert(BlockId{b});
  std::vector<SetView> out;
  for (auto& [set, blocks] : by_set) {
    auto graph = cache.num_sets == 1 ? cfg : project_to_cache_set(cfg, cache, set);
    out.push_back(SetView{set, std::move(graph), std::move(blocks)});
  }
  return out;
}

}  // namespace

AnalysisReport analyze_program(const ControlFlowGraph& cfg, const AnalysisOptions& options) {
  if (options.domains.empty()) throw ValidationError("no domain selected");
  AnalysisReport report;
  report.cache = options.cache;
  report.domains = options.domains;
  const auto scopes = select_scopes(cfg, options.scopes);

  for (const auto& view : cache_sets(cfg, options.cache)) {
    SetReport sr;
    sr.set = view.set;
    const DomainParams params{options.cache.associativity, view.blocks};
    for (const auto& scope : scopes) {
      const ControlFlowGraph g = scope_graph(view.graph, scope);
      ScopeReport sc;
      sc.name = scope.name;
      sc.header = cfg.node(scope.header).name;
      for (BlockId b : view.blocks)
        sc.blocks.push_back(BlockVerdict{cfg.block(b).name, !g.accessing_nodes(b).empty(), {}});
      for (DomainKind kind : options.domains) {
        DomainRun run = run_domain(g, kind, params, options);
        std::size_t i = 0;
        for (BlockId b : view.blocks) sc.blocks[i++].persistent.push_back(run.persistent[index_of(b)]);
        report.stats.push_back(RunStats{view.set, scope.name, kind, run.iterations, run.peak_zdd_nodes});
      }
      sr.scopes.push_back(std::move(sc));
    }
    report.sets.push_back(std::move(sr));
  }
  return report;
}

namespace {

template <typename Ref, typename Sub>
struct Lockstep {
  using State = std::pair<typename Ref::State, typename Sub::State>;

  const Ref& ref;
  const Sub& sub;

  State bottom() const { return {ref.bottom(), sub.bottom()}; }
  State init_entry() const { return {ref.init_entry(), sub.init_entry()}; }
  State update(const State& s, const AccessLabel& l) const { return {ref.update(s.first, l), sub.update(s.second, l)}; }
  State join(const State& a, const State& b) const {
    return {ref.join(a.first, b.first), sub.join(a.second, b.second)};
  }
  bool leq(const State& a, const State& b) const { return ref.leq(a.first, b.first) && sub.leq(a.second, b.second); }
  bool classify(const State& s, BlockId b) const { return ref.classify(s.first, b); }
};

template <typename Ref, typename Sub>
struct Comparer {
  const Ref& ref;
  const Sub& sub;
  const ControlFlowGraph& graph;
  const BlockSet& blocks;
  std::uint32_t set;
  const std::string& scope;
  DifferentialReport& out;
  std::set<std::uint32_t> seen_gap;
  std::set<std::uint32_t> seen_violation;

  void compare(const typename Lockstep<Ref, Sub>::State& s, const std::string& where) {
    for (BlockId b : blocks) {
      const bool r = ref.classify(s.first, b);
      const bool q = sub.classify(s.second, b);
      if (r == q) continue;
      auto& seen = q ? seen_violation : seen_gap;
      if (!seen.insert(index_of(b)).second) continue;
      (q ? out.violations : out.gaps).push_back(Discrepancy{set, scope, graph.block(b).name, where});
    }
  }
  template <typename State>
  void after_update(const Edge& e, const State& s) {
    compare(s, "edge " + graph.node(e.source).name + " -> " + graph.node(e.target).name);
  }
  template <typename State>
  void after_join(NodeId n, const State& s) {
    compare(s, "node " + graph.node(n).name);
  }
};

}  // namespace

DifferentialReport differential_check(const ControlFlowGraph& cfg, const AnalysisOptions& options,
                                      DomainKind subject) {
  DifferentialReport report;
  report.subject = subject;
  const auto scopes = select_scopes(cfg, options.scopes);
  for (const auto& view : cache_sets(cfg, options.cache)) {
    const DomainParams params{options.cache.associativity, view.blocks};
    for (const auto& scope : scopes) {
      const ControlFlowGraph g = prepare_for(scope_graph(view.graph, scope), subject, params, options);
      ZddManager mgr(static_cast<std::uint32_t>(g.num_blocks()));
      const ZddExactDomain reference(mgr, params, options.many_threshold ? options.many_threshold : params.k);
      visit_domain(subject, params, options, mgr, [&](const auto& sub) {
        using Sub = std::decay_t<decltype(sub)>;
        Lockstep<ZddExactDomain, Sub> pair{reference, sub};
        Comparer<ZddExactDomain, Sub> cmp{reference, sub, g, view.blocks, view.set, scope.name, report, {}, {}};
        solve_fixpoint(g, pair, options.solver, cmp);
        return 0;
      });
    }
  }
  return report;
}

std::string dump_exact_zdds(const ControlFlowGraph& cfg, const AnalysisOptions& options) {
  std::string out;
  for (const auto& view : cache_sets(cfg, options.cache)) {
    const DomainParams params{options.cache.associativity, view.blocks};
    for (const auto& scope : select_scopes(cfg, options.scopes)) {
      const ControlFlowGraph g = scope_graph(view.graph, scope);
      ZddManager mgr(static_cast<std::uint32_t>(g.num_blocks()));
      const ZddExactDomain domain(mgr, params, options.many_threshold ? options.many_threshold : params.k);
      auto result = solve_fixpoint(g, domain, options.solver);
      const auto& header = result.states[index_of(g.entry())];
      for (const auto& [b, layers] : header.blocks) {
        for (std::size_t i = 0; i < layers.slots.size(); ++i) {
          if (mgr.is_empty(layers.slots[i])) continue;
          const std::string name = "set" + std::to_string(view.set) + "_" + scope.name + "_" + g.block(b).name +
                                   "_slot" + std::to_string(i);
          out += mgr.to_dot(layers.slots[i], [&](BlockId x) { return g.block(x).name; }, name);
        }
      }
    }
  }
  return out;
}

}  // namespace persist
