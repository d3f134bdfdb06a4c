#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persist/cfg.hpp"
#include "persist/domain.hpp"
#include "persist/solver.hpp"

namespace persist {

enum class DomainKind : std::uint8_t {
  Must,
  CMust,
  BlockCs,
  GlobalCs,
  Product,
  Exact,
  ExplicitRaw,
  ExplicitMaximal,
  ExplicitBounded,
};

/// Registered names, in the order above.
const std::vector<std::string_view>& domain_names();
std::string_view domain_name(DomainKind d);
std::optional<DomainKind> parse_domain_name(std::string_view name);
/// Comma-separated names. Throws ValidationError on unknown names or an empty list.
std::vector<DomainKind> parse_domain_list(std::string_view csv);

enum class ScopeMode : std::uint8_t {
  Explicit,  // scopes declared in the input
  Auto,      // declared scopes, else detected loops; plus the whole program
  Whole,     // the whole program only
};

struct AnalysisOptions {
  CacheConfig cache;
  std::vector<DomainKind> domains;
  ScopeMode scopes = ScopeMode::Auto;
  SolverOptions solver;
  /// Largest candidate set joined per block in the exact analysis; 0 means k.
  std::uint32_t many_threshold = 0;
  bool cooperative_product = true;
  /// Off-by-n weakening of C-Must classification, for harness self-tests.
  std::uint32_t cmust_slack = 0;
  /// Largest block count accepted by the unpruned explicit tier.
  std::size_t raw_tier_block_limit = 12;
};

/// The scopes analyzed under `mode`. The whole-program scope is named
/// "program", headed by the entry and containing every node.
std::vector<Scope> select_scopes(const ControlFlowGraph& cfg, ScopeMode mode);

/// The graph a scope is analyzed on: its members entered at the header.
ControlFlowGraph scope_graph(const ControlFlowGraph& cfg, const Scope& scope);

struct DomainRun {
  std::vector<bool> persistent;  // per block of the graph's table
  std::size_t iterations = 0;
  std::size_t peak_zdd_nodes = 0;
};

/// Runs one domain to its fixpoint on `graph` and classifies every block.
DomainRun run_domain(const ControlFlowGraph& graph, DomainKind domain, const DomainParams& params,
                     const AnalysisOptions& options);

/// Per-block persistence of `scope` in a cache with a single set.
std::vector<bool> analyze_scope(const ControlFlowGraph& cfg, const Scope& scope, DomainKind domain,
                                const AnalysisOptions& options);

struct BlockVerdict {
  std::string block;
  bool accessed = false;         // accessed inside the scope
  std::vector<bool> persistent;  // parallel to AnalysisReport::domains
};

struct ScopeReport {
  std::string name;
  std::string header;
  std::vector<BlockVerdict> blocks;
};

struct SetReport {
  std::uint32_t set = 0;
  std::vector<ScopeReport> scopes;
};

struct RunStats {
  std::uint32_t set = 0;
  std::string scope;
  DomainKind domain{};
  std::size_t iterations = 0;
  std::size_t peak_zdd_nodes = 0;
};

struct AnalysisReport {
  CacheConfig cache;
  std::vector<DomainKind> domains;
  std::vector<SetReport> sets;  // only sets holding at least one block
  std::vector<RunStats> stats;

  /// Verdict lookup; nullopt when the set, scope, block or domain is absent.
  std::optional<bool> persistent(std::uint32_t set, std::string_view scope, std::string_view block,
                                 DomainKind domain) const;
};

/// Every selected domain on every cache set and scope.
AnalysisReport analyze_program(const ControlFlowGraph& cfg, const AnalysisOptions& options);

std::string format_report_text(const AnalysisReport& report);
/// Tree-structured JSON with "format_version": 1.
std::string format_report_json(const AnalysisReport& report);

/// One line `m_<block>_<scope> <= entries_<scope>;` per accessed block that
/// `domain` classifies persistent. Empty when there is none.
std::string emit_persistence_constraints(const AnalysisReport& report, DomainKind domain);

struct Discrepancy {
  std::uint32_t set = 0;
  std::string scope;
  std::string block;
  std::string location;  // node or edge where it first showed up
};

struct DifferentialReport {
  DomainKind subject{};
  std::vector<Discrepancy> gaps;        // exact persistent, subject not
  std::vector<Discrepancy> violations;  // subject persistent, exact not

  bool sound() const noexcept { return violations.empty(); }
};

/// Runs the exact analysis and `subject` in lockstep and compares their
/// classifications after every update and join.
DifferentialReport differential_check(const ControlFlowGraph& cfg, const AnalysisOptions& options,
                                      DomainKind subject);

/// DOT graphs of the exact analysis' conflict families at every scope header,
/// one digraph per non-empty (set, scope, block, slot).
std::string dump_exact_zdds(const ControlFlowGraph& cfg, const AnalysisOptions& options);

std::string format_differential_text(const DifferentialReport& report);

}  // namespace persist
