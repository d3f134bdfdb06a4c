// persist: command-line front end for the persistence analyses.
//
// Exit codes: 0 ok, 1 usage error, 2 input error, 3 soundness violation.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "persist/analysis.hpp"
#include "persist/cfg.hpp"
#include "persist/error.hpp"
#include "persist/generators.hpp"
#include "persist/oracle.hpp"

namespace {

using namespace persist;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitViolation = 3;

struct CacheFlags {
  std::uint32_t assoc = 8;
  std::uint32_t sets = 32;
  std::uint32_t line_size = 16;

  CacheConfig config() const { return CacheConfig{assoc, sets, line_size}; }
};

struct AnalysisFlags {
  std::string input;
  CacheFlags cache;
  std::string domains;
  std::string scopes = "auto";
  std::string format = "text";
  std::uint32_t many_threshold = 0;
  bool independent_product = false;
  std::string dot_path;
};

CLI::Validator domain_list_validator() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        try {
          parse_domain_list(value);
        } catch (const Error& e) {
          return e.what();
        }
        return {};
      },
      "DOMAINS");
}

void add_cache_flags(CLI::App* cmd, CacheFlags& c) {
  cmd->add_option("-k,--assoc", c.assoc, "Associativity, blocks per cache set")
      ->check(CLI::Range(1u, 1u << 16))
      ->capture_default_str();
  cmd->add_option("--sets", c.sets, "Number of cache sets")->check(CLI::Range(1u, 1u << 20))->capture_default_str();
  cmd->add_option("--line-size", c.line_size, "Cache line size in bytes")
      ->check(CLI::Range(1u, 1u << 20))
      ->capture_default_str();
}

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& f, const std::string& default_domains) {
  cmd->add_option("input", f.input, "CFG document")->required();
  add_cache_flags(cmd, f.cache);
  f.domains = default_domains;
  std::string names;
  for (auto n : domain_names()) names += (names.empty() ? "" : ", ") + std::string(n);
  cmd->add_option("-d,--domains", f.domains, "Comma-separated domains: " + names)
      ->check(domain_list_validator())
      ->capture_default_str();
  cmd->add_option("--scopes", f.scopes, "Scopes to analyze")
      ->check(CLI::IsMember({"explicit", "auto", "whole"}))
      ->capture_default_str();
  cmd->add_option("--many-threshold", f.many_threshold,
                  "Largest candidate set the exact analysis joins per block (0: k)")
      ->capture_default_str();
  cmd->add_flag("--independent-product", f.independent_product,
                "Run the product's components without exchanging information");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ScopeMode scope_mode(const std::string& s) {
  if (s == "explicit") return ScopeMode::Explicit;
  if (s == "whole") return ScopeMode::Whole;
  return ScopeMode::Auto;
}

AnalysisOptions analysis_options(const AnalysisFlags& f) {
  AnalysisOptions o;
  o.cache = f.cache.config();
  o.domains = parse_domain_list(f.domains);
  o.scopes = scope_mode(f.scopes);
  o.many_threshold = f.many_threshold;
  o.cooperative_product = !f.independent_product;
  return o;
}

int cmd_analyze(const AnalysisFlags& f) {
  const ControlFlowGraph cfg = parse_cfg(read_file(f.input));
  const AnalysisOptions options = analysis_options(f);
  const AnalysisReport report = analyze_program(cfg, options);
  std::cout << (f.format == "text" ? format_report_text(report) : format_report_json(report));
  if (!f.dot_path.empty()) {
    std::ofstream out(f.dot_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + f.dot_path + "'");
    out << dump_exact_zdds(cfg, options);
  }
  return kExitOk;
}

int cmd_constraints(const AnalysisFlags& f) {
  const ControlFlowGraph cfg = parse_cfg(read_file(f.input));
  const AnalysisOptions options = analysis_options(f);
  if (options.domains.size() != 1) throw ValidationError("constraints take exactly one domain");
  std::cout << emit_persistence_constraints(analyze_program(cfg, options), options.domains.front());
  return kExitOk;
}

int cmd_compare(const AnalysisFlags& f, const std::string& subject, bool mutate_cmust) {
  const ControlFlowGraph cfg = parse_cfg(read_file(f.input));
  AnalysisOptions options = analysis_options(f);
  if (mutate_cmust) options.cmust_slack = 1;
  const DifferentialReport report = differential_check(cfg, options, *parse_domain_name(subject));
  std::cout << format_differential_text(report);
  return report.sound() ? kExitOk : kExitViolation;
}

std::string render_path(const ControlFlowGraph& cfg, const std::vector<std::uint32_t>& path) {
  std::string out = cfg.node(cfg.entry()).name;
  for (std::uint32_t e : path) {
    const Edge& edge = cfg.edge(e);
    out += edge.label.kind() == AccessLabel::Kind::Single ? " -" + cfg.block(edge.label.block()).name + "-> " : " -> ";
    out += cfg.node(edge.target).name;
  }
  return out;
}

int cmd_oracle_check(const std::string& input, const CacheFlags& cache, const std::string& block_name,
                     std::size_t budget) {
  const ControlFlowGraph full = parse_cfg(read_file(input));
  const auto block = full.find_block(block_name);
  if (!block) throw ValidationError("unknown block '" + block_name + "'");
  const CacheConfig config = cache.config();
  config.validate();
  const ControlFlowGraph cfg =
      config.num_sets == 1 ? full : project_to_cache_set(full, config, cache_set_of(full, config, *block));

  OracleOptions options;
  options.budget = budget;
  std::optional<Witness> witness;
  try {
    witness = find_witness(cfg, *block, config.associativity, options);
  } catch (const BudgetExceeded& e) {
    // Beyond the search budget the unpruned explicit analysis decides instead.
    AnalysisOptions fallback;
    fallback.cache = config;
    const DomainParams params{config.associativity, [&] {
                                BlockSet all;
                                for (std::uint32_t b = 0; b < cfg.num_blocks(); ++b) all.insert(BlockId{b});
                                return all;
                              }()};
    const bool persistent = run_domain(cfg, DomainKind::ExplicitRaw, params, fallback).persistent[index_of(*block)];
    std::cout << (persistent ? "PERSISTENT" : "NOT-PERSISTENT") << '\n'
              << "note: " << e.what() << "; decided by " << domain_name(DomainKind::ExplicitRaw) << ", no witness\n";
    return kExitOk;
  }
  if (!witness) {
    std::cout << "PERSISTENT\n";
    return kExitOk;
  }
  std::cout << "NOT-PERSISTENT\n"
            << "witness: " << render_path(cfg, witness->path) << '\n'
            << "misses: accesses " << witness->first_miss + 1 << " and " << witness->second_miss + 1
            << " of the trace\n";
  return kExitOk;
}

int cmd_gen_hamiltonian(const std::string& graph_path, std::uint64_t stride) {
  const auto g = UndirectedGraph::parse_edge_list(read_file(graph_path));
  const HamiltonianInstance inst = gen_hamiltonian_cfg(g, stride);
  std::cout << "# target block " << inst.cfg.block(inst.target).name << ", associativity " << inst.k << '\n'
            << print_cfg(inst.cfg);
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Cache persistence analysis for control-flow graphs", "persist"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "persist 1.0");

  AnalysisFlags analyze_flags;
  auto* analyze = app.add_subcommand("analyze", "Classify every block of every scope under the selected domains");
  add_analysis_flags(analyze, analyze_flags, "exact");
  analyze->add_option("--format", analyze_flags.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "json-like"}))
      ->capture_default_str();
  analyze->add_option("--dump-zdd-dot", analyze_flags.dot_path,
                      "Write the exact analysis' conflict families at scope headers as DOT graphs");

  AnalysisFlags compare_flags;
  std::string subject;
  bool mutate_cmust = false;
  auto* compare = app.add_subcommand("compare", "Run a domain in lockstep with the exact analysis");
  add_analysis_flags(compare, compare_flags, "exact");
  compare->add_option("-s,--subject", subject, "Domain compared against the exact analysis")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(domain_names().begin(), domain_names().end())));
  compare->add_flag("--mutate-cmust", mutate_cmust,
                    "Loosen the C-Must classification by one, to check that violations are caught");

  AnalysisFlags constraint_flags;
  auto* constraints = app.add_subcommand("constraints", "Emit path-analysis constraints for persistent blocks");
  add_analysis_flags(constraints, constraint_flags, "exact");

  std::string oracle_input, oracle_block;
  CacheFlags oracle_cache;
  std::size_t budget = OracleOptions{}.budget;
  auto* oracle = app.add_subcommand("oracle-check", "Decide one block by exhaustive witness search");
  oracle->add_option("input", oracle_input, "CFG document")->required();
  oracle->add_option("-b,--block", oracle_block, "Block to check")->required();
  add_cache_flags(oracle, oracle_cache);
  oracle->add_option("--budget", budget, "Largest |V|*|E| searched exhaustively")->capture_default_str();

  auto* gen = app.add_subcommand("gen", "Generate CFG documents");
  gen->require_subcommand(1);
  std::string graph_path;
  std::uint64_t ham_stride = 512;
  auto* ham = gen->add_subcommand("hamiltonian", "CFG whose target block is persistent iff the graph has no "
                                                 "Hamiltonian circuit");
  ham->add_option("--graph", graph_path, "Undirected graph as an edge list")->required();
  ham->add_option("--stride", ham_stride, "Address distance between blocks")->capture_default_str();

  std::uint64_t seed = 0;
  RandomCfgParams rp;
  auto* random = gen->add_subcommand("random", "Random reducible CFG");
  random->add_option("--seed", seed, "Generator seed")->required();
  random->add_option("--nodes", rp.nodes, "Node count")->capture_default_str();
  random->add_option("--blocks", rp.blocks, "Block count")->capture_default_str();
  random->add_option("--branch-factor", rp.branch_factor, "Expected forward out-degree")->capture_default_str();
  random->add_option("--loop-probability", rp.loop_probability, "Chance of a back edge per node")
      ->capture_default_str();
  random->add_option("--empty-rate", rp.empty_rate, "Share of edges without an access")->capture_default_str();
  random->add_option("--many-rate", rp.many_rate, "Share of edges accessing one of several blocks")
      ->capture_default_str();
  random->add_option("--unknown-rate", rp.unknown_rate, "Share of edges accessing an unknown block")
      ->capture_default_str();
  random->add_option("--max-many", rp.max_many, "Largest candidate set of a many-block access")
      ->capture_default_str();
  random->add_option("--stride", rp.address_stride, "Address distance between blocks")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_flags);
    if (compare->parsed()) return cmd_compare(compare_flags, subject, mutate_cmust);
    if (constraints->parsed()) return cmd_constraints(constraint_flags);
    if (oracle->parsed()) return cmd_oracle_check(oracle_input, oracle_cache, oracle_block, budget);
    if (ham->parsed()) return cmd_gen_hamiltonian(graph_path, ham_stride);
    if (random->parsed()) {
      std::cout << print_cfg(gen_random_cfg(seed, rp));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
