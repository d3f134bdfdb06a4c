#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "support/test_support.hpp"

namespace persist {
namespace {

using testing::sample_path;

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + PERSIST_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string sample(const std::string& name) { return "\"" + sample_path(name) + "\""; }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

TEST(Cli, HelpListsEveryFlag) {
  const auto analyze = run("analyze --help");
  EXPECT_EQ(analyze.status, 0);
  for (const char* flag : {"-k", "--assoc", "--sets", "--line-size", "-d", "--domains", "--scopes", "--format",
                           "--dump-zdd-dot", "--many-threshold", "--independent-product"})
    EXPECT_TRUE(contains(analyze.out, flag)) << flag;
  const auto compare = run("compare --help");
  EXPECT_TRUE(contains(compare.out, "--subject"));
  EXPECT_TRUE(contains(compare.out, "--mutate-cmust"));
  EXPECT_TRUE(contains(run("oracle-check --help").out, "--budget"));
  EXPECT_TRUE(contains(run("gen random --help").out, "--seed"));
  EXPECT_TRUE(contains(run("gen hamiltonian --help").out, "--graph"));
  const auto top = run("--help");
  EXPECT_EQ(top.status, 0);
  for (const char* sub : {"analyze", "compare", "constraints", "oracle-check", "gen"})
    EXPECT_TRUE(contains(top.out, sub)) << sub;
  EXPECT_EQ(run("--version").out, "persist 1.0\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("analyze " + sample("motivating.cfg") + " -k 2").status, 0);
  EXPECT_EQ(run("analyze " + sample("motivating.cfg") + " -k 0").status, 1);
  EXPECT_EQ(run("analyze " + sample("motivating.cfg") + " -d nonsense").status, 1);
  EXPECT_EQ(run("").status, 1);
  EXPECT_EQ(run("analyze /nonexistent/file.cfg").status, 2);
  const auto bad = std::filesystem::temp_directory_path() / "persist_cli_bad.cfg";
  { std::ofstream(bad) << "entry a;\nedge a -> ;\n"; }
  EXPECT_EQ(run("analyze \"" + bad.string() + "\"").status, 2);
  std::filesystem::remove(bad);
  EXPECT_EQ(run("compare " + sample("loop_precision.cfg") + " -k 1 -s cmust").status, 0);
  EXPECT_EQ(run("compare " + sample("loop_precision.cfg") + " -k 1 -s cmust --mutate-cmust").status, 3);
}

TEST(Cli, Deterministic) {
  const std::string args = "analyze " + sample("exact_superior.cfg") + " -k 3 -d exact,cmust,blockcs,globalcs,product";
  EXPECT_EQ(run(args).out, run(args).out);
  EXPECT_EQ(run(args + " --format json").out, run(args + " --format json").out);
}

TEST(Cli, AnalyzeExactSuperior) {
  const auto r = run("analyze " + sample("exact_superior.cfg") + " -k 3 -d exact,cmust,blockcs,product");
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.out, "scope loop2 (header s0)"));
  EXPECT_TRUE(contains(r.out, "  v      persistent      not-persistent  not-persistent  not-persistent\n"));
  const auto json = run("analyze " + sample("exact_superior.cfg") + " -k 3 --format json");
  EXPECT_TRUE(contains(json.out, "\"format_version\": 1"));
}

TEST(Cli, OracleCheck) {
  const auto miss = run("oracle-check " + sample("motivating.cfg") + " -b x -k 1");
  EXPECT_EQ(miss.status, 0);
  EXPECT_EQ(miss.out,
            "NOT-PERSISTENT\nwitness: s0 -x-> s1 -> s0 -y-> s1 -> s0 -x-> s1\nmisses: accesses 1 and 3 of the trace\n");
  EXPECT_EQ(run("oracle-check " + sample("motivating.cfg") + " -b x -k 2").out, "PERSISTENT\n");
  EXPECT_EQ(run("oracle-check " + sample("motivating.cfg") + " -b nope -k 2").status, 2);
}

TEST(Cli, GeneratedDocumentsParse) {
  const auto ham = run("gen hamiltonian --graph " + sample("square_chord.edges"));
  ASSERT_EQ(ham.status, 0);
  EXPECT_TRUE(contains(ham.out, "associativity 4"));
  EXPECT_NO_THROW(parse_cfg(ham.out));
  const auto rnd = run("gen random --seed 5 --nodes 7 --many-rate 0.2 --unknown-rate 0.1");
  ASSERT_EQ(rnd.status, 0);
  EXPECT_NO_THROW(parse_cfg(rnd.out));
  EXPECT_EQ(rnd.out, run("gen random --seed 5 --nodes 7 --many-rate 0.2 --unknown-rate 0.1").out);
}

TEST(Cli, Constraints) {
  const auto r = run("constraints " + sample("motivating.cfg") + " -k 2 --scopes explicit");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "m_x_loop1 <= entries_loop1;\nm_y_loop1 <= entries_loop1;\n");
}

TEST(Cli, ZddDotDump) {
  const auto dot = std::filesystem::temp_directory_path() / "persist_cli_dump.dot";
  ASSERT_EQ(run("analyze " + sample("motivating.cfg") + " -k 2 --dump-zdd-dot \"" + dot.string() + "\"").status, 0);
  const auto text = testing::read_text(dot.string());
  EXPECT_TRUE(contains(text, "digraph"));
  std::filesystem::remove(dot);
}

}  // namespace
}  // namespace persist
