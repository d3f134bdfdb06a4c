#include <gtest/gtest.h>

#include <random>

#include "persist/oracle.hpp"
#include "support/test_support.hpp"

namespace persist {
namespace {

using testing::block;
using testing::load_sample;

std::vector<bool> simulate(std::initializer_list<std::uint32_t> t, std::uint32_t k) {
  std::vector<BlockId> trace;
  for (auto b : t) trace.push_back(BlockId{b});
  return lru_simulate(trace, k);
}

TEST(Lru, Examples) {
  EXPECT_EQ(simulate({0, 1, 0}, 1), (std::vector<bool>{false, false, false}));
  EXPECT_EQ(simulate({0, 1, 0}, 2), (std::vector<bool>{false, false, true}));
  EXPECT_TRUE(simulate({}, 3).empty());
}

// The hit verdict equals "age <= k", with the age counted from the conflict
// set since the previous access, and matches an explicit LRU stack.
TEST(Lru, AgreesWithAgeDefinitionAndStack) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 3000; ++i) {
    const std::uint32_t k = 1 + rng() % 4;
    std::vector<std::uint32_t> raw(rng() % 12);
    for (auto& b : raw) b = rng() % 6;
    std::vector<BlockId> trace;
    for (auto b : raw) trace.push_back(BlockId{b});
    const auto hits = lru_simulate(trace, k);
    EXPECT_EQ(hits, testing::naive_lru(raw, k));
    for (std::size_t j = 0; j < raw.size(); ++j) {
      std::optional<std::size_t> prev;
      for (std::size_t p = 0; p < j; ++p)
        if (raw[p] == raw[j]) prev = p;
      bool expected = false;
      if (prev) {
        std::set<std::uint32_t> conflict(raw.begin() + static_cast<long>(*prev), raw.begin() + static_cast<long>(j) + 1);
        expected = conflict.size() <= k;
      }
      EXPECT_EQ(hits[j], expected);
    }
  }
}

TEST(Witness, MotivatingLoop) {
  const auto g = load_sample("motivating.cfg");
  const auto w = find_witness(g, block(g, "x"), 1);
  ASSERT_TRUE(w);
  const auto trace = path_trace(g, w->path);
  EXPECT_EQ(trace, (std::vector<BlockId>{block(g, "x"), block(g, "y"), block(g, "x")}));
  EXPECT_EQ(w->first_miss, 0u);
  EXPECT_EQ(w->second_miss, 2u);
  EXPECT_TRUE(validate_witness(g, block(g, "x"), 1, *w));
  EXPECT_FALSE(find_witness(g, block(g, "x"), 2));
}

TEST(Witness, Examples) {
  const auto superior = load_sample("exact_superior.cfg");
  EXPECT_FALSE(find_witness(superior, block(superior, "v"), 3));
  const auto join = load_sample("join_precision.cfg");
  EXPECT_TRUE(brute_force_persistent(join, block(join, "v"), 2));
  EXPECT_FALSE(brute_force_persistent(join, block(join, "v"), 1));
  const auto unused = parse_cfg("entry a; node b; block z; edge a -> b access q; edge b -> a;");
  EXPECT_TRUE(brute_force_persistent(unused, block(unused, "z"), 1));
}

TEST(Witness, RejectsTamperedWitness) {
  const auto g = load_sample("motivating.cfg");
  auto w = *find_witness(g, block(g, "x"), 1);
  auto moved = w;
  moved.second_miss = 1;
  EXPECT_FALSE(validate_witness(g, block(g, "x"), 1, moved));
  EXPECT_FALSE(validate_witness(g, block(g, "x"), 2, w)) << "the second access hits at k = 2";
  auto broken = w;
  broken.path.erase(broken.path.begin() + 1);
  EXPECT_FALSE(validate_witness(g, block(g, "x"), 1, broken));
}

TEST(Witness, Preconditions) {
  const auto many = parse_cfg("entry a; node b; edge a -> b access {p, q}; edge b -> a;");
  EXPECT_THROW(find_witness(many, block(many, "p"), 1), AnalysisError);
  RandomCfgParams p;
  p.nodes = 40;
  p.blocks = 3;
  const auto big = gen_random_cfg(1, p);
  EXPECT_THROW(find_witness(big, BlockId{0}, 2), BudgetExceeded);
  OracleOptions larger;
  larger.budget = 1'000'000;
  EXPECT_NO_THROW(find_witness(big, BlockId{0}, 2, larger));
}

TEST(Witness, LengthBound) {
  const auto g = load_sample("motivating.cfg");
  EXPECT_EQ(witness_length_bound(g), 3u + 3u * 4u + 2u);
}

TEST(Witness, ValidAndConsistentWithEnumeration) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto [g, k] = testing::corpus_case(seed);
    const std::size_t depth = std::min<std::size_t>(witness_length_bound(g), g.edges().size() <= 8 ? 9 : 7);
    for (std::uint32_t b = 0; b < g.num_blocks(); ++b) {
      const auto w = find_witness(g, BlockId{b}, k);
      const bool enumerated = testing::enumerated_witness_exists(g, BlockId{b}, k, depth);
      if (w) {
        EXPECT_TRUE(validate_witness(g, BlockId{b}, k, *w));
        std::vector<std::uint32_t> raw;
        for (auto a : path_trace(g, w->path)) raw.push_back(index_of(a));
        const auto hits = testing::naive_lru(raw, k);
        int misses = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) misses += raw[i] == b && !hits[i];
        EXPECT_GE(misses, 2);
        if (w->path.size() <= depth) EXPECT_TRUE(enumerated) << "seed " << seed;
      } else {
        EXPECT_FALSE(enumerated) << "seed " << seed << " block " << b << "\n" << print_cfg(g);
      }
    }
  }
}

TEST(Witness, DoubleBoundFindsNothingNew) {
  OracleOptions twice;
  twice.length_factor = 2;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto [g, k] = testing::corpus_case(seed);
    for (std::uint32_t b = 0; b < g.num_blocks(); ++b)
      EXPECT_EQ(find_witness(g, BlockId{b}, k).has_value(), find_witness(g, BlockId{b}, k, twice).has_value());
  }
}

}  // namespace
}  // namespace persist
