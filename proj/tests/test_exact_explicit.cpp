#include <gtest/gtest.h>

#include "persist/exact_explicit.hpp"
#include "persist/solver.hpp"
#include "support/properties.hpp"

namespace persist {
namespace {

using testing::block;
using testing::load_sample;
using testing::node;

Family fam(std::initializer_list<std::initializer_list<std::uint32_t>> sets) {
  Family f;
  for (auto s : sets) f.insert(BlockSet::of(s));
  return f;
}

constexpr std::uint32_t v = 0, w = 1, x = 2, y = 3;

TEST(MaxSet, Examples) {
  EXPECT_EQ(max_set(fam({{v}, {v, w}, {v, x}, {v, w, x}})), fam({{v, w, x}}));
  EXPECT_EQ(max_set(fam({{0, 1}, {1, 2}, {3}})), fam({{0, 1}, {1, 2}, {3}}));
  EXPECT_EQ(max_set(fam({{0, 1, 2}, {0, 1}})), fam({{0, 1, 2}}));
  EXPECT_EQ(max_set(Family{}), Family{});
  const auto once = max_set(fam({{0}, {0, 1}, {2}}));
  EXPECT_EQ(max_set(once), once);
}

TEST(Limit, Examples) {
  EXPECT_TRUE(limit(fam({{v, w, x, y}}), 3).is_top());
  EXPECT_EQ(limit(fam({{v, w, x}}), 3), ConflictFamily(fam({{v, w, x}})));
  EXPECT_EQ(limit(Family{}, 1), ConflictFamily{});
}

TEST(MaxCardinality, EmptyIsZero) {
  EXPECT_EQ(max_cardinality(Family{}), 0u);
  EXPECT_EQ(max_cardinality(fam({{}})), 0u);
  EXPECT_EQ(max_cardinality(fam({{v, w}, {v, x}, {v, w, x}})), 3u);
}

// Every entry of the conflict-tiers sample: v, then (w|x)+ in a loop, then y or
// nothing; k = 3.
TEST(ExactTiers, ConflictTiersSampleTable) {
  const auto g = load_sample("conflict_tiers.cfg");
  ASSERT_EQ(block(g, "v"), BlockId{v});
  ASSERT_EQ(block(g, "y"), BlockId{y});
  auto at = [&](ExactTier tier, const char* loc) {
    ExplicitExactDomain d(tier, 3);
    return solve_fixpoint(g, d).states[index_of(node(g, loc))].at(BlockId{v});
  };
  for (auto tier : {ExactTier::Raw, ExactTier::Maximal, ExactTier::Bounded}) {
    EXPECT_EQ(at(tier, "l0"), ConflictFamily{});
    EXPECT_EQ(at(tier, "l1"), ConflictFamily(fam({{v}})));
  }
  EXPECT_EQ(at(ExactTier::Raw, "l2"), ConflictFamily(fam({{v}, {v, w}, {v, x}, {v, w, x}})));
  EXPECT_EQ(at(ExactTier::Raw, "l3"), ConflictFamily(fam({{v, w}, {v, x}, {v, w, x}})));
  EXPECT_EQ(at(ExactTier::Raw, "l4"),
            ConflictFamily(fam({{v, w}, {v, x}, {v, w, x}, {v, w, y}, {v, x, y}, {v, w, x, y}})));
  for (auto tier : {ExactTier::Maximal, ExactTier::Bounded}) {
    EXPECT_EQ(at(tier, "l2"), ConflictFamily(fam({{v, w, x}})));
    EXPECT_EQ(at(tier, "l3"), ConflictFamily(fam({{v, w, x}})));
  }
  EXPECT_EQ(at(ExactTier::Maximal, "l4"), ConflictFamily(fam({{v, w, x, y}})));
  EXPECT_TRUE(at(ExactTier::Bounded, "l4").is_top());
}

TEST(ExactTiers, UpdateRules) {
  ExplicitExactDomain d(ExactTier::Bounded, 3);
  auto s = d.access(d.init_entry(), BlockId{w});
  EXPECT_EQ(s.at(BlockId{v}), ConflictFamily{}) << "never-accessed stays empty";
  s = d.access(d.access(s, BlockId{v}), BlockId{w});
  EXPECT_EQ(s.at(BlockId{v}), ConflictFamily(fam({{v, w}})));
  EXPECT_EQ(s.at(BlockId{w}), ConflictFamily(fam({{w}})));
  s = d.access(d.access(s, BlockId{x}), BlockId{y});
  EXPECT_TRUE(s.at(BlockId{v}).is_top());
  EXPECT_TRUE(d.access(s, BlockId{x}).at(BlockId{v}).is_top()) << "Top stays Top";
  EXPECT_FALSE(d.classify(s, BlockId{v}));
  EXPECT_TRUE(d.classify(s, BlockId{5})) << "never accessed";
}

TEST(ExactTiers, JoinRules) {
  ExplicitExactDomain d(ExactTier::Maximal, 2);
  auto a = d.access(d.access(d.init_entry(), BlockId{v}), BlockId{w});
  auto b = d.access(d.access(d.init_entry(), BlockId{v}), BlockId{x});
  EXPECT_EQ(d.join(a, d.bottom()), a);
  EXPECT_EQ(d.join(a, b).at(BlockId{v}), ConflictFamily(fam({{v, w}, {v, x}})));
  ExplicitExactDomain bounded(ExactTier::Bounded, 1);
  auto top = bounded.access(bounded.access(bounded.init_entry(), BlockId{v}), BlockId{w});
  ASSERT_TRUE(top.at(BlockId{v}).is_top());
  auto sets = bounded.access(bounded.init_entry(), BlockId{v});
  EXPECT_TRUE(bounded.join(top, sets).at(BlockId{v}).is_top());
}

TEST(ExactTiers, RejectsUncertainLabels) {
  ExplicitExactDomain d(ExactTier::Raw, 2);
  EXPECT_THROW(d.update(d.init_entry(), AccessLabel::unknown()), AnalysisError);
  EXPECT_THROW(d.update(d.init_entry(), AccessLabel::many(BlockSet::of({0, 1}))), AnalysisError);
  EXPECT_EQ(d.update(d.init_entry(), AccessLabel::empty()), d.init_entry());
}

TEST(ExactTiers, MotivatingLoopIsPersistent) {
  const auto g = load_sample("motivating.cfg");
  for (auto tier : {ExactTier::Raw, ExactTier::Maximal, ExactTier::Bounded}) {
    ExplicitExactDomain d(tier, 2);
    EXPECT_EQ(persistent_blocks(g, d, solve_fixpoint(g, d)), (std::vector<bool>{true, true}));
  }
}

TEST(ExactTiers, UpdateIsMonotoneUnderSubsumption) {
  // If every set of B lies inside some set of A, the same holds after an access.
  std::mt19937_64 rng(77);
  ExplicitExactDomain d(ExactTier::Raw, 4);
  auto subsumes = [](const Family& big, const Family& small) {
    for (const auto& s : small)
      if (std::none_of(big.begin(), big.end(), [&](const BlockSet& t) { return s.is_subset_of(t); })) return false;
    return true;
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::to_family(testing::random_family(rng, 5, 6));
    Family b;
    for (const auto& s : a) {
      if (rng() % 3 == 0) continue;
      BlockSet t;
      for (BlockId e : s)
        if (rng() % 2) t.insert(e);
      if (!t.empty()) b.insert(t);
    }
    ASSERT_TRUE(subsumes(a, b));
    const BlockId target{0};
    const BlockId accessed{static_cast<std::uint32_t>(1 + rng() % 4)};
    ExactState sa, sb;
    if (!a.empty()) sa.families[target] = ConflictFamily(a);
    if (!b.empty()) sb.families[target] = ConflictFamily(b);
    const auto ua = d.access(sa, accessed).at(target), ub = d.access(sb, accessed).at(target);
    EXPECT_TRUE(subsumes(ua.sets(), ub.sets()));
  }
}

TEST(FamilyLaws, HoldOnRandomFamilies) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto failure = testing::check_family_laws(seed);
    ASSERT_FALSE(failure) << *failure;
  }
}

TEST(TierAgreement, SmallCorpus) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto failure = testing::check_tier_agreement(seed);
    ASSERT_FALSE(failure) << *failure;
  }
}

}  // namespace
}  // namespace persist
