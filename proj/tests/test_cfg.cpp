#include <gtest/gtest.h>

#include "persist/cfg.hpp"
#include "persist/error.hpp"
#include "persist/generators.hpp"
#include "support/test_support.hpp"

namespace persist {
namespace {

using testing::block;
using testing::load_sample;
using testing::node;

template <typename E>
std::string error_of(std::string_view text) {
  try {
    parse_cfg(text);
  } catch (const E& e) {
    return e.what();
  }
  return "no error";
}

TEST(ParseCfg, MotivatingLoop) {
  const auto g = load_sample("motivating.cfg");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_blocks(), 2u);
  EXPECT_EQ(g.edges().size(), 4u);
  EXPECT_EQ(g.entry(), node(g, "s0"));
  ASSERT_EQ(g.scopes().size(), 1u);
  EXPECT_EQ(g.scopes()[0].name, "loop1");
  EXPECT_EQ(g.scopes()[0].header, node(g, "s0"));
  EXPECT_EQ(g.edge(0).label, AccessLabel::single(block(g, "x")));
  EXPECT_TRUE(g.edge(2).label.is_empty());
}

TEST(ParseCfg, EntryOnlyDocument) {
  const auto g = parse_cfg("entry n0;");
  EXPECT_EQ(g.num_nodes(), 1u);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.num_blocks(), 0u);
}

TEST(ParseCfg, LabelsAndAddresses) {
  const auto g = parse_cfg(R"(
    entry a;
    node a @ 0x40;
    node b;
    block p @ 20;
    edge a -> b access {p, q, r};   # q and r are interned on first mention
    edge b -> a access ?;
    edge a -> b access {q};
  )");
  EXPECT_EQ(g.node(node(g, "a")).address, 0x40u);
  EXPECT_EQ(g.block(block(g, "p")).address, 0x20u);
  EXPECT_FALSE(g.block(block(g, "q")).address.has_value());
  EXPECT_TRUE(g.edge(0).label.is_many());
  EXPECT_EQ(g.edge(0).label.blocks().size(), 3u);
  EXPECT_TRUE(g.edge(1).label.is_unknown());
  EXPECT_TRUE(g.edge(2).label.is_single()) << "a one-block set normalizes to a single access";
}

TEST(ParseCfg, ParallelEdgesArePreserved) {
  const auto g = parse_cfg("entry a; node b; edge a -> b access x; edge a -> b access x;");
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(ParseCfg, Errors) {
  EXPECT_NE(error_of<ValidationError>("entry a; edge a -> b;").find("edge endpoint undeclared"), std::string::npos);
  EXPECT_NE(error_of<ValidationError>("entry a; node a; node a;").find("duplicate"), std::string::npos);
  EXPECT_NE(error_of<ValidationError>("entry a; node b;").find("unreachable node 'b'"), std::string::npos);
  EXPECT_NE(error_of<ValidationError>("entry a; scope s header a members a, zz;").find("zz"), std::string::npos);
  EXPECT_NE(error_of<ValidationError>("node a;").find("missing entry"), std::string::npos);
  EXPECT_NE(error_of<ParseError>("entry a; entry b;").find("line 1:"), std::string::npos);
  EXPECT_NE(error_of<ParseError>("entry a;\nnode b\n").find("line "), std::string::npos);
  EXPECT_NE(error_of<ParseError>("entry a; node b; edge a -> b access {};").find("expected block name"),
            std::string::npos);
  EXPECT_NE(error_of<ParseError>("entry a; frobnicate;").find("line 1:"), std::string::npos);
}

TEST(ParseCfg, ParseErrorCarriesPosition) {
  try {
    parse_cfg("entry a;\n  node ;\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(ParseCfg, ScopeValidation) {
  // The back edge into the header comes from outside the declared members.
  EXPECT_THROW(parse_cfg("entry a; node b; edge a -> b; edge b -> a; scope s header a members a;"),
               ValidationError);
  EXPECT_THROW(parse_cfg("entry a; node b; edge a -> b; scope s header a members b;"), ValidationError);
  EXPECT_THROW(parse_cfg("entry a; scope program header a members a;"), ValidationError);
}

// Round trip on random graphs of every label kind, with detected loops
// declared as scopes.
TEST(PrintCfg, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomCfgParams p;
    p.nodes = 1 + seed % 9;
    p.blocks = 1 + seed % 5;
    p.many_rate = 0.2;
    p.unknown_rate = 0.1;
    const auto g = gen_random_cfg(seed, p);
    auto b = CfgBuilder::with_blocks_of(g);
    for (const auto& n : g.nodes()) b.add_node(n.name, n.address);
    for (const auto& e : g.edges()) b.add_edge(e.source, e.label, e.target);
    b.set_entry(g.entry());
    for (auto s : detect_natural_loops(g)) b.add_scope(std::move(s));
    const auto with_scopes = std::move(b).build();
    const auto text = print_cfg(with_scopes);
    const auto back = parse_cfg(text);
    ASSERT_EQ(back, with_scopes) << text;
    EXPECT_EQ(print_cfg(back), text);
  }
}

TEST(Cfg, AccessingNodesProperty) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomCfgParams p;
    p.nodes = 6;
    p.blocks = 4;
    p.many_rate = 0.2;
    p.unknown_rate = 0.1;
    const auto g = gen_random_cfg(seed, p);
    for (std::uint32_t b = 0; b < g.num_blocks(); ++b) {
      std::set<NodeId> expected;
      for (const auto& e : g.edges()) {
        const auto& l = e.label;
        if ((l.is_single() && l.block() == BlockId{b}) || (l.is_many() && l.blocks().contains(BlockId{b})) ||
            l.is_unknown())
          expected.insert(e.source);
      }
      const auto vb = g.accessing_nodes(BlockId{b});
      EXPECT_EQ(std::set<NodeId>(vb.begin(), vb.end()), expected);
    }
  }
}

TEST(CacheSets, IndexFormula) {
  const auto g = parse_cfg("entry a; node b; block p @ 0x00; block q @ 0x10; block r @ 0x20; edge a -> b;");
  const CacheConfig c{4, 2, 16};
  EXPECT_EQ(cache_set_of(g, c, block(g, "p")), 0u);
  EXPECT_EQ(cache_set_of(g, c, block(g, "q")), 1u);
  EXPECT_EQ(cache_set_of(g, c, block(g, "r")), 0u);
}

TEST(CacheSets, SingleSetIsIdentity) {
  const auto g = load_sample("exact_superior.cfg");
  EXPECT_EQ(project_to_cache_set(g, CacheConfig{4, 1, 16}, 0), g);
}

TEST(CacheSets, UnknownKeptInEveryProjection) {
  const auto g = parse_cfg("entry a; node b; block p @ 0; edge a -> b access ?; edge b -> a access p;");
  const CacheConfig c{2, 4, 16};
  for (std::uint32_t s = 0; s < 4; ++s) {
    const auto proj = project_to_cache_set(g, c, s);
    EXPECT_TRUE(proj.edge(0).label.is_unknown());
    EXPECT_EQ(proj.edge(1).label.is_single(), s == 0);
  }
}

TEST(CacheSets, ProjectionsPartitionAccesses) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomCfgParams p;
    p.nodes = 7;
    p.blocks = 6;
    p.many_rate = 0.3;
    p.address_stride = 16;
    const auto g = gen_random_cfg(seed, p);
    const CacheConfig c{2, 4, 16};
    std::vector<std::vector<BlockSet>> seen(g.edges().size());
    for (std::uint32_t s = 0; s < 4; ++s) {
      const auto proj = project_to_cache_set(g, c, s);
      ASSERT_EQ(proj.edges().size(), g.edges().size());
      for (std::uint32_t e = 0; e < g.edges().size(); ++e) {
        for (BlockId b : proj.edge(e).label.blocks()) EXPECT_EQ(cache_set_of(g, c, b), s);
        seen[e].push_back(proj.edge(e).label.blocks());
      }
    }
    for (std::uint32_t e = 0; e < g.edges().size(); ++e) {
      BlockSet all;
      std::size_t total = 0;
      for (const auto& part : seen[e]) {
        all = all.united(part);
        total += part.size();
      }
      EXPECT_EQ(all, g.edge(e).label.blocks());
      EXPECT_EQ(total, g.edge(e).label.blocks().size()) << "each access survives in exactly one projection";
    }
  }
}

TEST(CacheSets, Errors) {
  const auto g = parse_cfg("entry a; node b; edge a -> b access p;");
  EXPECT_THROW(project_to_cache_set(g, CacheConfig{2, 2, 16}, 0), ValidationError);
  const auto unaligned = parse_cfg("entry a; node b; block p @ 0x8; edge a -> b access p;");
  EXPECT_THROW(project_to_cache_set(unaligned, CacheConfig{2, 2, 16}, 0), ValidationError);
  EXPECT_THROW((CacheConfig{0, 1, 16}.validate()), ValidationError);
  EXPECT_THROW((CacheConfig{1, 1, 12}.validate()), ValidationError);
}

TEST(Loops, DetectsTheSingleLoop) {
  const auto g = load_sample("conflict_tiers.cfg");
  const auto loops = detect_natural_loops(g);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].header, node(g, "l2"));
  EXPECT_EQ(loops[0].members, (std::vector<NodeId>{node(g, "l2"), node(g, "l3")}));
}

TEST(Loops, NestedLoopsInnermostFirst) {
  const auto g = load_sample("exact_superior.cfg");
  const auto loops = detect_natural_loops(g);
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_EQ(loops[0].name, "loop1");
  EXPECT_EQ(loops[0].members, (std::vector<NodeId>{node(g, "s2"), node(g, "s3")}));
  EXPECT_EQ(loops[1].header, node(g, "s0"));
  EXPECT_EQ(loops[1].members.size(), 4u);
}

TEST(Loops, AcyclicHasNone) {
  EXPECT_TRUE(detect_natural_loops(parse_cfg("entry a; node b; node c; edge a -> b; edge b -> c;")).empty());
}

TEST(Loops, IrreducibleRejected) {
  const auto g = parse_cfg("entry a; node b; node c; edge a -> b; edge a -> c; edge b -> c; edge c -> b;");
  try {
    detect_natural_loops(g);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("irreducible loop; declare scopes explicitly"), std::string::npos);
  }
}

TEST(Loops, RandomGraphsAreReducible) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    RandomCfgParams p;
    p.nodes = 2 + seed % 10;
    p.loop_probability = 0.6;
    EXPECT_NO_THROW(detect_natural_loops(gen_random_cfg(seed, p))) << seed;
  }
}

TEST(Loops, DominatorsOnDiamond) {
  const auto g = parse_cfg("entry a; node b; node c; node d; edge a -> b; edge a -> c; edge b -> d; edge c -> d;");
  const auto idom = immediate_dominators(g);
  EXPECT_EQ(idom[index_of(node(g, "d"))], node(g, "a"));
  EXPECT_EQ(idom[index_of(node(g, "b"))], node(g, "a"));
  EXPECT_TRUE(dominates(idom, node(g, "a"), node(g, "d"), g.entry()));
  EXPECT_FALSE(dominates(idom, node(g, "b"), node(g, "d"), g.entry()));
}

TEST(Scopes, RestrictionDropsExitsAndKeepsBlocks) {
  const auto g = load_sample("exact_superior.cfg");
  const auto inner = detect_natural_loops(g)[0];
  const auto r = restrict_to_scope(g, inner);
  EXPECT_EQ(r.num_nodes(), 2u);
  EXPECT_EQ(r.num_blocks(), g.num_blocks());
  EXPECT_EQ(r.node(r.entry()).name, "s2");
  EXPECT_EQ(r.edges().size(), 3u);
  EXPECT_TRUE(r.scopes().empty());
}

TEST(Transforms, ExpandManyEdges) {
  const auto g = parse_cfg("entry a; node b; edge a -> b access {p, q}; edge b -> a access ?;");
  const auto x = expand_many_edges(g);
  ASSERT_EQ(x.edges().size(), 3u);
  EXPECT_EQ(x.edge(0).label, AccessLabel::single(block(g, "p")));
  EXPECT_EQ(x.edge(1).label, AccessLabel::single(block(g, "q")));
  EXPECT_TRUE(x.edge(2).label.is_unknown());
}

TEST(Transforms, ConcretizeUncertainEdges) {
  const auto g = parse_cfg("entry a; node b; edge a -> b access {p, q}; edge b -> a access ?;");
  const auto c = concretize_uncertain_edges(g, 2);
  EXPECT_EQ(c.num_blocks(), 4u);
  EXPECT_FALSE(c.has_label(AccessLabel::Kind::Many));
  EXPECT_FALSE(c.has_label(AccessLabel::Kind::Unknown));
  EXPECT_EQ(c.edges().size(), 2u + 4u);
}

TEST(Labels, ManyNormalization) {
  EXPECT_THROW(AccessLabel::many(BlockSet{}), ValidationError);
  EXPECT_TRUE(AccessLabel::many(BlockSet::of({3})).is_single());
  const auto l = AccessLabel::many(BlockSet::of({1, 2}));
  EXPECT_TRUE(l.may_access(BlockId{2}));
  EXPECT_FALSE(l.may_access(BlockId{0}));
  EXPECT_TRUE(AccessLabel::unknown().may_access(BlockId{7}));
  EXPECT_FALSE(AccessLabel::empty().may_access(BlockId{0}));
}

}  // namespace
}  // namespace persist
