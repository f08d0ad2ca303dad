#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "fixtures.hpp"
#include "schemint/errors.hpp"
#include "schemint/neighbor_table.hpp"

using namespace schemint;

namespace {

std::set<std::string> names(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

KnowledgeGraph path_graph(int n) {
  KnowledgeGraphBuilder b;
  for (int i = 0; i + 1 < n; ++i) b.add_edge(std::string(1, char('A' + i)), std::string(1, char('A' + i + 1)));
  return std::move(b).build();
}

}  // namespace

TEST(NeighborTable, SingleEdge) {
  KnowledgeGraphBuilder b;
  b.add_edge("A", "B");
  const KnowledgeGraph g = std::move(b).build();
  const NeighborTable h1 = NeighborTable::build(g, 1);
  EXPECT_EQ(names(h1.lookup(g, "A")), std::set<std::string>{"B"});
  EXPECT_EQ(names(h1.lookup(g, "B")), std::set<std::string>{"A"});
}

TEST(NeighborTable, FragmentOneHop) {
  const auto r = fixture::load_tsv("pie_fragment.tsv");
  const NeighborTable h1 = NeighborTable::build(r.graph, 1);
  EXPECT_EQ(names(h1.lookup(r.graph, "Sweet pies")),
            (std::set<std::string>{"Strawberry pie", "pie", "Blackberry pie"}));
  EXPECT_EQ(names(h1.lookup(r.graph, "Blackberry pie")), (std::set<std::string>{"American pies", "Sweet pies"}));
}

TEST(NeighborTable, ExactDistanceFour) {
  const KnowledgeGraph g = path_graph(5);
  const NeighborTable h4 = NeighborTable::build(g, 4);
  EXPECT_EQ(names(h4.lookup(g, "A")), std::set<std::string>{"E"});
  EXPECT_EQ(names(h4.lookup(g, "C")), std::set<std::string>{});
  const NeighborTable h2 = NeighborTable::build(g, 2);
  EXPECT_EQ(names(h2.lookup(g, "C")), (std::set<std::string>{"A", "E"}));
}

TEST(NeighborTable, RejectsNonPowerOfTwo) {
  const KnowledgeGraph g = path_graph(3);
  EXPECT_THROW(NeighborTable::build(g, 3), ParameterError);
  EXPECT_THROW(NeighborTable::build(g, 0), ParameterError);
  EXPECT_THROW(NeighborTable::build(g, -2), ParameterError);
}

TEST(NeighborTable, ExactDistanceAndSymmetryOnRandomGraphs) {
  oracle::Rng rng(31);
  for (int round = 0; round < 15; ++round) {
    const oracle::Graph og = rng.graph(rng.uniform(2, 80), rng.uniform(1, 160));
    const KnowledgeGraph g = fixture::graph_of(og);
    for (int k : {1, 2, 4}) {
      const NeighborTable h = NeighborTable::build(g, k);
      for (std::size_t t = 0; t < og.names.size(); ++t) {
        const auto ref = oracle::bfs(og, static_cast<int>(t));
        std::set<ConceptId> expected;
        for (std::size_t v = 0; v < ref.size(); ++v) {
          if (ref[v] == k) expected.insert(static_cast<ConceptId>(v));
        }
        const auto row = h.at(static_cast<ConceptId>(t));
        ASSERT_EQ(std::set<ConceptId>(row.begin(), row.end()), expected);
        for (ConceptId u : row) {
          const auto back = h.at(u);
          ASSERT_TRUE(std::find(back.begin(), back.end(), static_cast<ConceptId>(t)) != back.end());
        }
        if (k == 1) {
          const auto adj = g.neighbors(static_cast<ConceptId>(t));
          ASSERT_EQ(std::set<ConceptId>(adj.begin(), adj.end()), expected);
        }
      }
    }
  }
}

TEST(NeighborTable, SerializeRoundTripIsByteIdentical) {
  oracle::Rng rng(32);
  const oracle::Graph og = rng.graph(300, 700);
  const KnowledgeGraph g = fixture::graph_of(og);
  for (std::uint64_t len : {10000ull, 64ull, 3ull}) {
    const NeighborTable h = NeighborTable::build(g, 2, BucketHashParams{13, len});
    const std::string bytes = h.serialize(g);
    const NeighborTable back = NeighborTable::deserialize(bytes, g);
    EXPECT_EQ(back.serialize(g), bytes);
    EXPECT_EQ(back.hop(), 2);
    for (ConceptId c = 0; c < g.concept_count(); ++c) {
      ASSERT_TRUE(std::equal(h.at(c).begin(), h.at(c).end(), back.at(c).begin(), back.at(c).end()));
    }
  }
}

TEST(NeighborTable, SaveAndLoadFile) {
  const auto r = fixture::load_tsv("pie_fragment.tsv");
  const NeighborTable h = NeighborTable::build(r.graph, 1);
  const auto path = std::filesystem::temp_directory_path() / "schemint_h1_test.tbl";
  h.save(path, r.graph);
  const NeighborTable back = NeighborTable::load(path, r.graph);
  EXPECT_EQ(back.serialize(r.graph), h.serialize(r.graph));
  std::filesystem::remove(path);
}

TEST(NeighborTable, ImageLookupWalksChains) {
  oracle::Rng rng(33);
  const oracle::Graph og = rng.graph(500, 900);
  const KnowledgeGraph g = fixture::graph_of(og);
  // A tiny bucket length forces many names into one slot chain.
  const NeighborTable h = NeighborTable::build(g, 1, BucketHashParams{13, 5});
  const NeighborTableImage image(h.serialize(g));
  EXPECT_EQ(image.hop(), 1);
  for (std::uint64_t b = 0; b < image.bucket_count(); ++b) EXPECT_EQ(image.base_offset(b) % 4096, 0u);
  for (ConceptId c = 0; c < g.concept_count(); ++c) {
    const auto found = image.find(g.name(c));
    ASSERT_TRUE(found.has_value());
    EXPECT_EQ(names(*found), names(h.lookup(g, g.name(c))));
  }
  EXPECT_FALSE(image.find("no such concept").has_value());
}

TEST(NeighborTable, CorruptBytesDetected) {
  const auto r = fixture::load_tsv("pie_fragment.tsv");
  std::string bytes = NeighborTable::build(r.graph, 1).serialize(r.graph);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(NeighborTable::deserialize(bad_magic, r.graph), StateCorruption);
  EXPECT_THROW(NeighborTable::deserialize(bytes.substr(0, bytes.size() / 2), r.graph), StateCorruption);
  const auto other = fixture::load_tsv("house.tsv");
  EXPECT_THROW(NeighborTable::deserialize(bytes, other.graph), StateCorruption);
}

TEST(Decompose, SetBitsDescending) {
  EXPECT_EQ(decompose_threshold(6), (std::vector<int>{4, 2}));
  EXPECT_EQ(decompose_threshold(1), (std::vector<int>{1}));
  EXPECT_EQ(decompose_threshold(7), (std::vector<int>{4, 2, 1}));
  for (int g = 1; g < 200; ++g) {
    int sum = 0;
    for (int k : decompose_threshold(g)) {
      EXPECT_TRUE(is_power_of_two(k));
      sum += k;
    }
    EXPECT_EQ(sum, g);
  }
  EXPECT_THROW(decompose_threshold(0), ParameterError);
}

TEST(PlanHops, CoversThreshold) {
  const std::vector<int> only1{1};
  EXPECT_EQ(plan_hops(3, only1).size(), 3u);
  const std::vector<int> some{1, 2, 4};
  const auto plan = plan_hops(6, some);
  EXPECT_EQ(plan.front().from, 0);
  EXPECT_EQ(plan.back().to, 6);
  for (std::size_t i = 1; i < plan.size(); ++i) EXPECT_EQ(plan[i].from, plan[i - 1].to);
  EXPECT_LT(plan.size(), 6u);
  const std::vector<int> no1{2, 4};
  EXPECT_THROW(plan_hops(3, no1), ParameterError);
}

TEST(ComposeNeighbors, RadiusOneIsAdjacency) {
  const auto r = fixture::load_tsv("pie_fragment.tsv");
  const NeighborTable h1 = NeighborTable::build(r.graph, 1);
  TableSet ts;
  ts.add(h1);
  const ConceptId sweet = *r.graph.find("Sweet pies");
  const auto got = compose_neighbors(ts, sweet, 1);
  ASSERT_EQ(got.size(), 3u);
  for (const auto& [c, d] : got) EXPECT_EQ(d, 1);
}

TEST(ComposeNeighbors, MissingTablesNamed) {
  const auto r = fixture::load_tsv("pie_fragment.tsv");
  const NeighborTable h1 = NeighborTable::build(r.graph, 1);
  TableSet ts;
  ts.add(h1);
  try {
    compose_neighbors(ts, 0, 6);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('4'), std::string::npos);
  }
}

TEST(ComposeNeighbors, EqualsBfsBallOnRandomGraphs) {
  oracle::Rng rng(34);
  for (int round = 0; round < 15; ++round) {
    const oracle::Graph og = rng.graph(rng.uniform(5, 150), rng.uniform(4, 300));
    const KnowledgeGraph g = fixture::graph_of(og);
    const NeighborTable h1 = NeighborTable::build(g, 1), h2 = NeighborTable::build(g, 2),
                        h4 = NeighborTable::build(g, 4);
    TableSet ts;
    ts.add(h1);
    ts.add(h2);
    ts.add(h4);
    for (int gamma : {1, 2, 3, 6, 7}) {
      const int t = rng.uniform(0, static_cast<int>(og.names.size()) - 1);
      const auto ref = oracle::bfs(og, t);
      std::map<ConceptId, int> expected;
      for (std::size_t v = 0; v < ref.size(); ++v) {
        if (static_cast<int>(v) != t && ref[v] >= 1 && ref[v] <= gamma) expected[static_cast<ConceptId>(v)] = ref[v];
      }
      const auto got = compose_neighbors(ts, static_cast<ConceptId>(t), gamma);
      const std::map<ConceptId, int> got_map(got.begin(), got.end());
      EXPECT_EQ(got_map, expected);
    }
  }
}
