#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "schemint/errors.hpp"
#include "schemint/resolve.hpp"

using namespace schemint;

namespace {

using Parts = std::vector<std::set<std::string>>;

struct House {
  KnowledgeGraph g = fixture::load_tsv("house.tsv").graph;
  AnchorLookup anchors;
  House() {
    for (const char* n : {"house", "home", "building", "family"}) anchors[n] = *g.find(n);
  }
};

const std::set<std::string> kHouseCluster{"house", "home", "building", "family"};

// Pairwise compatibility recomputed from BFS and the DP edit distance.
struct CompatOracle {
  const oracle::Graph* og;
  std::map<std::string, int> index;  // anchored attribute -> node
  int eps;
  int limit;
  std::map<int, std::vector<int>> dist;

  bool operator()(const std::string& a, const std::string& b) {
    if (oracle::edit_distance(oracle::lower_ascii(a), oracle::lower_ascii(b)) <= eps) return true;
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) return false;
    auto it = dist.find(ia->second);
    if (it == dist.end()) it = dist.emplace(ia->second, oracle::bfs(*og, ia->second)).first;
    const int d = it->second[ib->second];
    return d >= 0 && d <= limit;
  }
};

}  // namespace

TEST(ResolveConfig, Validation) {
  EXPECT_EQ((ResolveConfig{1.5, 2, 1}).semantic_limit(), 3);
  EXPECT_EQ((ResolveConfig{1.5, 3, 1}).semantic_limit(), 4);
  EXPECT_THROW((ResolveConfig{1.0, 3, 1}).validate(), ParameterError);
  EXPECT_THROW((ResolveConfig{0.5, 3, 1}).validate(), ParameterError);
  EXPECT_THROW((ResolveConfig{1.5, 0, 1}).validate(), ParameterError);
  EXPECT_THROW((ResolveConfig{1.5, 3, -1}).validate(), ParameterError);
  EXPECT_NO_THROW((ResolveConfig{}).validate());
}

TEST(CompositeDistance, HouseDistances) {
  House h;
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 2, 1});
  EXPECT_EQ(d.semantic("house", "home"), 1);
  EXPECT_EQ(d.semantic("building", "house"), 2);
  EXPECT_EQ(d.semantic("building", "home"), 3);
  EXPECT_FALSE(d.semantic("building", "family").has_value());
  EXPECT_TRUE(d.compatible("building", "home"));
  EXPECT_FALSE(d.compatible("building", "family"));
  EXPECT_EQ(d.literal("House", "house"), 0);
  EXPECT_TRUE(d.both_anchored("house", "home"));
  EXPECT_FALSE(d.both_anchored("house", "barn"));
}

TEST(SplitMembers, HouseSplitsIntoTwoSharingBridge) {
  House h;
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 2, 1});
  const Parts parts = split_members(kHouseCluster, d);
  EXPECT_EQ(parts, (Parts{{"building", "home", "house"}, {"family", "home", "house"}}));
}

TEST(SplitMembers, WithinToleranceUnchanged) {
  House h;
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 4, 1});  // limit 6 > 5
  EXPECT_EQ(split_members(kHouseCluster, d), Parts{kHouseCluster});
  EXPECT_EQ(split_members({"house"}, d), (Parts{{"house"}}));
}

TEST(SplitMembers, VetoSeparatesPair) {
  House h;
  const VetoCheck veto = [](const std::string& a, const std::string& b) {
    return (a == "house" && b == "home") || (a == "home" && b == "house");
  };
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 4, 1}, veto);
  const Parts parts = split_members(kHouseCluster, d);
  std::set<std::string> all;
  for (const auto& p : parts) {
    EXPECT_FALSE(p.count("house") && p.count("home"));
    all.insert(p.begin(), p.end());
  }
  EXPECT_EQ(all, kHouseCluster);
}

TEST(SplitMembers, LiteralOnlyChainSplits) {
  // no anchors: "abc"~"abd"~"abe" all within 1, "xbe" bridges only to "abe"
  const AnchorLookup none;
  const CompositeDistance d(nullptr, &none, ResolveConfig{1.5, 3, 1});
  const Parts parts = split_members({"abc", "abd", "abe", "xbe"}, d);
  EXPECT_EQ(parts, (Parts{{"abc", "abd", "abe"}, {"abe", "xbe"}}));
}

TEST(Resolve, FamilyHouseFixture) {
  House h;
  ClusterFamily f;
  ClusterSet c;
  c.members = kHouseCluster;
  f.add(c);
  f.add_singleton("barn");
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 2, 1});
  const ResolveReport r = resolve_all(f, d);
  EXPECT_EQ(r.examined, 2u);
  EXPECT_EQ(r.split, 1u);
  EXPECT_EQ(r.parts, 2u);
  EXPECT_EQ(f.size(), 3u);
  std::set<std::set<std::string>> got;
  for (const ClusterSet* cs : f.canonical()) got.insert(cs->members);
  EXPECT_EQ(got, (std::set<std::set<std::string>>{{"building", "home", "house"}, {"family", "home", "house"}, {"barn"}}));
}

TEST(Resolve, RebuildCallbackSetsFrontiers) {
  House h;
  ClusterFamily f;
  ClusterSet c;
  c.members = kHouseCluster;
  c.frontier = {{"structure", 1}};
  const ClusterId id = f.add(c);
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 2, 1});
  std::size_t calls = 0;
  const ClusterId ids[] = {id};
  resolve(f, d, ids, [&](const std::set<std::string>& part, const ClusterSet& original) {
    ++calls;
    EXPECT_EQ(original.members, kHouseCluster);
    return std::map<std::string, int>{{*part.begin(), 0}};
  });
  EXPECT_EQ(calls, 2u);
  for (const ClusterSet* cs : f.canonical()) EXPECT_EQ(cs->frontier.size(), 1u);
}

TEST(Representative, MinimalSumOfDistances) {
  House h;
  const CompositeDistance d(&h.g, &h.anchors, ResolveConfig{1.5, 2, 1});
  // sums: building 2+3=5, home 3+1=4, house 2+1=3
  EXPECT_EQ(representative({"building", "home", "house"}, d), "house");
  // house and home tie at 4 within {family, home, house}; name order wins
  EXPECT_EQ(representative({"family", "home", "house"}, d), "home");
  EXPECT_EQ(representative({"solo"}, d), "solo");
}

TEST(SplitMembers, RandomizedOverMergedClustersHoldPostconditions) {
  oracle::Rng rng(81);
  const ResolveConfig cfg{1.5, 2, 1};
  for (int round = 0; round < 60; ++round) {
    const oracle::Graph og = rng.graph(rng.uniform(10, 80), rng.uniform(10, 120));
    const KnowledgeGraph g = fixture::graph_of(og);
    AnchorLookup anchors;
    CompatOracle compat{&og, {}, cfg.epsilon_t, cfg.semantic_limit(), {}};
    std::set<std::string> members;
    const int anchored = rng.uniform(2, 10);
    for (int i = 0; i < anchored; ++i) {
      const int node = rng.uniform(0, static_cast<int>(og.names.size()) - 1);
      const std::string attr = "attr_" + og.names[node];
      members.insert(attr);
      anchors[attr] = static_cast<ConceptId>(node);
      compat.index[attr] = node;
    }
    const std::string base = rng.word("abc", 3, 5);
    for (int i = rng.uniform(0, 4); i > 0; --i) members.insert(rng.mutate(base, "abc", rng.uniform(0, 2)));

    const CompositeDistance d(&g, &anchors, cfg);
    const Parts parts = split_members(members, d);

    std::map<std::string, int> seen;
    for (const auto& p : parts) {
      ASSERT_FALSE(p.empty());
      for (const auto& a : p) ++seen[a];
      for (auto i = p.begin(); i != p.end(); ++i) {
        for (auto j = std::next(i); j != p.end(); ++j) ASSERT_TRUE(compat(*i, *j)) << *i << " / " << *j;
      }
    }
    // coverage
    std::set<std::string> covered;
    for (const auto& [a, n] : seen) covered.insert(a);
    ASSERT_EQ(covered, members);
    // duplicates only for attributes that fit every part they are in
    for (const auto& [a, n] : seen) {
      if (n < 2) continue;
      for (const auto& p : parts) {
        if (!p.count(a)) continue;
        for (const auto& b : p) {
          if (b != a) ASSERT_TRUE(compat(a, b));
        }
      }
    }
    // no part is contained in another
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (i != j) {
          ASSERT_FALSE(std::includes(parts[j].begin(), parts[j].end(), parts[i].begin(), parts[i].end()));
        }
      }
    }
    // a compatible cluster comes back whole
    bool closed = true;
    for (auto i = members.begin(); i != members.end() && closed; ++i) {
      for (auto j = std::next(i); j != members.end(); ++j) closed = closed && compat(*i, *j);
    }
    if (closed) ASSERT_EQ(parts, Parts{members});
  }
}

TEST(ValueShape, SplitsAffixes) {
  const ValueShape s = value_shape("$12");
  EXPECT_EQ(s.prefix, "$");
  EXPECT_EQ(s.core, "12");
  EXPECT_EQ(s.suffix, "");
  EXPECT_EQ(s.type, ValueType::kInteger);
  EXPECT_EQ(value_shape("45%").suffix, "%");
}

TEST(ValueType, Inference) {
  EXPECT_EQ(infer_value_type("42"), ValueType::kInteger);
  EXPECT_EQ(infer_value_type("-42"), ValueType::kInteger);
  EXPECT_EQ(infer_value_type("4.2"), ValueType::kDecimal);
  EXPECT_EQ(infer_value_type("2016-07-10"), ValueType::kDate);
  EXPECT_EQ(infer_value_type("a;b;c"), ValueType::kList);
  EXPECT_EQ(infer_value_type("abc"), ValueType::kString);
}

TEST(ValueVerify, Examples) {
  const std::vector<std::string> dollars_a{"$12", "$9"}, dollars_b{"$40"};
  const ValueVerdict affix = value_verify(dollars_a, dollars_b);
  EXPECT_EQ(affix.outcome, VerifyOutcome::kPass);
  EXPECT_EQ(affix.rule, VerifyRule::kAffix);

  const std::vector<std::string> ints{"1", "2"}, strs{"abc"};
  const ValueVerdict type = value_verify(ints, strs);
  EXPECT_EQ(type.outcome, VerifyOutcome::kFail);
  EXPECT_EQ(type.rule, VerifyRule::kType);

  const std::vector<std::string> none;
  EXPECT_EQ(value_verify(ints, none).outcome, VerifyOutcome::kInapplicable);
  EXPECT_EQ(value_verify(none, none).outcome, VerifyOutcome::kInapplicable);
}

TEST(ValueVerify, IntegerAndDecimalCompatible) {
  const std::vector<std::string> ints{"1", "2", "3"}, decs{"1.5", "2.25"};
  EXPECT_EQ(value_verify(ints, decs).outcome, VerifyOutcome::kPass);
}

TEST(ValueVerify, AffixMismatchFails) {
  const std::vector<std::string> dollars{"$1", "$2"}, euros{"€1", "€2"};
  const ValueVerdict v = value_verify(dollars, euros);
  EXPECT_EQ(v.outcome, VerifyOutcome::kFail);
  EXPECT_EQ(v.rule, VerifyRule::kAffix);
}

TEST(ValueVerify, NoDominantTypeIsInapplicable) {
  const std::vector<std::string> mixed{"1", "abc", "2", "def"}, ints{"1"};
  EXPECT_EQ(value_verify(mixed, ints).outcome, VerifyOutcome::kInapplicable);
}

TEST(Verify, FiltersAndQueues) {
  SampleStore samples{{"price", {"$12", "$9"}}, {"cost", {"$40"}}, {"count", {"1", "2"}}, {"label", {"abc"}}};
  ReviewQueue queue;
  const std::vector<MatchCandidate> candidates{
      {"price", "cost", MatchKind::kLiteralMember, 1, 0},
      {"count", "label", MatchKind::kSemanticMember, 2, 0},
      {"plain", "other", MatchKind::kLiteralMember, 1, 0},
      {"count", "some concept", MatchKind::kSemanticFrontier, 2, 1},
  };
  const auto kept = verify(candidates, samples, queue);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].left, "price");
  EXPECT_EQ(kept[1].left, "plain");
  EXPECT_EQ(kept[2].kind, MatchKind::kSemanticFrontier);
  ASSERT_EQ(queue.pending().size(), 1u);
  const ReviewItem& item = *queue.pending()[0];
  EXPECT_EQ(item.left, "count");
  EXPECT_EQ(item.right, "label");
  EXPECT_EQ(item.semantic_distance, 2);
  EXPECT_EQ(item.left_values, (std::vector<std::string>{"1", "2"}));
}

TEST(Verify, VerdictsOverrideValueRules) {
  SampleStore samples{{"count", {"1", "2"}}, {"label", {"abc"}}};
  ReviewQueue queue;
  const std::vector<MatchCandidate> c{{"count", "label", MatchKind::kLiteralMember, 1, 0}};
  EXPECT_TRUE(verify(c, samples, queue).empty());
  queue.decide(ReviewQueue::item_id("count", "label"), Verdict::kAccept);
  EXPECT_EQ(verify(c, samples, queue).size(), 1u);

  ReviewQueue vetoing;
  ReviewItem item;
  item.left = "a";
  item.right = "b";
  vetoing.enqueue(item);
  vetoing.decide(ReviewQueue::item_id("b", "a"), Verdict::kReject);
  const std::vector<MatchCandidate> ab{{"b", "a", MatchKind::kLiteralMember, 1, 0}};
  EXPECT_TRUE(verify(ab, {}, vetoing).empty());
}
