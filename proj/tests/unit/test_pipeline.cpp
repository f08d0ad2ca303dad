#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include <unistd.h>

#include "schemint/ed_join.hpp"
#include "schemint/errors.hpp"
#include "schemint/pipeline.hpp"

using namespace schemint;
namespace fs = std::filesystem;

namespace {

using Partition = std::set<std::set<std::string>>;

Partition partition(const ClusterFamily& f) {
  Partition out;
  for (const ClusterSet* c : f.canonical()) out.insert(c->members);
  return out;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("schemint_pipeline_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const KnowledgeBase& pie_kb() {
  static const KnowledgeBase kb = fixture::kb_from_file("pie_fragment.tsv", {1, 2, 4});
  return kb;
}

std::set<std::string> covered(const ClusterFamily& f) {
  std::set<std::string> out;
  for (const ClusterSet* c : f.canonical()) out.insert(c->members.begin(), c->members.end());
  return out;
}

AnchorLookup anchor_ids(const IntegrationState& st, const KnowledgeBase& kb) {
  AnchorLookup out;
  for (const auto& [attr, concept_name] : st.anchors) out[attr] = *kb.graph().find(concept_name);
  return out;
}

// Far-apart random words, each optionally paired with one close variant, so
// every literal component has diameter at most 1.
std::vector<std::string> literal_corpus(oracle::Rng& rng, int groups) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (static_cast<int>(seen.size()) < groups) {
    const std::string base = rng.word("bdfhjkmqvwxz", 9, 12);
    bool far = true;
    for (const auto& s : seen) far = far && oracle::edit_distance(s, base) > 4;
    if (!far || !seen.insert(base).second) continue;
    out.push_back(base);
    if (rng.coin(0.5)) out.push_back(rng.mutate(base, "bdfhjkmqvwxz", 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST(Schemas, ReadStringAndObjectAttributes) {
  const auto s = fixture::schemas_from_text(
      "{\"id\":\"a\",\"name\":\"A\",\"attributes\":[\"x\",{\"name\":\"y\",\"values\":[\"1\",\"2\"]}]}\n\n"
      "{\"id\":\"b\",\"name\":\"B\",\"attributes\":[]}\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].attributes[0].name, "x");
  EXPECT_EQ(s[0].attributes[1].values, (std::vector<std::string>{"1", "2"}));
  EXPECT_TRUE(s[1].attributes.empty());
}

TEST(Schemas, MalformedInputRejected) {
  EXPECT_THROW(fixture::schemas_from_text("{nope\n"), DataError);
  EXPECT_THROW(fixture::schemas_from_text("{\"id\":\"a\",\"name\":\"A\",\"attributes\":[]}\n"
                                          "{\"id\":\"a\",\"name\":\"B\",\"attributes\":[]}\n"),
               DataError);
}

TEST(BatchIntegrate, EmptyAttributeNameReportedAndSkipped) {
  const auto schemas = fixture::schemas_from_text("{\"id\":\"a\",\"name\":\"A\",\"attributes\":[\"\",\"word\"]}\n");
  IntegrationReport report;
  const IntegrationState st = batch_integrate(schemas, IntegrationParams{}, pie_kb(), {}, &report);
  EXPECT_EQ(report.normalization_errors.size(), 1u);
  EXPECT_EQ(partition(st.family), (Partition{{"word"}}));
}

TEST(IntegrationParams, Validation) {
  EXPECT_NO_THROW(IntegrationParams{}.validate());
  EXPECT_THROW((IntegrationParams{-1, 3, 1.5, 2, 64}).validate(), ParameterError);
  EXPECT_THROW((IntegrationParams{1, 0, 1.5, 2, 64}).validate(), ParameterError);
  EXPECT_THROW((IntegrationParams{1, 3, 1.0, 2, 64}).validate(), ParameterError);
  EXPECT_THROW((IntegrationParams{1, 3, 1.5, 0, 64}).validate(), ParameterError);
}

TEST(BatchIntegrate, EmptyCorpusGivesEmptyFamily) {
  const std::vector<Schema> none;
  const IntegrationState st = batch_integrate(none, IntegrationParams{}, pie_kb());
  EXPECT_TRUE(st.family.empty());
  EXPECT_TRUE(st.anchors.empty());
}

TEST(BatchIntegrate, WordCorpusFollowsEditDistance) {
  const auto schemas = fixture::schemas_from_file("word_schemas.jsonl");
  IntegrationReport report;
  const IntegrationState st = batch_integrate(schemas, IntegrationParams{}, pie_kb(), {}, &report);
  EXPECT_EQ(partition(st.family), (Partition{{"word", "work"}, {"name", "nabe"}, {"import"}, {"export"}}));
  EXPECT_EQ(report.attributes_seen, 6u);
  EXPECT_EQ(report.kb_absent.size(), 6u);
  EXPECT_EQ(report.ed_merges, 2u);
}

TEST(BatchIntegrate, UnanchorableCorpusEqualsEdJoinClustering) {
  oracle::Rng rng(101);
  for (int round = 0; round < 15; ++round) {
    const auto names = literal_corpus(rng, rng.uniform(1, 30));
    const std::vector<Schema> schemas{fixture::schema_of("s", names)};
    const IntegrationState st = batch_integrate(schemas, IntegrationParams{}, pie_kb());
    ASSERT_TRUE(st.anchors.empty());

    ClusterFamily ed;
    for (const auto& n : names) ed.add_singleton(n);
    ed_self_join(ed, EdJoinParams{1, 2});
    ASSERT_EQ(partition(st.family), partition(ed));

    oracle::UnionFind uf(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        if (oracle::edit_distance(names[i], names[j]) <= 1) uf.unite(i, j);
      }
    }
    ASSERT_EQ(partition(st.family), oracle::components(names, uf));
  }
}

TEST(BatchIntegrate, PieCorpusAnchorsAndMerges) {
  const auto schemas = fixture::schemas_from_file("pie_schemas.jsonl");
  IntegrationParams p;
  p.gamma = 2;
  const IntegrationState st = batch_integrate(schemas, p, pie_kb());
  EXPECT_EQ(st.anchors.at("Strawbery pie"), "Strawberry pie");
  EXPECT_EQ(st.anchors.at("Blackberry pie"), "Blackberry pie");
  EXPECT_FALSE(st.anchors.count("meat pie"));
  EXPECT_EQ(covered(st.family), (std::set<std::string>{"Blackberry pie", "Strawbery pie", "Tiropita", "Key lime pie",
                                                        "Savoury pies", "meat pie"}));
  // Blackberry pie is two hops from both Key lime pie and Strawberry pie, which
  // are four apart (> floor(1.5 * 2)); resolve keeps Blackberry pie in both parts.
  EXPECT_EQ(partition(st.family), (Partition{{"Blackberry pie", "Key lime pie"},
                                             {"Blackberry pie", "Strawbery pie"},
                                             {"Savoury pies", "Tiropita"},
                                             {"meat pie"}}));
  EXPECT_EQ(st.values.at("Key lime pie"), (std::vector<std::string>{"$4", "$5"}));
}

TEST(BatchIntegrate, HouseFixtureResolvesIntoTwoClusters) {
  const KnowledgeBase kb = fixture::kb_from_file("house.tsv");
  IntegrationParams p;
  p.gamma = 2;
  IntegrationReport report;
  const IntegrationState st = batch_integrate(fixture::schemas_from_file("house_schemas.jsonl"), p, kb, {}, &report);
  EXPECT_EQ(partition(st.family), (Partition{{"building", "home", "house"}, {"family", "home", "house"}}));
  EXPECT_EQ(report.clusters_split, 1u);
  const FamilyStats stats = family_stats(st.family);
  EXPECT_EQ(stats.clusters, 2u);
  EXPECT_EQ(stats.attributes, 4u);
  EXPECT_EQ(stats.overlapping_pairs, 1u);
  EXPECT_EQ(stats.shared_attributes, 2u);
  EXPECT_EQ(stats.size_histogram, (std::map<std::size_t, std::size_t>{{3, 2}}));
}

TEST(BatchIntegrate, CoverageAndDistanceContractOnRandomCorpora) {
  oracle::Rng rng(102);
  const KnowledgeBase& kb = pie_kb();
  std::vector<std::string> concepts;
  for (ConceptId c = 0; c < kb.graph().concept_count(); ++c) concepts.push_back(kb.graph().name(c));
  for (int round = 0; round < 20; ++round) {
    std::vector<std::string> names;
    for (int i = rng.uniform(1, 12); i > 0; --i) {
      const std::string& c = concepts[rng.uniform(0, static_cast<int>(concepts.size()) - 1)];
      names.push_back(rng.coin(0.3) ? rng.mutate(c, "aeiou", 1) : c);
    }
    for (int i = rng.uniform(0, 4); i > 0; --i) names.push_back(rng.word("xyzw", 4, 7));
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    IntegrationParams p;
    p.gamma = rng.uniform(1, 3);
    const IntegrationState st = batch_integrate(std::vector<Schema>{fixture::schema_of("s", names)}, p, kb);
    ASSERT_EQ(covered(st.family), std::set<std::string>(names.begin(), names.end()));

    const AnchorLookup ids = anchor_ids(st, kb);
    const CompositeDistance policy(&kb.graph(), &ids, p.resolve_config());
    for (const ClusterSet* c : st.family.canonical()) {
      const std::string rep = representative(c->members, policy);
      for (const auto& m : c->members) ASSERT_TRUE(m == rep || policy.compatible(m, rep)) << m << " vs " << rep;
    }
  }
}

TEST(IncrementalIntegrate, IntoEmptyFamilyGivesSingletonsWithFrontiers) {
  IntegrationState st = batch_integrate(std::vector<Schema>{}, IntegrationParams{}, pie_kb());
  const IntegrationReport r =
      incremental_integrate(st, std::vector<Schema>{fixture::schema_of("k", {"Blackberry pie", "Tiropita"})}, pie_kb());
  EXPECT_EQ(r.attributes_new, 2u);
  EXPECT_EQ(partition(st.family), (Partition{{"Blackberry pie"}, {"Tiropita"}}));
  EXPECT_EQ(st.family.owner("Blackberry pie").frontier,
            (std::map<std::string, int>{{"Blackberry pie", 0}, {"American pies", 1}, {"Sweet pies", 1}}));
  EXPECT_EQ(st.family.owner("Tiropita").frontier, (std::map<std::string, int>{{"Tiropita", 0}, {"Savoury pies", 1}}));
}

TEST(IncrementalIntegrate, AttributeWithinEpsilonJoinsExistingCluster) {
  IntegrationState st =
      batch_integrate(std::vector<Schema>{fixture::schema_of("a", {"word", "name"})}, IntegrationParams{}, pie_kb());
  const std::size_t before = st.family.size();
  incremental_integrate(st, std::vector<Schema>{fixture::schema_of("b", {"work"})}, pie_kb());
  EXPECT_EQ(st.family.size(), before);
  EXPECT_TRUE(st.family.owner("word").members.count("work"));

  const IntegrationState both = batch_integrate(
      std::vector<Schema>{fixture::schema_of("a", {"word", "name"}), fixture::schema_of("b", {"work"})},
      IntegrationParams{}, pie_kb());
  EXPECT_EQ(partition(st.family), partition(both.family));
}

TEST(IncrementalIntegrate, SemanticNeighbourReachesCluster) {
  IntegrationState st =
      batch_integrate(std::vector<Schema>{fixture::schema_of("a", {"Blackberry pie"})}, IntegrationParams{}, pie_kb());
  incremental_integrate(st, std::vector<Schema>{fixture::schema_of("b", {"Key lime pie"})}, pie_kb());
  EXPECT_EQ(partition(st.family), (Partition{{"Blackberry pie", "Key lime pie"}}));
}

TEST(IncrementalIntegrate, ReinsertingIsANoOp) {
  const auto schemas = fixture::schemas_from_file("pie_schemas.jsonl");
  IntegrationState st = batch_integrate(schemas, IntegrationParams{}, pie_kb());
  const std::string once = serialize_state(st);
  const IntegrationReport r = incremental_integrate(st, schemas, pie_kb());
  EXPECT_EQ(r.attributes_new, 0u);
  EXPECT_EQ(serialize_state(st), once);

  const std::vector<Schema> extra{fixture::schema_of("x", {"pie", "Natchitoches meat pie", "zzqx"})};
  incremental_integrate(st, extra, pie_kb());
  const std::string after_first = serialize_state(st);
  incremental_integrate(st, extra, pie_kb());
  EXPECT_EQ(serialize_state(st), after_first);
}

TEST(ReviewFlow, RejectedPairNeverCoOccursLater) {
  const KnowledgeBase& kb = pie_kb();
  const auto schemas = fixture::schemas_from_text(
      "{\"id\":\"a\",\"name\":\"a\",\"attributes\":[{\"name\":\"count\",\"values\":[\"1\",\"2\"]},"
      "{\"name\":\"counts\",\"values\":[\"abc\",\"def\"]}]}\n");
  IntegrationState st = batch_integrate(schemas, IntegrationParams{}, kb);
  EXPECT_EQ(partition(st.family), (Partition{{"count"}, {"counts"}}));
  ASSERT_EQ(st.review.pending().size(), 1u);
  const std::string id = st.review.pending()[0]->id;

  std::istringstream decisions("{\"id\":\"" + id + "\",\"verdict\":\"reject\"}\n{\"id\":\"r-x\",\"verdict\":\"accept\"}\n");
  const ImportReport r = apply_review_decisions(st, decisions, kb);
  EXPECT_EQ(r.rejected, std::vector<std::string>{id});
  EXPECT_EQ(r.unknown, std::vector<std::string>{"r-x"});

  // "countz" is within 1 of both and would chain them together
  incremental_integrate(st, std::vector<Schema>{fixture::schema_of("b", {"countz"})}, kb);
  for (const ClusterSet* c : st.family.canonical()) EXPECT_FALSE(c->members.count("count") && c->members.count("counts"));
  EXPECT_EQ(covered(st.family), (std::set<std::string>{"count", "counts", "countz"}));
}

TEST(ReviewFlow, AcceptedPairMergesOnResolveInput) {
  const KnowledgeBase& kb = pie_kb();
  const auto schemas = fixture::schemas_from_text(
      "{\"id\":\"a\",\"name\":\"a\",\"attributes\":[{\"name\":\"count\",\"values\":[\"1\",\"2\"]},"
      "{\"name\":\"counts\",\"values\":[\"abc\",\"def\"]}]}\n");
  IntegrationState st = batch_integrate(schemas, IntegrationParams{}, kb);
  const std::string id = st.review.pending()[0]->id;
  std::istringstream decisions("{\"id\":\"" + id + "\",\"verdict\":\"accept\"}\n");
  apply_review_decisions(st, decisions, kb);
  EXPECT_TRUE(st.review.is_accepted("count", "counts"));
  EXPECT_TRUE(st.review.pending().empty());
}

TEST(State, SerializeParseRoundTrip) {
  const auto schemas = fixture::schemas_from_file("pie_schemas.jsonl");
  const IntegrationState st = batch_integrate(schemas, IntegrationParams{}, pie_kb());
  const std::string text = serialize_state(st);
  const IntegrationState back = parse_state(text);
  EXPECT_EQ(serialize_state(back), text);
  EXPECT_EQ(partition(back.family), partition(st.family));
  EXPECT_EQ(back.anchors, st.anchors);
  EXPECT_EQ(back.values, st.values);
}

TEST(State, CorruptInputRejected) {
  EXPECT_THROW(parse_state("{"), StateCorruption);
  EXPECT_THROW(parse_state("[]"), StateCorruption);
  EXPECT_THROW(parse_state("{\"clusters\": 3}"), StateCorruption);
}

TEST(State, SaveLoadAndIndexCheck) {
  const fs::path dir = temp_dir("state");
  const IntegrationState st = batch_integrate(fixture::schemas_from_file("word_schemas.jsonl"), IntegrationParams{}, pie_kb());
  const fs::path path = dir / "clusters.json";
  save_state(st, path);
  EXPECT_TRUE(fs::exists(dir / "clusters.json.qidx"));
  const IntegrationState back = load_state(path);
  EXPECT_EQ(serialize_state(back), serialize_state(st));

  std::ofstream(dir / "clusters.json.qidx", std::ios::binary | std::ios::trunc) << "garbage";
  EXPECT_THROW(load_state(path), StateCorruption);
  std::ofstream(path, std::ios::trunc) << "{\"clusters\": [";
  EXPECT_THROW(load_state(path), StateCorruption);
  EXPECT_THROW(load_state(dir / "missing.json"), NotFound);
  fs::remove_all(dir);
}

TEST(KnowledgeBase, SaveLoadPreservesTablesAndResults) {
  const fs::path dir = temp_dir("kb");
  const KnowledgeBase& kb = pie_kb();
  kb.save(dir);
  for (const char* f : {"edges.tsv", "H1.tbl", "H2.tbl", "H4.tbl", "concepts.qidx", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const KnowledgeBase back = KnowledgeBase::load(dir);
  ASSERT_EQ(back.graph().concept_count(), kb.graph().concept_count());
  EXPECT_EQ(back.table_hops(), kb.table_hops());
  for (int k : kb.table_hops()) {
    for (ConceptId c = 0; c < kb.graph().concept_count(); ++c) {
      const auto a = kb.table(k)->lookup(kb.graph(), kb.graph().name(c));
      const auto b = back.table(k)->lookup(back.graph(), kb.graph().name(c));
      ASSERT_EQ(a, b);
    }
  }
  const auto schemas = fixture::schemas_from_file("pie_schemas.jsonl");
  IntegrationState x = batch_integrate(schemas, IntegrationParams{}, kb);
  IntegrationState y = batch_integrate(schemas, IntegrationParams{}, back);
  x.kb = y.kb = "";
  EXPECT_EQ(serialize_state(x), serialize_state(y));
  fs::remove_all(dir);
  EXPECT_THROW(KnowledgeBase::load(dir), NotFound);
}
