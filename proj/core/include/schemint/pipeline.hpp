#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schemint/cluster.hpp"
#include "schemint/kb_store.hpp"
#include "schemint/neighbor_table.hpp"
#include "schemint/normalize.hpp"
#include "schemint/qgram_index.hpp"
#include "schemint/resolve.hpp"
#include "schemint/review.hpp"
#include "schemint/semantic_join.hpp"

namespace schemint {

struct IntegrationParams {
  int epsilon_t = 1;
  int gamma = 3;
  double beta = 1.5;
  int q = 2;
  std::size_t frontier_cap = 64;

  void validate() const;
  ResolveConfig resolve_config() const { return {beta, gamma, epsilon_t}; }
};

struct SchemaAttribute {
  std::string name;
  std::vector<std::string> values;
};

struct Schema {
  std::string id;
  std::string name;
  std::vector<SchemaAttribute> attributes;
};

// One JSON document per line: {"id", "name", "attributes": [{"name", "values"?}]}.
// Throws DataError naming the line on malformed input or a repeated id.
std::vector<Schema> read_schemas(std::istream& in);

// Graph, neighbor tables and the concept-name index, as stored in a KB
// directory:
//   edges.tsv       cleaned six-field edges
//   H<k>.tbl        neighbor tables
//   concepts.qidx   q-gram index over concept names in id order
//   manifest.json   counts, table list, hash parameters
class KnowledgeBase {
 public:
  static KnowledgeBase build(std::istream& edges, std::span<const int> ks, BucketHashParams hash = {}, int q = 2);
  static KnowledgeBase from_graph(KnowledgeGraph graph, std::span<const int> ks, BucketHashParams hash = {},
                                  int q = 2);
  static KnowledgeBase load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  const KnowledgeGraph& graph() const { return *graph_; }
  TableSet tables() const;
  const NeighborTable* table(int k) const;
  std::vector<int> table_hops() const;
  const BucketHashParams& hash_params() const { return hash_; }
  const IngestReport& ingest_report() const { return report_; }
  Anchorer anchorer(int epsilon_t) const { return Anchorer(*graph_, concept_index_, epsilon_t); }

 private:
  std::unique_ptr<KnowledgeGraph> graph_;
  std::map<int, std::unique_ptr<NeighborTable>> tables_;
  std::shared_ptr<const InvertedIndex> concept_index_;
  BucketHashParams hash_;
  IngestReport report_;
};

// Everything persisted between integration runs.
struct IntegrationState {
  IntegrationParams params;
  std::string kb;  // KB directory the state was built against
  ClusterFamily family;
  std::map<std::string, std::string> anchors;  // attribute -> concept name
  SampleStore values;
  ReviewQueue review;
};

struct IntegrationReport {
  std::size_t attributes_seen = 0;
  std::size_t attributes_new = 0;
  std::size_t ed_merges = 0;
  std::size_t semantic_merges = 0;
  std::size_t gated = 0;
  std::size_t clusters_split = 0;
  std::vector<std::string> normalization_errors;
  std::vector<std::string> kb_absent;
};

// Singletons, self ED join, anchoring, semantic join with full frontiers
// within gamma, resolve.
IntegrationState batch_integrate(std::span<const Schema> schemas, const IntegrationParams& params,
                                 const KnowledgeBase& kb, const Dictionaries& dicts = {},
                                 IntegrationReport* report = nullptr);

// Adds the attributes not yet integrated: ED join against all clusters,
// anchoring, semantic join seeded from the new attributes with degree-capped
// frontiers, then resolve of the touched clusters. Already-integrated
// attributes are skipped, so repeating an insertion changes nothing.
IntegrationReport incremental_integrate(IntegrationState& state, std::span<const Schema> schemas,
                                        const KnowledgeBase& kb, const Dictionaries& dicts = {});

// Re-runs resolve over every cluster with the state's parameters.
ResolveReport resolve_state(IntegrationState& state, const KnowledgeBase& kb);

// Applies review verdicts; rejected pairs are split apart.
ImportReport apply_review_decisions(IntegrationState& state, std::istream& decisions, const KnowledgeBase& kb);

// Anchor key candidates for one attribute, most specific first: the raw name,
// the joined tokens, the tf-idf keyword.
std::vector<std::string> anchor_keys(const TokenizedAttribute& attr);

// Canonical, pretty-printed JSON for the state.
std::string serialize_state(const IntegrationState& state);
IntegrationState parse_state(std::string_view text);  // throws StateCorruption

// Writes <path> and the member q-gram index <path>.qidx.
void save_state(const IntegrationState& state, const std::filesystem::path& path);
IntegrationState load_state(const std::filesystem::path& path);

struct FamilyStats {
  std::size_t clusters = 0;
  std::size_t attributes = 0;
  std::map<std::size_t, std::size_t> size_histogram;
  std::map<std::size_t, std::size_t> frontier_histogram;
  std::size_t overlapping_pairs = 0;  // cluster pairs sharing at least one member
  std::size_t shared_attributes = 0;  // attributes in more than one cluster
};

FamilyStats family_stats(const ClusterFamily& family);

}  // namespace schemint
