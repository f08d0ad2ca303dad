#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "schemint/cluster.hpp"
#include "schemint/kb_store.hpp"
#include "schemint/neighbor_table.hpp"
#include "schemint/qgram_index.hpp"

namespace schemint {

using StartId = std::uint32_t;

// Path sets keyed by end concept: for each end, the shortest known length
// from every start attribute that reaches it. A start's own anchor concept
// is recorded at length 0.
class PathFrontier {
 public:
  enum class Offer { kInserted, kImproved, kKept };

  StartId add_start(std::string attribute);
  const std::string& start_name(StartId s) const { return starts_[s]; }
  std::size_t start_count() const { return starts_.size(); }

  Offer offer(ConceptId end, StartId start, int len);
  std::optional<int> length(ConceptId end, StartId start) const;

  // The path set of `end`, or nullptr.
  const std::unordered_map<StartId, int>* paths_to(ConceptId end) const;
  std::vector<ConceptId> ends() const;
  std::size_t size() const { return entries_; }
  bool empty() const { return entries_ == 0; }

  // End concept -> length for one start, including the length-0 anchor.
  std::map<ConceptId, int> reach_of(StartId start) const;

 private:
  std::vector<std::string> starts_;
  std::unordered_map<ConceptId, std::unordered_map<StartId, int>> sets_;
  std::size_t entries_ = 0;
};

// One hop through `table` for every path; lengths above gamma are dropped and
// each (start, end) keeps its minimum.
PathFrontier expand(const PathFrontier& paths, const NeighborTable& table, int gamma);

struct Anchor {
  ConceptId concept_id = 0;
  int distance = 0;
};

// Maps attribute names to the literally nearest concept within eps_t
// (case-folded edit distance, ties by concept name).
class Anchorer {
 public:
  Anchorer(const KnowledgeGraph& g, int epsilon_t, int q = 2);
  // Shares a prebuilt index over the concept names in id order.
  Anchorer(const KnowledgeGraph& g, std::shared_ptr<const InvertedIndex> concept_index, int epsilon_t);

  std::optional<Anchor> anchor(std::string_view name) const;
  const InvertedIndex& index() const { return *index_; }

 private:
  const KnowledgeGraph* graph_;
  std::shared_ptr<const InvertedIndex> index_;
  int epsilon_t_;
};

using AnchorMap = std::unordered_map<std::string, ConceptId>;

enum class FrontierMode {
  kBall,            // every concept found within gamma
  kCappedOneHop,    // anchor plus the highest-degree 1-hop neighbors
};

struct SemanticJoinParams {
  int gamma = 3;
  FrontierMode frontier = FrontierMode::kBall;
  std::size_t frontier_cap = 64;
};

struct SemanticJoinReport {
  std::size_t merges = 0;
  std::size_t gated = 0;
  std::size_t path_entries = 0;
  std::vector<std::string> skipped;  // seeds without an anchor
};

// Expands paths from the anchors of `seeds` and merges a seed's cluster with
//   - the cluster of any anchored member whose anchor it reaches within gamma,
//   - the cluster owning a frontier entry (r, d) it reaches at len with len + d <= gamma.
// Frontier entries of existing clusters are read from `family`, so seeding
// only new attributes still finds matches against integrated clusters. The
// discovered concepts are then written to the seed clusters' frontiers.
SemanticJoinReport semantic_join(ClusterFamily& family, const KnowledgeGraph& g, const TableSet& tables,
                                 const AnchorMap& anchors, std::span<const std::string> seeds,
                                 const SemanticJoinParams& params, const MergeGate& gate = {},
                                 PathFrontier* paths_out = nullptr);

// Seeds every registered attribute.
SemanticJoinReport semantic_self_join(ClusterFamily& family, const KnowledgeGraph& g, const TableSet& tables,
                                      const AnchorMap& anchors, const SemanticJoinParams& params,
                                      const MergeGate& gate = {});

}  // namespace schemint
