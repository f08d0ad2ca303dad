#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace schemint {

using ConceptId = std::uint32_t;

struct Concept {
  std::string id;
  std::string name;
  std::string type_tag;
};

// Directed "is a" link: `sub` is a `sup`.
struct Edge {
  std::string sub;
  std::string sup;
};

// Immutable knowledge graph. Concepts are keyed by name; adjacency is the
// undirected view of the "is a" edges, sorted and duplicate-free.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  std::size_t concept_count() const { return concepts_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<ConceptId> find(std::string_view name) const;
  const Concept& concept_at(ConceptId id) const { return concepts_[id]; }
  const std::string& name(ConceptId id) const { return concepts_[id].name; }
  std::span<const ConceptId> neighbors(ConceptId id) const { return adjacency_[id]; }
  std::size_t degree(ConceptId id) const { return adjacency_[id].size(); }

  // Edges in ingest order, as (sub, sup) concept ids.
  std::span<const std::pair<ConceptId, ConceptId>> edges() const { return edges_; }

 private:
  friend class KnowledgeGraphBuilder;

  std::vector<Concept> concepts_;
  std::unordered_map<std::string, ConceptId> by_name_;
  std::vector<std::vector<ConceptId>> adjacency_;
  std::vector<std::pair<ConceptId, ConceptId>> edges_;
};

class KnowledgeGraphBuilder {
 public:
  enum class EdgeOutcome { kAdded, kDuplicate, kSelfLoop };

  ConceptId add_concept(const Concept& c);
  EdgeOutcome add_edge(const Concept& sub, const Concept& sup);
  EdgeOutcome add_edge(std::string_view sub, std::string_view sup);

  KnowledgeGraph build() &&;

 private:
  KnowledgeGraph graph_;
  std::unordered_map<std::uint64_t, bool> seen_;
};

struct IngestReject {
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t kept = 0;
  std::size_t duplicates = 0;
  std::size_t self_loops = 0;
  std::vector<IngestReject> rejects;

  std::size_t dropped() const { return duplicates + self_loops + rejects.size(); }
};

struct IngestResult {
  KnowledgeGraph graph;
  IngestReport report;
};

// Reads six tab-separated fields per line:
//   subId  subName  subType  superId  superName  superType
// Malformed lines go to the reject log; blank lines are ignored.
IngestResult ingest_edges(std::istream& in);

// Concepts within `radius` hops of `source` with their shortest distance,
// ordered by (distance, id). Includes the source at distance 0.
std::vector<std::pair<ConceptId, int>> bfs_ball(const KnowledgeGraph& g, ConceptId source, int radius);

struct BucketHashParams {
  std::uint64_t seed = 13;
  std::uint64_t bucket_length = 10000;
};

// Offset of `name` inside a bucket that starts at `base_offset`:
//   base_offset + (fold(name) mod bucket_length), fold: k <- k*seed + byte
// The fold is taken over the UTF-8 bytes verbatim and is reduced exactly,
// as if computed with arbitrary precision.
std::uint64_t bucket_hash(std::string_view name, std::uint64_t base_offset, std::uint64_t seed,
                          std::uint64_t bucket_length);

}  // namespace schemint
