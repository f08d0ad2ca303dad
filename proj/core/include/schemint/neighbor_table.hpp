#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schemint/kb_store.hpp"

namespace schemint {

// H_k: for every concept t, the concepts whose shortest undirected distance
// from t is exactly k. k is a power of two.
//
// On-disk layout (all integers little-endian):
//
//   header   magic "KBNT" | u32 version | u32 k | u32 bucket_length |
//            u64 seed | u64 bucket_count | u64 entry_count
//   dir      bucket_count x { u64 base_offset, u64 byte_size }
//   bucket   at base_offset (4096-aligned, in bucket order):
//              slot table   bucket_length x u64  chain head, relative to base; 0 = empty
//              records      { u64 next | u32 len | name | u32 n | n x (u32 len | name) }
//
// A concept goes to bucket fnv1a64(name) % bucket_count, slot
// bucket_hash(name, 0, seed, bucket_length). Names sharing a slot are
// chained through the record area in name order.
class NeighborTable {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  static NeighborTable build(const KnowledgeGraph& g, int k, BucketHashParams params = {});

  int hop() const { return k_; }
  const BucketHashParams& hash_params() const { return params_; }
  std::size_t concept_count() const { return entries_.size(); }
  std::span<const ConceptId> at(ConceptId id) const { return entries_[id]; }
  std::vector<std::string> lookup(const KnowledgeGraph& g, std::string_view name) const;

  std::string serialize(const KnowledgeGraph& g) const;
  static NeighborTable deserialize(std::string_view bytes, const KnowledgeGraph& g);

  void save(const std::filesystem::path& path, const KnowledgeGraph& g) const;
  static NeighborTable load(const std::filesystem::path& path, const KnowledgeGraph& g);

 private:
  int k_ = 1;
  BucketHashParams params_;
  std::vector<std::vector<ConceptId>> entries_;
};

// Read-only view over a serialized table that answers lookups by walking the
// bucket directory, slot table and chain, without materializing the table.
class NeighborTableImage {
 public:
  explicit NeighborTableImage(std::string bytes);

  int hop() const { return k_; }
  std::uint64_t bucket_count() const { return buckets_.size(); }
  std::uint64_t base_offset(std::uint64_t bucket) const { return buckets_.at(bucket).first; }
  std::optional<std::vector<std::string>> find(std::string_view name) const;

 private:
  std::string bytes_;
  int k_ = 0;
  std::uint32_t bucket_length_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> buckets_;
};

// Set bits of gamma as descending powers of two: 6 -> {4, 2}.
std::vector<int> decompose_threshold(int gamma);

bool is_power_of_two(int k);

// One expansion pass: from an exact ball of radius `from`, hop through each
// table in `tables` and keep candidates of length <= `to`. Every distance
// d in (from, to] is reachable as d = l + k with l in [0, from] for some k
// used in the pass, so the resulting ball is exact up to `to`.
struct HopPass {
  int from = 0;
  int to = 0;
  std::vector<int> tables;
};

// Greedy schedule that covers radius `gamma` with the available tables.
// Throws ParameterError when the tables cannot reach (H_1 missing).
std::vector<HopPass> plan_hops(int gamma, std::span<const int> available);

// Non-owning collection of neighbor tables keyed by k.
class TableSet {
 public:
  TableSet() = default;
  void add(const NeighborTable& t) { tables_[t.hop()] = &t; }
  const NeighborTable* get(int k) const;
  std::vector<int> available() const;
  bool empty() const { return tables_.empty(); }

 private:
  std::map<int, const NeighborTable*> tables_;
};

// All concepts within gamma of t with their minimal distance, t excluded,
// ordered by (distance, id). Requires a table for every power of two that
// appears in the binary decomposition of some d <= gamma; the error names
// the absent ones.
std::vector<std::pair<ConceptId, int>> compose_neighbors(const TableSet& tables, ConceptId t, int gamma);

}  // namespace schemint
