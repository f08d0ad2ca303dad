#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace schemint {

using ClusterId = std::uint64_t;

// A cluster set (U, S_U): integrated attribute names plus the materialized
// frontier of knowledge-base concepts with their minimal distance to U.
struct ClusterSet {
  ClusterId id = 0;
  std::set<std::string> members;
  std::map<std::string, int> frontier;
  // Global-schema name for the cluster; filled in by the pipeline.
  std::string representative;

  // Records `concept` at `distance` unless an equal or shorter entry exists.
  void offer_frontier(const std::string& concept_name, int distance);
};

struct PairJoinResult {
  ClusterId id = 0;
  bool merged = false;  // false when both arguments were the same cluster
};

// Live clusters plus the attribute -> owning cluster registry.
//
// During joins every attribute is owned by exactly one cluster. Resolve may
// place a bridging attribute into several clusters; the registry then keeps
// the first of them as the attribute's primary owner.
class ClusterFamily {
 public:
  ClusterFamily() = default;

  // Registers a singleton {attribute} with an empty frontier. Returns the
  // existing owner when the attribute is already registered.
  ClusterId add_singleton(const std::string& attribute);
  // Registers a complete cluster (used when loading state and by resolve).
  ClusterId add(ClusterSet cluster);

  std::optional<ClusterId> locate(std::string_view attribute) const;
  // Like locate(), but throws NotFound.
  const ClusterSet& owner(std::string_view attribute) const;

  const ClusterSet* find(ClusterId id) const;
  ClusterSet* find_mutable(ClusterId id);
  const ClusterSet& at(ClusterId id) const;
  bool contains(std::string_view attribute) const { return registry_.count(std::string(attribute)) > 0; }

  // Merges two live clusters into a new one: U = U_a + U_b and every frontier
  // concept keeps the smaller of its two distances. Both inputs retire.
  PairJoinResult pair_join(ClusterId a, ClusterId b);

  // Retires `id` and registers `parts` in its place.
  std::vector<ClusterId> replace(ClusterId id, std::vector<ClusterSet> parts);

  std::vector<ClusterId> ids() const;
  std::size_t size() const { return clusters_.size(); }
  std::size_t attribute_count() const { return registry_.size(); }
  bool empty() const { return clusters_.empty(); }

  // Clusters in canonical order: by smallest member, then by member list.
  std::vector<const ClusterSet*> canonical() const;

 private:
  ClusterId next_id_ = 1;
  std::unordered_map<ClusterId, ClusterSet> clusters_;
  std::unordered_map<std::string, ClusterId> registry_;
};

enum class MatchKind {
  kLiteralMember,     // member x member within eps_t
  kLiteralFrontier,   // member x frontier concept within eps_t - d
  kSemanticMember,    // member x member within gamma
  kSemanticFrontier,  // member x frontier concept with len + d <= gamma
};

std::string_view to_string(MatchKind kind);

// A proposed merge produced by one of the joins, before it is applied.
struct MatchCandidate {
  std::string left;   // attribute on the probing side
  std::string right;  // attribute, or concept name for frontier matches
  MatchKind kind = MatchKind::kLiteralMember;
  int distance = 0;   // edit distance or path length to `right`
  int frontier_distance = 0;
};

// Decides whether a candidate merge may be applied. Empty gate = accept all.
using MergeGate = std::function<bool(const MatchCandidate&)>;

}  // namespace schemint
