#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "schemint/cluster.hpp"
#include "schemint/kb_store.hpp"
#include "schemint/review.hpp"

namespace schemint {

struct ResolveConfig {
  double beta = 1.5;
  int gamma = 3;
  int epsilon_t = 1;

  void validate() const;
  // Largest path length tolerated between two members: floor(beta * gamma).
  int semantic_limit() const;
};

// Pairwise judgement used when splitting clusters.
class DistancePolicy {
 public:
  virtual ~DistancePolicy() = default;

  virtual bool compatible(const std::string& a, const std::string& b) const = 0;
  // Orders incompatible pairs for pivot selection; may be +infinity.
  virtual double distance(const std::string& a, const std::string& b) const = 0;
  // Finite closeness used to pick representatives.
  virtual double proximity(const std::string& a, const std::string& b) const { return distance(a, b); }
};

using AnchorLookup = std::unordered_map<std::string, ConceptId>;
using VetoCheck = std::function<bool(const std::string&, const std::string&)>;

// Two members are compatible unless vetoed, and then if their case-folded edit
// distance is within eps_t or both are anchored within floor(beta*gamma) of
// each other in the knowledge graph.
class CompositeDistance : public DistancePolicy {
 public:
  CompositeDistance(const KnowledgeGraph* graph, const AnchorLookup* anchors, ResolveConfig cfg,
                    VetoCheck vetoed = {});

  bool compatible(const std::string& a, const std::string& b) const override;
  double distance(const std::string& a, const std::string& b) const override;
  double proximity(const std::string& a, const std::string& b) const override;

  int literal(const std::string& a, const std::string& b) const;
  // Path length between the anchors, if both exist and it is within the limit.
  std::optional<int> semantic(const std::string& a, const std::string& b) const;
  bool both_anchored(const std::string& a, const std::string& b) const;

 private:
  const KnowledgeGraph* graph_;
  const AnchorLookup* anchors_;
  ResolveConfig cfg_;
  VetoCheck vetoed_;
  mutable std::unordered_map<ConceptId, std::unordered_map<ConceptId, int>> balls_;
};

// Pivot split: while some pair is incompatible, take the one with the largest
// distance (a, b), form {a} + members compatible with a, {b} + members
// compatible with b, and the remainder, then split each again. Parts that are
// subsets of another part are dropped. Parts come back sorted.
std::vector<std::set<std::string>> split_members(const std::set<std::string>& members, const DistancePolicy& policy);

// Frontier for a part carved out of `original`.
using FrontierRebuild = std::function<std::map<std::string, int>(const std::set<std::string>& part,
                                                                 const ClusterSet& original)>;

struct ResolveReport {
  std::size_t examined = 0;
  std::size_t split = 0;
  std::size_t parts = 0;
};

// Splits every listed cluster that violates the policy. Without `rebuild`
// each part keeps the original frontier.
ResolveReport resolve(ClusterFamily& family, const DistancePolicy& policy, std::span<const ClusterId> ids,
                      const FrontierRebuild& rebuild = {});
ResolveReport resolve_all(ClusterFamily& family, const DistancePolicy& policy, const FrontierRebuild& rebuild = {});

// Member with the smallest summed proximity to the others; ties by name.
std::string representative(const std::set<std::string>& members, const DistancePolicy& policy);

enum class ValueType { kInteger, kDecimal, kDate, kList, kString };
std::string_view to_string(ValueType t);

struct ValueShape {
  std::string prefix;
  std::string core;
  std::string suffix;
  ValueType type = ValueType::kString;
};

// Splits off leading/trailing symbol runs ("$12" -> "$", "12", "") and types
// the remaining core.
ValueShape value_shape(std::string_view sample);
ValueType infer_value_type(std::string_view core);

enum class VerifyOutcome { kPass, kFail, kInapplicable };
enum class VerifyRule { kNone, kType, kAffix };
std::string_view to_string(VerifyRule r);

struct ValueVerdict {
  VerifyOutcome outcome = VerifyOutcome::kInapplicable;
  VerifyRule rule = VerifyRule::kNone;  // the rule that failed, or the last one applied
  std::string detail;
};

// Type rule: dominant types (>= `dominance` of samples) must agree, with
// integer and decimal compatible. Affix rule: when both sides have a dominant
// prefix (or suffix), they must be equal. Inapplicable when a side has no
// samples or no rule has dominant evidence on both sides.
ValueVerdict value_verify(std::span<const std::string> a, std::span<const std::string> b, double dominance = 0.8);

using SampleStore = std::map<std::string, std::vector<std::string>>;

// Merge gate: vetoed pairs are refused, accepted pairs pass, other attribute
// pairs must pass value verification. Failures go to the review queue.
class Verifier {
 public:
  Verifier(const SampleStore& samples, ReviewQueue& queue, const ClusterFamily* family = nullptr);

  bool operator()(const MatchCandidate& m) const;
  MergeGate gate() const;

 private:
  const SampleStore* samples_;
  ReviewQueue* queue_;
  const ClusterFamily* family_;
};

// Filters candidate merges through a Verifier.
std::vector<MatchCandidate> verify(std::span<const MatchCandidate> candidates, const SampleStore& samples,
                                   ReviewQueue& queue);

}  // namespace schemint
