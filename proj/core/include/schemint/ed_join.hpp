#pragma once

#include <span>
#include <vector>

#include "schemint/cluster.hpp"
#include "schemint/qgram_index.hpp"

namespace schemint {

struct EdJoinParams {
  int epsilon_t = 1;
  int q = 2;
};

struct EdJoinStats {
  std::size_t candidates = 0;  // survivors of count filtering (incl. fallback)
  std::size_t verified = 0;    // candidates within the edit budget
  std::size_t merges = 0;      // pair joins that changed the family
  std::size_t gated = 0;       // verified matches refused by the merge gate
};

struct JoinedPair {
  AttrRef probe = 0;
  AttrRef target = 0;
  int distance = 0;
};

// Probes every attribute of `probe` against `target` with count filtering and
// keeps the pairs whose true edit distance is within budget. The budget is
// `epsilon_t` unless `target_budget` gives a per-target value (frontier
// entries carry eps_t - d); negative budgets never match.
std::vector<JoinedPair> ed_merge(const InvertedIndex& probe, const InvertedIndex& target, int epsilon_t,
                                 std::span<const int> target_budget = {}, EdJoinStats* stats = nullptr);

// Literal similarity join between the cluster families `r` and `t` (ids of
// live clusters in `family`). Two clusters merge when
//   - a member of one is within eps_t of a member of the other, or
//   - a member of one is within eps_t - d of a frontier entry (c, d) of the other.
// Pass the same ids for both sides to self-join. Merges are applied through
// pair_join as they are found, so chains collapse into connected components.
EdJoinStats ed_join(ClusterFamily& family, std::span<const ClusterId> r, std::span<const ClusterId> t,
                    const EdJoinParams& params, const MergeGate& gate = {});

EdJoinStats ed_self_join(ClusterFamily& family, const EdJoinParams& params, const MergeGate& gate = {});

}  // namespace schemint
