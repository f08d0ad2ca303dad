#include "schemint/ed_join.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "schemint/errors.hpp"
#include "schemint/text_distance.hpp"

namespace schemint {

namespace {

// One side of the join: the member index X and the frontier index Z.
struct Side {
  InvertedIndex members;
  InvertedIndex frontier;
  // Per frontier ref: (an attribute of the owning cluster, d), sorted.
  std::vector<std::vector<std::pair<std::string, int>>> frontier_owners;
  std::vector<int> frontier_budget;

  explicit Side(int q) : members(q), frontier(q) {}
};

Side index_side(const ClusterFamily& family, std::span<const ClusterId> ids, int epsilon_t, int q) {
  std::set<std::string> members;
  std::map<std::string, std::vector<std::pair<std::string, int>>> frontier;
  for (ClusterId id : ids) {
    const ClusterSet* c = family.find(id);
    if (!c) continue;
    members.insert(c->members.begin(), c->members.end());
    const std::string& anchor_member = *c->members.begin();
    for (const auto& [concept_name, d] : c->frontier) {
      if (d <= epsilon_t) frontier[concept_name].emplace_back(anchor_member, d);
    }
  }
  Side side(q);
  for (const auto& m : members) side.members.add(m);
  for (auto& [concept_name, owners] : frontier) {
    std::sort(owners.begin(), owners.end());
    side.frontier.add(concept_name);
    int min_d = owners.front().second;
    for (const auto& o : owners) min_d = std::min(min_d, o.second);
    side.frontier_budget.push_back(epsilon_t - min_d);
    side.frontier_owners.push_back(std::move(owners));
  }
  return side;
}

class Merger {
 public:
  Merger(ClusterFamily& family, const MergeGate& gate, EdJoinStats& stats)
      : family_(family), gate_(gate), stats_(stats) {}

  void merge(const MatchCandidate& m, const std::string& right_member) {
    const auto a = family_.locate(m.left);
    const auto b = family_.locate(right_member);
    if (!a || !b || *a == *b) return;
    if (gate_ && !gate_(m)) {
      ++stats_.gated;
      return;
    }
    if (family_.pair_join(*a, *b).merged) ++stats_.merges;
  }

 private:
  ClusterFamily& family_;
  const MergeGate& gate_;
  EdJoinStats& stats_;
};

// Members of `probe` against frontier entries of `target`.
void join_member_frontier(const Side& probe, const Side& target, int epsilon_t, Merger& merger, EdJoinStats& stats) {
  if (target.frontier.size() == 0) return;
  for (const JoinedPair& p : ed_merge(probe.members, target.frontier, epsilon_t, target.frontier_budget, &stats)) {
    for (const auto& [owner, d] : target.frontier_owners[p.target]) {
      if (p.distance > epsilon_t - d) continue;
      MatchCandidate m{probe.members.original(p.probe), target.frontier.original(p.target), MatchKind::kLiteralFrontier,
                       p.distance, d};
      merger.merge(m, owner);
    }
  }
}

}  // namespace

std::vector<JoinedPair> ed_merge(const InvertedIndex& probe, const InvertedIndex& target, int epsilon_t,
                                 std::span<const int> target_budget, EdJoinStats* stats) {
  if (epsilon_t < 0) throw ParameterError("eps_t must be >= 0");
  if (probe.q() != target.q()) throw ParameterError("ed_merge: indexes built with different q");
  std::vector<JoinedPair> out;
  if (target.size() == 0) return out;
  int max_budget = epsilon_t;
  if (!target_budget.empty()) {
    max_budget = *std::max_element(target_budget.begin(), target_budget.end());
    max_budget = std::min(max_budget, epsilon_t);
  }
  if (max_budget < 0) return out;

  for (AttrRef pr = 0; pr < probe.size(); ++pr) {
    const std::u32string& s = probe.folded(pr);
    const ProbeResult res = target.probe(s, max_budget);
    if (stats) stats->candidates += res.candidates.size();
    for (const Candidate& c : res.candidates) {
      const int budget = target_budget.empty() ? epsilon_t : std::min(epsilon_t, target_budget[c.ref]);
      if (budget < 0) continue;
      const std::u32string& t = target.folded(c.ref);
      if (!edit_distance_within(s, t, budget)) continue;
      if (stats) ++stats->verified;
      out.push_back(JoinedPair{pr, c.ref, static_cast<int>(edit_distance(s, t))});
    }
  }
  return out;
}

EdJoinStats ed_join(ClusterFamily& family, std::span<const ClusterId> r, std::span<const ClusterId> t,
                    const EdJoinParams& params, const MergeGate& gate) {
  if (params.epsilon_t < 0) throw ParameterError("eps_t must be >= 0");
  EdJoinStats stats;
  if (r.empty() || t.empty()) return stats;

  std::vector<ClusterId> rs(r.begin(), r.end());
  std::vector<ClusterId> ts(t.begin(), t.end());
  std::sort(rs.begin(), rs.end());
  std::sort(ts.begin(), ts.end());
  const bool self = rs == ts;

  const Side side_r = index_side(family, rs, params.epsilon_t, params.q);
  const Side side_t = self ? Side(params.q) : index_side(family, ts, params.epsilon_t, params.q);
  const Side& other = self ? side_r : side_t;

  Merger merger(family, gate, stats);

  // X_R with X_T
  for (const JoinedPair& p : ed_merge(side_r.members, other.members, params.epsilon_t, {}, &stats)) {
    const std::string& left = side_r.members.original(p.probe);
    const std::string& right = other.members.original(p.target);
    if (left == right) continue;
    merger.merge(MatchCandidate{left, right, MatchKind::kLiteralMember, p.distance, 0}, right);
  }
  // X_R with Z_T, then X_T with Z_R
  join_member_frontier(side_r, other, params.epsilon_t, merger, stats);
  if (!self) join_member_frontier(side_t, side_r, params.epsilon_t, merger, stats);
  return stats;
}

EdJoinStats ed_self_join(ClusterFamily& family, const EdJoinParams& params, const MergeGate& gate) {
  const auto ids = family.ids();
  return ed_join(family, ids, ids, params, gate);
}

}  // namespace schemint
