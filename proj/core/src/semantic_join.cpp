#include "schemint/semantic_join.hpp"

#include <algorithm>
#include <set>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"
#include "schemint/text_distance.hpp"

namespace schemint {

StartId PathFrontier::add_start(std::string attribute) {
  starts_.push_back(std::move(attribute));
  return static_cast<StartId>(starts_.size() - 1);
}

PathFrontier::Offer PathFrontier::offer(ConceptId end, StartId start, int len) {
  auto& set = sets_[end];
  auto [it, inserted] = set.try_emplace(start, len);
  if (inserted) {
    ++entries_;
    return Offer::kInserted;
  }
  if (len < it->second) {
    it->second = len;
    return Offer::kImproved;
  }
  return Offer::kKept;
}

std::optional<int> PathFrontier::length(ConceptId end, StartId start) const {
  auto it = sets_.find(end);
  if (it == sets_.end()) return std::nullopt;
  auto jt = it->second.find(start);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

const std::unordered_map<StartId, int>* PathFrontier::paths_to(ConceptId end) const {
  auto it = sets_.find(end);
  return it == sets_.end() ? nullptr : &it->second;
}

std::vector<ConceptId> PathFrontier::ends() const {
  std::vector<ConceptId> out;
  out.reserve(sets_.size());
  for (const auto& [end, set] : sets_) out.push_back(end);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<ConceptId, int> PathFrontier::reach_of(StartId start) const {
  std::map<ConceptId, int> out;
  for (const auto& [end, set] : sets_) {
    auto it = set.find(start);
    if (it != set.end()) out.emplace(end, it->second);
  }
  return out;
}

PathFrontier expand(const PathFrontier& paths, const NeighborTable& table, int gamma) {
  PathFrontier out = paths;
  const int k = table.hop();
  for (ConceptId end : paths.ends()) {
    if (end >= table.concept_count()) throw ParameterError("neighbor table does not cover concept " + std::to_string(end));
    for (const auto& [start, len] : *paths.paths_to(end)) {
      if (len + k > gamma) continue;
      for (ConceptId next : table.at(end)) out.offer(next, start, len + k);
    }
  }
  return out;
}

Anchorer::Anchorer(const KnowledgeGraph& g, int epsilon_t, int q) : graph_(&g), epsilon_t_(epsilon_t) {
  if (epsilon_t < 0) throw ParameterError("eps_t must be >= 0");
  auto index = std::make_shared<InvertedIndex>(q);
  for (ConceptId id = 0; id < g.concept_count(); ++id) index->add(g.name(id));
  index_ = std::move(index);
}

Anchorer::Anchorer(const KnowledgeGraph& g, std::shared_ptr<const InvertedIndex> concept_index, int epsilon_t)
    : graph_(&g), index_(std::move(concept_index)), epsilon_t_(epsilon_t) {
  if (epsilon_t < 0) throw ParameterError("eps_t must be >= 0");
  if (!index_ || index_->size() != g.concept_count()) {
    throw StateCorruption("concept index does not match the knowledge graph");
  }
  for (ConceptId id = 0; id < g.concept_count(); ++id) {
    if (index_->original(id) != g.name(id)) throw StateCorruption("concept index entry " + std::to_string(id) + " mismatched");
  }
}

std::optional<Anchor> Anchorer::anchor(std::string_view name) const {
  const std::u32string folded = fold_case(name);
  const ProbeResult res = index_->probe(folded, epsilon_t_);
  std::optional<Anchor> best;
  for (const Candidate& c : res.candidates) {
    const std::u32string& t = index_->folded(c.ref);
    if (!edit_distance_within(folded, t, epsilon_t_)) continue;
    const int d = static_cast<int>(edit_distance(folded, t));
    if (!best || d < best->distance ||
        (d == best->distance && graph_->name(c.ref) < graph_->name(best->concept_id))) {
      best = Anchor{c.ref, d};
    }
  }
  return best;
}

namespace {

struct FrontierOwner {
  std::string member;
  int distance;
};

}  // namespace

SemanticJoinReport semantic_join(ClusterFamily& family, const KnowledgeGraph& g, const TableSet& tables,
                                 const AnchorMap& anchors, std::span<const std::string> seeds,
                                 const SemanticJoinParams& params, const MergeGate& gate, PathFrontier* paths_out) {
  const int gamma = params.gamma;
  if (gamma < 1) throw ParameterError("gamma must be >= 1, got " + std::to_string(gamma));
  const std::vector<HopPass> plan = plan_hops(gamma, tables.available());
  for (int k : tables.available()) {
    if (tables.get(k)->concept_count() != g.concept_count()) {
      throw ParameterError("neighbor table H_" + std::to_string(k) + " was built for a different graph");
    }
  }

  std::unordered_map<ConceptId, std::vector<std::string>> members_at;
  std::unordered_map<ConceptId, std::vector<FrontierOwner>> frontier_at;
  for (const ClusterSet* c : family.canonical()) {
    for (const auto& m : c->members) {
      auto it = anchors.find(m);
      if (it != anchors.end()) members_at[it->second].push_back(m);
    }
    for (const auto& [concept_name, d] : c->frontier) {
      if (d > gamma) continue;
      if (auto id = g.find(concept_name)) frontier_at[*id].push_back({*c->members.begin(), d});
    }
  }

  SemanticJoinReport report;
  PathFrontier local;
  PathFrontier& paths = paths_out ? *paths_out : local;
  paths = PathFrontier{};
  std::vector<std::vector<std::pair<ConceptId, StartId>>> layers(gamma + 1);

  std::set<std::string> seen;
  for (const auto& s : seeds) {
    if (!seen.insert(s).second) continue;
    auto it = anchors.find(s);
    if (it == anchors.end()) {
      report.skipped.push_back(s);
      continue;
    }
    const StartId sid = paths.add_start(s);
    paths.offer(it->second, sid, 0);
    layers[0].emplace_back(it->second, sid);
  }

  auto try_merge = [&](const MatchCandidate& m, const std::string& right_member) {
    const auto a = family.locate(m.left);
    const auto b = family.locate(right_member);
    if (!a || !b || *a == *b) return;
    if (gate && !gate(m)) {
      ++report.gated;
      return;
    }
    if (family.pair_join(*a, *b).merged) ++report.merges;
  };

  auto check = [&](ConceptId end, StartId sid, int len) {
    const std::string& a = paths.start_name(sid);
    if (auto it = members_at.find(end); it != members_at.end()) {
      for (const auto& u : it->second) {
        if (u != a) try_merge(MatchCandidate{a, u, MatchKind::kSemanticMember, len, 0}, u);
      }
    }
    if (auto it = frontier_at.find(end); it != frontier_at.end()) {
      for (const auto& o : it->second) {
        if (len + o.distance <= gamma) {
          try_merge(MatchCandidate{a, g.name(end), MatchKind::kSemanticFrontier, len, o.distance}, o.member);
        }
      }
    }
  };

  for (const auto& [end, sid] : layers[0]) check(end, sid, 0);

  for (const HopPass& pass : plan) {
    std::vector<std::pair<ConceptId, StartId>> touched;
    for (int k : pass.tables) {
      const NeighborTable& table = *tables.get(k);
      for (int len = std::max(0, pass.from - k + 1); len <= std::min(pass.from, pass.to - k); ++len) {
        for (const auto& [end, sid] : layers[len]) {
          for (ConceptId next : table.at(end)) {
            if (paths.offer(next, sid, len + k) == PathFrontier::Offer::kInserted) touched.emplace_back(next, sid);
          }
        }
      }
    }
    for (const auto& [end, sid] : touched) {
      const int len = *paths.length(end, sid);
      layers[len].emplace_back(end, sid);
      check(end, sid, len);
    }
  }
  report.path_entries = paths.size();

  auto cluster_of = [&](StartId sid) -> ClusterSet* {
    const auto id = family.locate(paths.start_name(sid));
    return id ? family.find_mutable(*id) : nullptr;
  };
  if (params.frontier == FrontierMode::kBall) {
    for (int len = 0; len <= gamma; ++len) {
      for (const auto& [end, sid] : layers[len]) {
        if (ClusterSet* c = cluster_of(sid)) c->offer_frontier(g.name(end), len);
      }
    }
  } else {
    for (const auto& [anchor, sid] : layers[0]) {
      ClusterSet* c = cluster_of(sid);
      if (!c) continue;
      c->offer_frontier(g.name(anchor), 0);
      std::vector<ConceptId> hop(g.neighbors(anchor).begin(), g.neighbors(anchor).end());
      std::sort(hop.begin(), hop.end(), [&](ConceptId x, ConceptId y) {
        if (g.degree(x) != g.degree(y)) return g.degree(x) > g.degree(y);
        return g.name(x) < g.name(y);
      });
      if (hop.size() > params.frontier_cap) hop.resize(params.frontier_cap);
      for (ConceptId n : hop) c->offer_frontier(g.name(n), 1);
    }
  }
  return report;
}

SemanticJoinReport semantic_self_join(ClusterFamily& family, const KnowledgeGraph& g, const TableSet& tables,
                                      const AnchorMap& anchors, const SemanticJoinParams& params,
                                      const MergeGate& gate) {
  std::vector<std::string> seeds;
  for (const ClusterSet* c : family.canonical()) seeds.insert(seeds.end(), c->members.begin(), c->members.end());
  return semantic_join(family, g, tables, anchors, seeds, params, gate);
}

}  // namespace schemint
