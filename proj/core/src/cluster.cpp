#include "schemint/cluster.hpp"

#include <algorithm>

#include "schemint/errors.hpp"

namespace schemint {

void ClusterSet::offer_frontier(const std::string& concept_name, int distance) {
  auto [it, inserted] = frontier.try_emplace(concept_name, distance);
  if (!inserted && distance < it->second) it->second = distance;
}

ClusterId ClusterFamily::add_singleton(const std::string& attribute) {
  if (auto existing = locate(attribute)) return *existing;
  ClusterSet c;
  c.members.insert(attribute);
  return add(std::move(c));
}

ClusterId ClusterFamily::add(ClusterSet cluster) {
  if (cluster.members.empty()) throw ParameterError("cluster must have at least one member");
  const ClusterId id = next_id_++;
  cluster.id = id;
  for (const auto& m : cluster.members) registry_.try_emplace(m, id);
  clusters_.emplace(id, std::move(cluster));
  return id;
}

std::optional<ClusterId> ClusterFamily::locate(std::string_view attribute) const {
  auto it = registry_.find(std::string(attribute));
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

const ClusterSet& ClusterFamily::owner(std::string_view attribute) const {
  auto id = locate(attribute);
  if (!id) throw NotFound("attribute not registered: " + std::string(attribute));
  return at(*id);
}

const ClusterSet* ClusterFamily::find(ClusterId id) const {
  auto it = clusters_.find(id);
  return it == clusters_.end() ? nullptr : &it->second;
}

ClusterSet* ClusterFamily::find_mutable(ClusterId id) {
  auto it = clusters_.find(id);
  return it == clusters_.end() ? nullptr : &it->second;
}

const ClusterSet& ClusterFamily::at(ClusterId id) const {
  const ClusterSet* c = find(id);
  if (!c) throw NotFound("no live cluster with id " + std::to_string(id));
  return *c;
}

PairJoinResult ClusterFamily::pair_join(ClusterId a, ClusterId b) {
  if (a == b) return PairJoinResult{a, false};
  auto ia = clusters_.find(a);
  auto ib = clusters_.find(b);
  if (ia == clusters_.end() || ib == clusters_.end()) throw NotFound("pair_join on a retired cluster");

  // Reuse the larger side's storage.
  if (ia->second.members.size() + ia->second.frontier.size() < ib->second.members.size() + ib->second.frontier.size()) {
    std::swap(ia, ib);
  }
  ClusterSet merged = std::move(ia->second);
  ClusterSet& other = ib->second;
  merged.members.merge(other.members);
  for (const auto& [concept_name, d] : other.frontier) merged.offer_frontier(concept_name, d);
  merged.representative.clear();

  const ClusterId old_a = ia->first;
  const ClusterId old_b = ib->first;
  clusters_.erase(old_a);
  clusters_.erase(old_b);

  const ClusterId id = next_id_++;
  merged.id = id;
  for (const auto& m : merged.members) {
    auto it = registry_.find(m);
    if (it != registry_.end() && (it->second == old_a || it->second == old_b)) it->second = id;
  }
  clusters_.emplace(id, std::move(merged));
  return PairJoinResult{id, true};
}

std::vector<ClusterId> ClusterFamily::replace(ClusterId id, std::vector<ClusterSet> parts) {
  auto it = clusters_.find(id);
  if (it == clusters_.end()) throw NotFound("replace on a retired cluster");
  const std::set<std::string> old_members = std::move(it->second.members);
  clusters_.erase(it);

  std::vector<ClusterId> ids;
  for (auto& part : parts) {
    if (part.members.empty()) continue;
    const ClusterId nid = next_id_++;
    part.id = nid;
    ids.push_back(nid);
    clusters_.emplace(nid, std::move(part));
  }
  for (const auto& m : old_members) {
    auto reg = registry_.find(m);
    if (reg == registry_.end() || reg->second != id) continue;
    auto owner_it = std::find_if(ids.begin(), ids.end(), [&](ClusterId c) { return clusters_.at(c).members.count(m) > 0; });
    if (owner_it != ids.end()) {
      reg->second = *owner_it;
    } else {
      registry_.erase(reg);
    }
  }
  return ids;
}

std::vector<ClusterId> ClusterFamily::ids() const {
  std::vector<ClusterId> out;
  out.reserve(clusters_.size());
  for (const auto& [id, c] : clusters_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<const ClusterSet*> ClusterFamily::canonical() const {
  std::vector<const ClusterSet*> out;
  out.reserve(clusters_.size());
  for (const auto& [id, c] : clusters_) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](const ClusterSet* a, const ClusterSet* b) {
    if (a->members != b->members) return a->members < b->members;
    return a->frontier < b->frontier;
  });
  return out;
}

std::string_view to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::kLiteralMember:
      return "literal-member";
    case MatchKind::kLiteralFrontier:
      return "literal-frontier";
    case MatchKind::kSemanticMember:
      return "semantic-member";
    case MatchKind::kSemanticFrontier:
      return "semantic-frontier";
  }
  return "unknown";
}

}  // namespace schemint
