#include "schemint/kb_store.hpp"

#include <algorithm>
#include <deque>
#include <istream>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

std::optional<ConceptId> KnowledgeGraph::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

ConceptId KnowledgeGraphBuilder::add_concept(const Concept& c) {
  auto& g = graph_;
  auto [it, inserted] = g.by_name_.try_emplace(c.name, static_cast<ConceptId>(g.concepts_.size()));
  if (inserted) {
    g.concepts_.push_back(c);
    g.adjacency_.emplace_back();
  }
  return it->second;
}

KnowledgeGraphBuilder::EdgeOutcome KnowledgeGraphBuilder::add_edge(const Concept& sub, const Concept& sup) {
  if (sub.name == sup.name) return EdgeOutcome::kSelfLoop;
  const ConceptId a = add_concept(sub);
  const ConceptId b = add_concept(sup);
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  if (!seen_.emplace(key, true).second) return EdgeOutcome::kDuplicate;
  graph_.edges_.emplace_back(a, b);
  graph_.adjacency_[a].push_back(b);
  graph_.adjacency_[b].push_back(a);
  return EdgeOutcome::kAdded;
}

KnowledgeGraphBuilder::EdgeOutcome KnowledgeGraphBuilder::add_edge(std::string_view sub, std::string_view sup) {
  return add_edge(Concept{"", std::string(sub), ""}, Concept{"", std::string(sup), ""});
}

KnowledgeGraph KnowledgeGraphBuilder::build() && {
  for (auto& adj : graph_.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  seen_.clear();
  return std::move(graph_);
}

IngestResult ingest_edges(std::istream& in) {
  KnowledgeGraphBuilder builder;
  IngestReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!is_valid_utf8(line)) {
      report.rejects.push_back({line_no, "invalid UTF-8"});
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 6) {
      report.rejects.push_back({line_no, "expected 6 tab-separated fields, got " + std::to_string(fields.size())});
      continue;
    }
    Concept sub{fields[0], std::string(trim(fields[1])), fields[2]};
    Concept sup{fields[3], std::string(trim(fields[4])), fields[5]};
    if (sub.name.empty() || sup.name.empty()) {
      report.rejects.push_back({line_no, "empty concept name"});
      continue;
    }
    switch (builder.add_edge(sub, sup)) {
      case KnowledgeGraphBuilder::EdgeOutcome::kAdded:
        ++report.kept;
        break;
      case KnowledgeGraphBuilder::EdgeOutcome::kDuplicate:
        ++report.duplicates;
        break;
      case KnowledgeGraphBuilder::EdgeOutcome::kSelfLoop:
        ++report.self_loops;
        break;
    }
  }
  return IngestResult{std::move(builder).build(), std::move(report)};
}

std::vector<std::pair<ConceptId, int>> bfs_ball(const KnowledgeGraph& g, ConceptId source, int radius) {
  std::vector<std::pair<ConceptId, int>> out;
  std::unordered_map<ConceptId, int> dist;
  std::deque<ConceptId> queue;
  dist.emplace(source, 0);
  queue.push_back(source);
  while (!queue.empty()) {
    const ConceptId u = queue.front();
    queue.pop_front();
    const int du = dist[u];
    out.emplace_back(u, du);
    if (du == radius) continue;
    for (ConceptId v : g.neighbors(u)) {
      if (dist.emplace(v, du + 1).second) queue.push_back(v);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return out;
}

std::uint64_t bucket_hash(std::string_view name, std::uint64_t base_offset, std::uint64_t seed,
                          std::uint64_t bucket_length) {
  if (bucket_length == 0) throw ParameterError("bucket_length must be > 0");
  if (name.empty()) throw ParameterError("bucket_hash needs a non-empty name");
  // Reducing after every step gives the same residue as the unbounded fold.
  using u128 = unsigned __int128;
  const u128 m = bucket_length;
  const u128 s = seed % bucket_length;
  u128 k = 0;
  for (unsigned char c : name) k = (k * s + c) % m;
  return base_offset + static_cast<std::uint64_t>(k);
}

}  // namespace schemint
