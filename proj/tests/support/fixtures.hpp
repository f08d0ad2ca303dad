#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "schemint/kb_store.hpp"
#include "schemint/pipeline.hpp"

namespace fixture {

inline schemint::KnowledgeGraph graph_of(const oracle::Graph& g) {
  schemint::KnowledgeGraphBuilder b;
  for (const auto& n : g.names) b.add_concept({n, n, "t"});
  for (const auto& [x, y] : g.edges) b.add_edge(g.names[x], g.names[y]);
  return std::move(b).build();
}

inline schemint::IngestResult load_tsv(const std::string& name) {
  std::ifstream in(oracle::data_path(name));
  return schemint::ingest_edges(in);
}

inline schemint::KnowledgeBase kb_from_file(const std::string& name, std::vector<int> ks = {1, 2}) {
  std::ifstream in(oracle::data_path(name));
  return schemint::KnowledgeBase::build(in, ks);
}

inline std::vector<schemint::Schema> schemas_from_file(const std::string& name) {
  std::ifstream in(oracle::data_path(name));
  return schemint::read_schemas(in);
}

inline std::vector<schemint::Schema> schemas_from_text(const std::string& text) {
  std::istringstream in(text);
  return schemint::read_schemas(in);
}

// One schema whose attributes are `names`.
inline schemint::Schema schema_of(const std::string& id, const std::vector<std::string>& names) {
  schemint::Schema s;
  s.id = id;
  s.name = id;
  for (const auto& n : names) s.attributes.push_back({n, {}});
  return s;
}

}  // namespace fixture
