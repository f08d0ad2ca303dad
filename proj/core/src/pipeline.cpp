#include "schemint/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schemint/ed_join.hpp"
#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

using nlohmann::json;

void IntegrationParams::validate() const {
  if (epsilon_t < 0) throw ParameterError("epsilon-t must be >= 0");
  if (gamma < 1) throw ParameterError("gamma must be >= 1");
  if (!(beta > 1.0)) throw ParameterError("beta must be > 1");
  if (q < 1) throw ParameterError("q must be >= 1");
}

namespace {

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + p.string());
}

}  // namespace

std::vector<Schema> read_schemas(std::istream& in) {
  std::vector<Schema> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    const std::string where = "schema line " + std::to_string(no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + e.what());
    }
    if (!j.is_object()) throw DataError(where + "expected an object");
    Schema s;
    if (!j.contains("id") || !(j["id"].is_string() || j["id"].is_number_integer())) {
      throw DataError(where + "missing id");
    }
    s.id = value_text(j["id"]);
    if (j.contains("name") && j["name"].is_string()) s.name = j["name"].get<std::string>();
    if (!j.contains("attributes") || !j["attributes"].is_array()) throw DataError(where + "missing attributes array");
    for (const auto& a : j["attributes"]) {
      SchemaAttribute attr;
      if (a.is_string()) {
        attr.name = a.get<std::string>();
      } else if (a.is_object() && a.contains("name") && a["name"].is_string()) {
        attr.name = a["name"].get<std::string>();
        if (a.contains("values")) {
          if (!a["values"].is_array()) throw DataError(where + "values must be an array");
          for (const auto& v : a["values"]) attr.values.push_back(value_text(v));
        }
      } else {
        throw DataError(where + "attribute must be a name or {\"name\", \"values\"}");
      }
      if (!is_valid_utf8(attr.name)) throw DataError(where + "attribute name is not UTF-8");
      s.attributes.push_back(std::move(attr));
    }
    if (!ids.insert(s.id).second) throw DataError(where + "duplicate schema id '" + s.id + "'");
    out.push_back(std::move(s));
  }
  return out;
}

KnowledgeBase KnowledgeBase::build(std::istream& edges, std::span<const int> ks, BucketHashParams hash, int q) {
  IngestResult r = ingest_edges(edges);
  KnowledgeBase kb = from_graph(std::move(r.graph), ks, hash, q);
  kb.report_ = std::move(r.report);
  return kb;
}

KnowledgeBase KnowledgeBase::from_graph(KnowledgeGraph graph, std::span<const int> ks, BucketHashParams hash, int q) {
  KnowledgeBase kb;
  kb.graph_ = std::make_unique<KnowledgeGraph>(std::move(graph));
  kb.hash_ = hash;
  for (int k : ks) {
    if (kb.tables_.count(k)) continue;
    kb.tables_.emplace(k, std::make_unique<NeighborTable>(NeighborTable::build(*kb.graph_, k, hash)));
  }
  auto index = std::make_shared<InvertedIndex>(q);
  for (ConceptId id = 0; id < kb.graph_->concept_count(); ++id) index->add(kb.graph_->name(id));
  kb.concept_index_ = std::move(index);
  kb.report_.kept = kb.graph_->edge_count();
  return kb;
}

TableSet KnowledgeBase::tables() const {
  TableSet set;
  for (const auto& [k, t] : tables_) set.add(*t);
  return set;
}

const NeighborTable* KnowledgeBase::table(int k) const {
  auto it = tables_.find(k);
  return it == tables_.end() ? nullptr : it->second.get();
}

std::vector<int> KnowledgeBase::table_hops() const {
  std::vector<int> out;
  for (const auto& [k, t] : tables_) out.push_back(k);
  return out;
}

void KnowledgeBase::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::string tsv;
  for (const auto& [sub, sup] : graph_->edges()) {
    const Concept& a = graph_->concept_at(sub);
    const Concept& b = graph_->concept_at(sup);
    tsv += a.id + '\t' + a.name + '\t' + a.type_tag + '\t' + b.id + '\t' + b.name + '\t' + b.type_tag + '\n';
  }
  write_file(dir / "edges.tsv", tsv);
  for (const auto& [k, t] : tables_) t->save(dir / ("H" + std::to_string(k) + ".tbl"), *graph_);
  write_file(dir / "concepts.qidx", concept_index_->serialize());

  nlohmann::ordered_json m;
  m["format"] = "schemint-kb";
  m["version"] = 1;
  m["concepts"] = graph_->concept_count();
  m["edges"] = graph_->edge_count();
  m["tables"] = table_hops();
  m["seed"] = hash_.seed;
  m["bucket_length"] = hash_.bucket_length;
  m["q"] = concept_index_->q();
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw NotFound("knowledge base directory not found: " + dir.string());
  json m;
  try {
    m = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw StateCorruption("manifest.json: " + std::string(e.what()));
  }
  KnowledgeBase kb;
  std::size_t concepts = 0, edges = 0;
  std::vector<int> ks;
  try {
    if (m.at("format") != "schemint-kb" || m.at("version") != 1) throw StateCorruption("manifest.json: unknown format");
    concepts = m.at("concepts").get<std::size_t>();
    edges = m.at("edges").get<std::size_t>();
    ks = m.at("tables").get<std::vector<int>>();
    kb.hash_.seed = m.at("seed").get<std::uint64_t>();
    kb.hash_.bucket_length = m.at("bucket_length").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw StateCorruption("manifest.json: " + std::string(e.what()));
  }

  std::istringstream tsv(read_file(dir / "edges.tsv"));
  IngestResult r = ingest_edges(tsv);
  if (r.graph.concept_count() != concepts || r.graph.edge_count() != edges || !r.report.rejects.empty()) {
    throw StateCorruption("edges.tsv does not match manifest.json");
  }
  kb.graph_ = std::make_unique<KnowledgeGraph>(std::move(r.graph));
  kb.report_ = std::move(r.report);
  for (int k : ks) {
    auto t = std::make_unique<NeighborTable>(NeighborTable::load(dir / ("H" + std::to_string(k) + ".tbl"), *kb.graph_));
    if (t->hop() != k || t->hash_params().seed != kb.hash_.seed ||
        t->hash_params().bucket_length != kb.hash_.bucket_length) {
      throw StateCorruption("H" + std::to_string(k) + ".tbl does not match manifest.json");
    }
    kb.tables_.emplace(k, std::move(t));
  }
  auto index = std::make_shared<InvertedIndex>(InvertedIndex::deserialize(read_file(dir / "concepts.qidx")));
  if (index->size() != kb.graph_->concept_count()) throw StateCorruption("concepts.qidx does not match the graph");
  for (ConceptId id = 0; id < kb.graph_->concept_count(); ++id) {
    if (index->original(id) != kb.graph_->name(id)) throw StateCorruption("concepts.qidx does not match the graph");
  }
  kb.concept_index_ = std::move(index);
  return kb;
}

std::vector<std::string> anchor_keys(const TokenizedAttribute& attr) {
  std::vector<std::string> keys;
  auto push = [&](std::string k) {
    if (!trim(k).empty() && std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(std::move(k));
  };
  push(ascii_lower(attr.raw));
  std::string joined;
  for (const auto& t : attr.tokens) {
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  push(joined);
  push(attr.keyword);
  return keys;
}

namespace {

struct Collected {
  std::vector<std::string> names;  // first-seen order, distinct
  SampleStore values;
};

Collected collect(std::span<const Schema> schemas, IntegrationReport& rep) {
  Collected c;
  std::set<std::string> seen;
  for (const Schema& s : schemas) {
    for (const auto& a : s.attributes) {
      if (trim(a.name).empty()) {
        rep.normalization_errors.push_back(s.id + ": empty attribute name");
        continue;
      }
      ++rep.attributes_seen;
      if (seen.insert(a.name).second) c.names.push_back(a.name);
      auto& vals = c.values[a.name];
      for (const auto& v : a.values) {
        if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
      }
    }
  }
  for (auto it = c.values.begin(); it != c.values.end();) {
    it = it->second.empty() ? c.values.erase(it) : std::next(it);
  }
  return c;
}

void merge_values(SampleStore& into, const SampleStore& from) {
  for (const auto& [name, vals] : from) {
    auto& dst = into[name];
    for (const auto& v : vals) {
      if (std::find(dst.begin(), dst.end(), v) == dst.end()) dst.push_back(v);
    }
  }
}

void anchor_new(IntegrationState& st, std::span<const std::string> names, const KnowledgeBase& kb,
                const Dictionaries& dicts, IntegrationReport& rep) {
  const Anchorer anchorer = kb.anchorer(st.params.epsilon_t);
  std::vector<TokenizedAttribute> toks;
  KeywordCorpus corpus;
  for (const auto& n : names) {
    try {
      toks.push_back(normalize_attribute(n, dicts));
      corpus.add(toks.back().tokens);
    } catch (const ParameterError& e) {
      rep.normalization_errors.push_back(n + ": " + e.what());
    }
  }
  for (auto& t : toks) {
    t.keyword = select_keyword(t.tokens, corpus);
    bool found = false;
    for (const auto& key : anchor_keys(t)) {
      if (auto a = anchorer.anchor(key)) {
        st.anchors[t.raw] = kb.graph().name(a->concept_id);
        found = true;
        break;
      }
    }
    if (!found) rep.kb_absent.push_back(t.raw);
  }
}

AnchorMap anchor_map(const IntegrationState& st, const KnowledgeGraph& g) {
  AnchorMap out;
  for (const auto& [attr, concept_name] : st.anchors) {
    auto id = g.find(concept_name);
    if (!id) throw StateCorruption("anchor concept '" + concept_name + "' is not in the knowledge base");
    out.emplace(attr, *id);
  }
  return out;
}

FrontierRebuild make_rebuild(const KnowledgeGraph& g, const AnchorMap& anchors, int gamma) {
  return [&g, &anchors, gamma](const std::set<std::string>& part, const ClusterSet& original) {
    std::unordered_map<ConceptId, int> best;
    std::set<ConceptId> done;
    for (const auto& m : part) {
      auto it = anchors.find(m);
      if (it == anchors.end() || !done.insert(it->second).second) continue;
      for (const auto& [c, d] : bfs_ball(g, it->second, gamma)) {
        auto [bt, inserted] = best.try_emplace(c, d);
        if (!inserted && d < bt->second) bt->second = d;
      }
    }
    std::map<std::string, int> out;
    for (const auto& [name, d] : original.frontier) {
      auto id = g.find(name);
      if (!id) continue;
      auto it = best.find(*id);
      if (it != best.end()) out.emplace(name, it->second);
    }
    return out;
  };
}

void set_representatives(ClusterFamily& family, const DistancePolicy& policy) {
  for (ClusterId id : family.ids()) {
    ClusterSet* c = family.find_mutable(id);
    c->representative = representative(c->members, policy);
  }
}

CompositeDistance make_policy(const IntegrationState& st, const KnowledgeBase& kb, const AnchorMap& am) {
  const ReviewQueue* review = &st.review;
  return CompositeDistance(&kb.graph(), &am, st.params.resolve_config(),
                           [review](const std::string& a, const std::string& b) { return review->is_vetoed(a, b); });
}

}  // namespace

IntegrationState batch_integrate(std::span<const Schema> schemas, const IntegrationParams& params,
                                 const KnowledgeBase& kb, const Dictionaries& dicts, IntegrationReport* report) {
  params.validate();
  IntegrationReport local;
  IntegrationReport& rep = report ? *report : local;
  IntegrationState st;
  st.params = params;

  Collected c = collect(schemas, rep);
  st.values = std::move(c.values);
  std::vector<std::string> names = c.names;
  std::sort(names.begin(), names.end());
  rep.attributes_new = names.size();
  for (const auto& n : names) st.family.add_singleton(n);

  const Verifier verifier(st.values, st.review, &st.family);
  const MergeGate gate = verifier.gate();

  const EdJoinStats ed = ed_self_join(st.family, EdJoinParams{params.epsilon_t, params.q}, gate);
  rep.ed_merges = ed.merges;
  rep.gated += ed.gated;

  anchor_new(st, names, kb, dicts, rep);
  const AnchorMap am = anchor_map(st, kb.graph());
  const SemanticJoinParams sp{params.gamma, FrontierMode::kBall, params.frontier_cap};
  const SemanticJoinReport sem = semantic_self_join(st.family, kb.graph(), kb.tables(), am, sp, gate);
  rep.semantic_merges = sem.merges;
  rep.gated += sem.gated;

  const CompositeDistance policy = make_policy(st, kb, am);
  rep.clusters_split = resolve_all(st.family, policy, make_rebuild(kb.graph(), am, params.gamma)).split;
  set_representatives(st.family, policy);
  return st;
}

IntegrationReport incremental_integrate(IntegrationState& st, std::span<const Schema> schemas,
                                        const KnowledgeBase& kb, const Dictionaries& dicts) {
  st.params.validate();
  IntegrationReport rep;
  Collected c = collect(schemas, rep);
  merge_values(st.values, c.values);

  std::vector<std::string> fresh;
  for (const auto& n : c.names) {
    if (!st.family.contains(n)) fresh.push_back(n);
  }
  std::sort(fresh.begin(), fresh.end());
  rep.attributes_new = fresh.size();
  if (fresh.empty()) return rep;

  std::vector<ClusterId> r;
  for (const auto& n : fresh) r.push_back(st.family.add_singleton(n));
  const std::vector<ClusterId> t = st.family.ids();

  const Verifier verifier(st.values, st.review, &st.family);
  const MergeGate gate = verifier.gate();
  const EdJoinStats ed = ed_join(st.family, r, t, EdJoinParams{st.params.epsilon_t, st.params.q}, gate);
  rep.ed_merges = ed.merges;
  rep.gated += ed.gated;

  anchor_new(st, fresh, kb, dicts, rep);
  const AnchorMap am = anchor_map(st, kb.graph());
  const SemanticJoinParams sp{st.params.gamma, FrontierMode::kCappedOneHop, st.params.frontier_cap};
  const SemanticJoinReport sem = semantic_join(st.family, kb.graph(), kb.tables(), am, fresh, sp, gate);
  rep.semantic_merges = sem.merges;
  rep.gated += sem.gated;

  std::set<ClusterId> dirty;
  for (const auto& n : fresh) {
    if (auto id = st.family.locate(n)) dirty.insert(*id);
  }
  const std::vector<ClusterId> dirty_ids(dirty.begin(), dirty.end());
  const CompositeDistance policy = make_policy(st, kb, am);
  rep.clusters_split = resolve(st.family, policy, dirty_ids, make_rebuild(kb.graph(), am, st.params.gamma)).split;
  set_representatives(st.family, policy);
  return rep;
}

ResolveReport resolve_state(IntegrationState& st, const KnowledgeBase& kb) {
  st.params.validate();
  const AnchorMap am = anchor_map(st, kb.graph());
  const CompositeDistance policy = make_policy(st, kb, am);
  const ResolveReport r = resolve_all(st.family, policy, make_rebuild(kb.graph(), am, st.params.gamma));
  set_representatives(st.family, policy);
  return r;
}

ImportReport apply_review_decisions(IntegrationState& st, std::istream& decisions, const KnowledgeBase& kb) {
  ImportReport report = st.review.import_decisions(decisions);
  if (report.rejected.empty()) return report;
  std::set<ClusterId> dirty;
  for (const auto& id : report.rejected) {
    const ReviewItem* item = st.review.find(id);
    for (ClusterId cid : st.family.ids()) {
      const ClusterSet& c = st.family.at(cid);
      if (c.members.count(item->left) && c.members.count(item->right)) dirty.insert(cid);
    }
  }
  if (dirty.empty()) return report;
  const AnchorMap am = anchor_map(st, kb.graph());
  const CompositeDistance policy = make_policy(st, kb, am);
  const std::vector<ClusterId> ids(dirty.begin(), dirty.end());
  resolve(st.family, policy, ids, make_rebuild(kb.graph(), am, st.params.gamma));
  set_representatives(st.family, policy);
  return report;
}

FamilyStats family_stats(const ClusterFamily& family) {
  FamilyStats s;
  s.clusters = family.size();
  std::map<std::string, std::vector<ClusterId>> owners;
  for (ClusterId id : family.ids()) {
    const ClusterSet& c = family.at(id);
    ++s.size_histogram[c.members.size()];
    ++s.frontier_histogram[c.frontier.size()];
    for (const auto& m : c.members) owners[m].push_back(id);
  }
  s.attributes = owners.size();
  std::set<std::pair<ClusterId, ClusterId>> pairs;
  for (const auto& [m, ids] : owners) {
    if (ids.size() < 2) continue;
    ++s.shared_attributes;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) pairs.emplace(ids[i], ids[j]);
    }
  }
  s.overlapping_pairs = pairs.size();
  return s;
}

}  // namespace schemint
