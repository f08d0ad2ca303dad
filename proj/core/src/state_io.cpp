#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schemint/errors.hpp"
#include "schemint/pipeline.hpp"

namespace schemint {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "schemint-state";
constexpr int kVersion = 1;

MatchKind parse_kind(std::string_view s) {
  for (MatchKind k : {MatchKind::kLiteralMember, MatchKind::kLiteralFrontier, MatchKind::kSemanticMember,
                      MatchKind::kSemanticFrontier}) {
    if (to_string(k) == s) return k;
  }
  throw StateCorruption("unknown match kind '" + std::string(s) + "'");
}

std::vector<std::string> members_index(const ClusterFamily& family) {
  std::set<std::string> all;
  for (const ClusterSet* c : family.canonical()) all.insert(c->members.begin(), c->members.end());
  return {all.begin(), all.end()};
}

}  // namespace

std::string serialize_state(const IntegrationState& st) {
  ojson j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  ojson p;
  p["epsilon_t"] = st.params.epsilon_t;
  p["gamma"] = st.params.gamma;
  p["beta"] = st.params.beta;
  p["q"] = st.params.q;
  p["frontier_cap"] = st.params.frontier_cap;
  j["params"] = p;
  j["kb"] = st.kb;

  ojson clusters = ojson::array();
  std::size_t index = 0;
  for (const ClusterSet* c : st.family.canonical()) {
    ojson cj;
    cj["id"] = index++;
    cj["representative"] = c->representative;
    cj["attributes"] = std::vector<std::string>(c->members.begin(), c->members.end());
    ojson fr = ojson::array();
    for (const auto& [concept_name, d] : c->frontier) fr.push_back(ojson{{"concept", concept_name}, {"distance", d}});
    cj["frontier"] = fr;
    clusters.push_back(cj);
  }
  j["clusters"] = clusters;

  ojson anchors = ojson::object();
  for (const auto& [a, c] : st.anchors) anchors[a] = c;
  j["anchors"] = anchors;
  ojson values = ojson::object();
  for (const auto& [a, v] : st.values) values[a] = v;
  j["values"] = values;

  ojson review = ojson::array();
  for (const auto& [id, item] : st.review.items()) {
    ojson r;
    r["id"] = item.id;
    r["left"] = item.left;
    r["right"] = item.right;
    r["cluster"] = item.cluster;
    r["kind"] = std::string(to_string(item.kind));
    r["literal_distance"] = item.literal_distance;
    r["semantic_distance"] = item.semantic_distance;
    r["left_values"] = item.left_values;
    r["right_values"] = item.right_values;
    r["rule"] = item.rule;
    r["verdict"] = std::string(to_string(item.verdict));
    review.push_back(r);
  }
  j["review"] = review;
  return j.dump(2) + "\n";
}

IntegrationState parse_state(std::string_view text) {
  IntegrationState st;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format") != kFormat) throw StateCorruption("not a state file");
    if (j.at("version") != kVersion) throw StateCorruption("unsupported state version");
    const auto& p = j.at("params");
    st.params.epsilon_t = p.at("epsilon_t").get<int>();
    st.params.gamma = p.at("gamma").get<int>();
    st.params.beta = p.at("beta").get<double>();
    st.params.q = p.at("q").get<int>();
    st.params.frontier_cap = p.at("frontier_cap").get<std::size_t>();
    try {
      st.params.validate();
    } catch (const ParameterError& e) {
      throw StateCorruption(std::string("params: ") + e.what());
    }
    st.kb = j.at("kb").get<std::string>();

    for (const auto& cj : j.at("clusters")) {
      ClusterSet c;
      for (const auto& m : cj.at("attributes")) c.members.insert(m.get<std::string>());
      if (c.members.empty()) throw StateCorruption("cluster without attributes");
      for (const auto& f : cj.at("frontier")) {
        const int d = f.at("distance").get<int>();
        if (d < 0) throw StateCorruption("negative frontier distance");
        if (!c.frontier.emplace(f.at("concept").get<std::string>(), d).second) {
          throw StateCorruption("repeated frontier concept");
        }
      }
      c.representative = cj.at("representative").get<std::string>();
      if (!c.representative.empty() && !c.members.count(c.representative)) {
        throw StateCorruption("representative is not a member");
      }
      st.family.add(std::move(c));
    }
    for (const auto& [a, c] : j.at("anchors").items()) st.anchors[a] = c.get<std::string>();
    for (const auto& [a, v] : j.at("values").items()) st.values[a] = v.get<std::vector<std::string>>();
    for (const auto& r : j.at("review")) {
      ReviewItem item;
      item.left = r.at("left").get<std::string>();
      item.right = r.at("right").get<std::string>();
      item.cluster = r.at("cluster").get<std::string>();
      item.kind = parse_kind(r.at("kind").get<std::string>());
      item.literal_distance = r.at("literal_distance").get<int>();
      item.semantic_distance = r.at("semantic_distance").get<int>();
      item.left_values = r.at("left_values").get<std::vector<std::string>>();
      item.right_values = r.at("right_values").get<std::vector<std::string>>();
      item.rule = r.at("rule").get<std::string>();
      item.verdict = parse_verdict(r.at("verdict").get<std::string>());
      const std::string id = r.at("id").get<std::string>();
      if (id != ReviewQueue::item_id(item.left, item.right)) throw StateCorruption("review id mismatch for " + id);
      if (!st.review.enqueue(std::move(item))) throw StateCorruption("repeated review item " + id);
    }
  } catch (const nlohmann::json::exception& e) {
    throw StateCorruption(std::string("state: ") + e.what());
  } catch (const DataError& e) {
    throw StateCorruption(std::string("state: ") + e.what());
  }
  return st;
}

void save_state(const IntegrationState& st, const std::filesystem::path& path) {
  const std::string text = serialize_state(st);
  const std::vector<std::string> members = members_index(st.family);
  const std::string qidx = InvertedIndex::build(members, st.params.q).serialize();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  for (const auto& [p, bytes] : {std::pair{path, std::string_view(text)},
                                 std::pair{std::filesystem::path(path.string() + ".qidx"), std::string_view(qidx)}}) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + p.string());
  }
}

IntegrationState load_state(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw NotFound("state file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open state " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  IntegrationState st = parse_state(ss.str());

  const std::filesystem::path qpath = path.string() + ".qidx";
  if (std::filesystem::exists(qpath)) {
    std::ifstream qin(qpath, std::ios::binary);
    std::ostringstream qs;
    qs << qin.rdbuf();
    const InvertedIndex idx = InvertedIndex::deserialize(qs.str());
    const std::vector<std::string> members = members_index(st.family);
    bool ok = idx.size() == members.size() && idx.q() == st.params.q;
    for (std::size_t i = 0; ok && i < members.size(); ++i) ok = idx.original(static_cast<AttrRef>(i)) == members[i];
    if (!ok) throw StateCorruption(qpath.string() + " does not match the state file");
  }
  return st;
}

}  // namespace schemint
