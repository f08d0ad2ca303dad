#include "schemint/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"
#include "schemint/text_distance.hpp"

namespace schemint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void ResolveConfig::validate() const {
  if (!(beta > 1.0)) throw ParameterError("beta must be > 1");
  if (gamma < 1) throw ParameterError("gamma must be >= 1");
  if (epsilon_t < 0) throw ParameterError("eps_t must be >= 0");
}

int ResolveConfig::semantic_limit() const { return static_cast<int>(std::floor(beta * gamma + 1e-9)); }

CompositeDistance::CompositeDistance(const KnowledgeGraph* graph, const AnchorLookup* anchors, ResolveConfig cfg,
                                     VetoCheck vetoed)
    : graph_(graph), anchors_(anchors), cfg_(cfg), vetoed_(std::move(vetoed)) {
  cfg_.validate();
}

int CompositeDistance::literal(const std::string& a, const std::string& b) const {
  return static_cast<int>(edit_distance(fold_case(a), fold_case(b)));
}

bool CompositeDistance::both_anchored(const std::string& a, const std::string& b) const {
  return graph_ && anchors_ && anchors_->count(a) && anchors_->count(b);
}

std::optional<int> CompositeDistance::semantic(const std::string& a, const std::string& b) const {
  if (!both_anchored(a, b)) return std::nullopt;
  const ConceptId ca = anchors_->at(a);
  const ConceptId cb = anchors_->at(b);
  if (ca == cb) return 0;
  auto it = balls_.find(ca);
  if (it == balls_.end()) {
    std::unordered_map<ConceptId, int> ball;
    for (const auto& [c, d] : bfs_ball(*graph_, ca, cfg_.semantic_limit())) ball.emplace(c, d);
    it = balls_.emplace(ca, std::move(ball)).first;
  }
  auto jt = it->second.find(cb);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

bool CompositeDistance::compatible(const std::string& a, const std::string& b) const {
  if (vetoed_ && vetoed_(a, b)) return false;
  if (literal(a, b) <= cfg_.epsilon_t) return true;
  return semantic(a, b).has_value();
}

double CompositeDistance::distance(const std::string& a, const std::string& b) const {
  if (vetoed_ && vetoed_(a, b)) return kInf;
  if (both_anchored(a, b)) {
    const auto s = semantic(a, b);
    return s ? *s : kInf;
  }
  return literal(a, b);
}

double CompositeDistance::proximity(const std::string& a, const std::string& b) const {
  const int lit = literal(a, b);
  const auto s = semantic(a, b);
  return s ? std::min(lit, *s) : lit;
}

namespace {

struct PairTables {
  std::vector<std::string> names;
  std::vector<std::vector<char>> compat;
  std::vector<std::vector<double>> dist;
};

void split_rec(const PairTables& t, std::vector<std::size_t> part, std::vector<std::vector<std::size_t>>& out) {
  if (part.size() <= 1) {
    if (!part.empty()) out.push_back(std::move(part));
    return;
  }
  bool found = false;
  std::size_t pa = 0, pb = 0;
  double worst = -1;
  for (std::size_t i = 0; i < part.size(); ++i) {
    for (std::size_t j = i + 1; j < part.size(); ++j) {
      const std::size_t a = part[i], b = part[j];
      if (t.compat[a][b]) continue;
      if (!found || t.dist[a][b] > worst) {
        found = true;
        worst = t.dist[a][b];
        pa = a;
        pb = b;
      }
    }
  }
  if (!found) {
    out.push_back(std::move(part));
    return;
  }
  std::vector<std::size_t> with_a{pa}, with_b{pb}, rest;
  for (std::size_t x : part) {
    if (x == pa || x == pb) continue;
    const bool ca = t.compat[x][pa], cb = t.compat[x][pb];
    if (ca) with_a.push_back(x);
    if (cb) with_b.push_back(x);
    if (!ca && !cb) rest.push_back(x);
  }
  std::sort(with_a.begin(), with_a.end());
  std::sort(with_b.begin(), with_b.end());
  split_rec(t, std::move(with_a), out);
  split_rec(t, std::move(with_b), out);
  split_rec(t, std::move(rest), out);
}

}  // namespace

std::vector<std::set<std::string>> split_members(const std::set<std::string>& members, const DistancePolicy& policy) {
  PairTables t;
  t.names.assign(members.begin(), members.end());
  const std::size_t n = t.names.size();
  t.compat.assign(n, std::vector<char>(n, 1));
  t.dist.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool c = policy.compatible(t.names[i], t.names[j]);
      t.compat[i][j] = t.compat[j][i] = c;
      if (!c) t.dist[i][j] = t.dist[j][i] = policy.distance(t.names[i], t.names[j]);
    }
  }
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<std::vector<std::size_t>> raw;
  split_rec(t, std::move(all), raw);

  // drop duplicates and parts contained in another part
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  std::vector<std::set<std::string>> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool covered = false;
    for (std::size_t j = 0; j < raw.size() && !covered; ++j) {
      if (i == j || raw[j].size() < raw[i].size()) continue;
      if (raw[j].size() == raw[i].size()) continue;  // equal sets were removed above
      covered = std::includes(raw[j].begin(), raw[j].end(), raw[i].begin(), raw[i].end());
    }
    if (covered) continue;
    std::set<std::string> part;
    for (std::size_t x : raw[i]) part.insert(t.names[x]);
    out.push_back(std::move(part));
  }
  std::sort(out.begin(), out.end());
  return out;
}

ResolveReport resolve(ClusterFamily& family, const DistancePolicy& policy, std::span<const ClusterId> ids,
                      const FrontierRebuild& rebuild) {
  ResolveReport report;
  for (ClusterId id : ids) {
    const ClusterSet* c = family.find(id);
    if (!c) continue;
    ++report.examined;
    if (c->members.size() < 2) continue;
    auto parts = split_members(c->members, policy);
    if (parts.size() <= 1) continue;
    const ClusterSet original = *c;
    std::vector<ClusterSet> sets;
    for (auto& p : parts) {
      ClusterSet s;
      s.frontier = rebuild ? rebuild(p, original) : original.frontier;
      s.members = std::move(p);
      sets.push_back(std::move(s));
    }
    ++report.split;
    report.parts += sets.size();
    family.replace(id, std::move(sets));
  }
  return report;
}

ResolveReport resolve_all(ClusterFamily& family, const DistancePolicy& policy, const FrontierRebuild& rebuild) {
  const auto ids = family.ids();
  return resolve(family, policy, ids, rebuild);
}

std::string representative(const std::set<std::string>& members, const DistancePolicy& policy) {
  if (members.empty()) return {};
  const std::vector<std::string> names(members.begin(), members.end());
  std::vector<double> sum(names.size(), 0.0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      const double p = policy.proximity(names[i], names[j]);
      sum[i] += p;
      sum[j] += p;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < names.size(); ++i) {
    if (sum[i] < sum[best]) best = i;
  }
  return names[best];
}

std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::kInteger: return "integer";
    case ValueType::kDecimal: return "decimal";
    case ValueType::kDate: return "date";
    case ValueType::kList: return "list";
    case ValueType::kString: return "string";
  }
  return "string";
}

std::string_view to_string(VerifyRule r) {
  switch (r) {
    case VerifyRule::kNone: return "none";
    case VerifyRule::kType: return "type";
    case VerifyRule::kAffix: return "affix";
  }
  return "none";
}

namespace {

bool is_alnum(unsigned char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(unsigned char c) { return c == ' ' || c == '\t'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

const std::vector<std::regex>& date_patterns() {
  static const std::vector<std::regex> patterns = [] {
    const char* months = "(jan|feb|mar|apr|may|jun|jul|aug|sep|sept|oct|nov|dec)[a-z]*";
    std::vector<std::regex> p;
    p.emplace_back(R"(\d{4}[-/.]\d{1,2}[-/.]\d{1,2})");
    p.emplace_back(R"(\d{1,2}[-/.]\d{1,2}[-/.]\d{2,4})");
    p.emplace_back(std::string(months) + R"([- /]\d{1,4})", std::regex::icase);
    p.emplace_back(std::string(R"(\d{1,2}[- ])") + months + R"([- ]\d{2,4})", std::regex::icase);
    p.emplace_back(std::string(months) + R"( \d{1,2},? \d{4})", std::regex::icase);
    return p;
  }();
  return patterns;
}

bool is_integer(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool is_decimal(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  std::size_t dots = 0, digits = 0;
  for (char c : s) {
    if (c == '.') ++dots;
    else if (is_digit(c)) ++digits;
    else return false;
  }
  return dots == 1 && digits > 0;
}

bool is_list(std::string_view s) {
  for (char delim : {',', ';', '|'}) {
    if (s.find(delim) == std::string_view::npos) continue;
    const auto parts = split(s, delim);
    if (parts.size() < 2) return false;
    return std::all_of(parts.begin(), parts.end(), [](const std::string& p) { return !trim(p).empty(); });
  }
  return false;
}

template <typename T>
std::optional<T> dominant(const std::map<T, std::size_t>& counts, std::size_t n, double dominance) {
  for (const auto& [value, count] : counts) {
    if (static_cast<double>(count) >= dominance * static_cast<double>(n)) return value;
  }
  return std::nullopt;
}

std::optional<ValueType> dominant_type(const std::vector<ValueShape>& shapes, double dominance) {
  std::map<ValueType, std::size_t> counts;
  for (const auto& s : shapes) ++counts[s.type];
  if (auto t = dominant(counts, shapes.size(), dominance)) return t;
  const std::size_t numeric = counts[ValueType::kInteger] + counts[ValueType::kDecimal];
  if (numeric > 0 && static_cast<double>(numeric) >= dominance * static_cast<double>(shapes.size())) {
    return ValueType::kDecimal;
  }
  return std::nullopt;
}

bool numeric(ValueType t) { return t == ValueType::kInteger || t == ValueType::kDecimal; }

}  // namespace

ValueShape value_shape(std::string_view sample) {
  std::string_view s = trim(sample);
  std::size_t b = 0;
  while (b < s.size()) {
    const unsigned char c = s[b];
    if (is_alnum(c) || is_space(c) || c == '+' || c == '-' || c == '.') break;
    ++b;
  }
  std::size_t e = s.size();
  while (e > b) {
    const unsigned char c = s[e - 1];
    if (is_alnum(c) || is_space(c) || c == '.') break;
    --e;
  }
  ValueShape shape;
  shape.prefix = std::string(trim(s.substr(0, b)));
  shape.core = std::string(trim(s.substr(b, e - b)));
  shape.suffix = std::string(trim(s.substr(e)));
  shape.type = infer_value_type(shape.core);
  return shape;
}

ValueType infer_value_type(std::string_view core) {
  core = trim(core);
  if (core.empty()) return ValueType::kString;
  if (is_integer(core)) return ValueType::kInteger;
  if (is_decimal(core)) return ValueType::kDecimal;
  const std::string str(core);
  for (const auto& re : date_patterns()) {
    if (std::regex_match(str, re)) return ValueType::kDate;
  }
  if (is_list(core)) return ValueType::kList;
  return ValueType::kString;
}

ValueVerdict value_verify(std::span<const std::string> a, std::span<const std::string> b, double dominance) {
  if (!(dominance > 0.5 && dominance <= 1.0)) throw ParameterError("dominance must be in (0.5, 1]");
  ValueVerdict v;
  if (a.empty() || b.empty()) {
    v.detail = "no samples on one side";
    return v;
  }
  std::vector<ValueShape> sa, sb;
  for (const auto& x : a) sa.push_back(value_shape(x));
  for (const auto& x : b) sb.push_back(value_shape(x));

  const auto ta = dominant_type(sa, dominance);
  const auto tb = dominant_type(sb, dominance);
  if (ta && tb) {
    if (*ta != *tb && !(numeric(*ta) && numeric(*tb))) {
      return {VerifyOutcome::kFail, VerifyRule::kType,
              std::string(to_string(*ta)) + " vs " + std::string(to_string(*tb))};
    }
    v = {VerifyOutcome::kPass, VerifyRule::kType, std::string(to_string(*ta))};
  }

  for (const bool prefix : {true, false}) {
    std::map<std::string, std::size_t> ca, cb;
    for (const auto& s : sa) ++ca[prefix ? s.prefix : s.suffix];
    for (const auto& s : sb) ++cb[prefix ? s.prefix : s.suffix];
    const auto xa = dominant(ca, sa.size(), dominance);
    const auto xb = dominant(cb, sb.size(), dominance);
    if (!xa || !xb || xa->empty() || xb->empty()) continue;
    const char* which = prefix ? "prefix" : "suffix";
    if (*xa != *xb) {
      return {VerifyOutcome::kFail, VerifyRule::kAffix, std::string(which) + " '" + *xa + "' vs '" + *xb + "'"};
    }
    v = {VerifyOutcome::kPass, VerifyRule::kAffix, std::string(which) + " '" + *xa + "'"};
  }
  return v;
}

Verifier::Verifier(const SampleStore& samples, ReviewQueue& queue, const ClusterFamily* family)
    : samples_(&samples), queue_(&queue), family_(family) {}

bool Verifier::operator()(const MatchCandidate& m) const {
  if (m.kind == MatchKind::kLiteralFrontier || m.kind == MatchKind::kSemanticFrontier) return true;
  if (queue_->is_vetoed(m.left, m.right)) return false;
  if (queue_->is_accepted(m.left, m.right)) return true;

  static const std::vector<std::string> kNone;
  auto la = samples_->find(m.left);
  auto lb = samples_->find(m.right);
  const auto& va = la == samples_->end() ? kNone : la->second;
  const auto& vb = lb == samples_->end() ? kNone : lb->second;
  const ValueVerdict verdict = value_verify(va, vb);
  if (verdict.outcome != VerifyOutcome::kFail) return true;

  ReviewItem item;
  item.left = m.left;
  item.right = m.right;
  item.cluster = m.right;
  if (family_) {
    if (auto id = family_->locate(m.right)) item.cluster = *family_->at(*id).members.begin();
  }
  item.kind = m.kind;
  item.literal_distance = static_cast<int>(edit_distance(fold_case(m.left), fold_case(m.right)));
  if (m.kind == MatchKind::kSemanticMember) item.semantic_distance = m.distance;
  item.left_values = va;
  item.right_values = vb;
  item.rule = std::string(to_string(verdict.rule)) + ": " + verdict.detail;
  queue_->enqueue(std::move(item));
  return false;
}

MergeGate Verifier::gate() const {
  return [this](const MatchCandidate& m) { return (*this)(m); };
}

std::vector<MatchCandidate> verify(std::span<const MatchCandidate> candidates, const SampleStore& samples,
                                   ReviewQueue& queue) {
  const Verifier v(samples, queue);
  std::vector<MatchCandidate> out;
  for (const auto& m : candidates) {
    if (v(m)) out.push_back(m);
  }
  return out;
}

}  // namespace schemint
