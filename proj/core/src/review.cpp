#include "schemint/review.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPending: return "pending";
    case Verdict::kAccept: return "accept";
    case Verdict::kReject: return "reject";
  }
  return "pending";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "pending") return Verdict::kPending;
  if (s == "accept") return Verdict::kAccept;
  if (s == "reject") return Verdict::kReject;
  throw DataError("unknown verdict '" + std::string(s) + "'");
}

std::string ReviewQueue::item_id(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  std::string key(a);
  key.push_back('\x1f');
  key.append(b);
  char buf[24];
  std::snprintf(buf, sizeof buf, "r-%016llx", static_cast<unsigned long long>(fnv1a64(key)));
  return buf;
}

bool ReviewQueue::enqueue(ReviewItem item) {
  if (item.right < item.left) {
    std::swap(item.left, item.right);
    std::swap(item.left_values, item.right_values);
  }
  item.id = item_id(item.left, item.right);
  return items_.try_emplace(item.id, std::move(item)).second;
}

const ReviewItem* ReviewQueue::find(std::string_view id) const {
  auto it = items_.find(std::string(id));
  return it == items_.end() ? nullptr : &it->second;
}

bool ReviewQueue::is_vetoed(std::string_view a, std::string_view b) const {
  const ReviewItem* item = find(item_id(a, b));
  return item && item->verdict == Verdict::kReject;
}

bool ReviewQueue::is_accepted(std::string_view a, std::string_view b) const {
  const ReviewItem* item = find(item_id(a, b));
  return item && item->verdict == Verdict::kAccept;
}

bool ReviewQueue::decide(std::string_view id, Verdict v) {
  auto it = items_.find(std::string(id));
  if (it == items_.end()) return false;
  ReviewItem& item = it->second;
  if (v == Verdict::kPending) return item.verdict == Verdict::kPending;
  if (item.verdict == Verdict::kPending) {
    item.verdict = v;
    return true;
  }
  return item.verdict == v;
}

std::vector<const ReviewItem*> ReviewQueue::pending() const {
  std::vector<const ReviewItem*> out;
  for (const auto& [id, item] : items_) {
    if (item.verdict == Verdict::kPending) out.push_back(&item);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ReviewQueue::vetoes() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [id, item] : items_) {
    if (item.verdict == Verdict::kReject) out.emplace_back(item.left, item.right);
  }
  return out;
}

void ReviewQueue::export_pending(std::ostream& out) const {
  for (const ReviewItem* item : pending()) {
    nlohmann::ordered_json j;
    j["id"] = item->id;
    j["left"] = item->left;
    j["right"] = item->right;
    j["cluster"] = item->cluster;
    j["kind"] = std::string(to_string(item->kind));
    j["literal_distance"] = item->literal_distance;
    j["semantic_distance"] = item->semantic_distance;
    j["left_values"] = item->left_values;
    j["right_values"] = item->right_values;
    j["rule"] = item->rule;
    j["verdict"] = std::string(to_string(item->verdict));
    out << j.dump() << '\n';
  }
}

ImportReport ReviewQueue::import_decisions(std::istream& in) {
  ImportReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("decisions line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("verdict") ||
        !j["verdict"].is_string()) {
      throw DataError("decisions line " + std::to_string(line_no) + ": expected {\"id\", \"verdict\"}");
    }
    const std::string id = j["id"].get<std::string>();
    const Verdict v = parse_verdict(j["verdict"].get<std::string>());
    const ReviewItem* item = find(id);
    if (!item) {
      report.unknown.push_back(id);
      continue;
    }
    if (v == Verdict::kPending) continue;
    const bool fresh = item->verdict == Verdict::kPending;
    if (!decide(id, v)) {
      report.conflicts.push_back(id);
      continue;
    }
    if (!fresh) continue;
    (v == Verdict::kAccept ? report.accepted : report.rejected).push_back(id);
  }
  return report;
}

}  // namespace schemint
