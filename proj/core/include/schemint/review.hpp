#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "schemint/cluster.hpp"

namespace schemint {

enum class Verdict { kPending, kAccept, kReject };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view s);  // throws DataError

// A merge held back for a human decision.
struct ReviewItem {
  std::string id;
  std::string left;   // left <= right
  std::string right;
  std::string cluster;  // smallest member of the cluster the pair would join
  MatchKind kind = MatchKind::kLiteralMember;
  int literal_distance = -1;
  int semantic_distance = -1;  // -1 when not measured
  std::vector<std::string> left_values;
  std::vector<std::string> right_values;
  std::string rule;  // verification rule that failed
  Verdict verdict = Verdict::kPending;
};

struct ImportReport {
  std::vector<std::string> accepted;
  std::vector<std::string> rejected;
  std::vector<std::string> unknown;    // ids not in the queue, skipped
  std::vector<std::string> conflicts;  // already decided the other way, skipped
};

class ReviewQueue {
 public:
  // "r-" + 16 hex digits of fnv1a64 over the sorted pair.
  static std::string item_id(std::string_view a, std::string_view b);

  // Adds the item (pair sorted, id assigned). An existing item is left as is.
  // Returns true when the item is new.
  bool enqueue(ReviewItem item);

  const ReviewItem* find(std::string_view id) const;
  bool is_vetoed(std::string_view a, std::string_view b) const;
  bool is_accepted(std::string_view a, std::string_view b) const;

  // Pending -> accept/reject. Returns false for an unknown id or when the
  // item was already decided differently.
  bool decide(std::string_view id, Verdict v);

  const std::map<std::string, ReviewItem>& items() const { return items_; }
  std::vector<const ReviewItem*> pending() const;
  std::vector<std::pair<std::string, std::string>> vetoes() const;
  bool empty() const { return items_.empty(); }

  // One JSON document per pending item, newline-delimited, in id order.
  void export_pending(std::ostream& out) const;
  // Lines of {"id": ..., "verdict": "accept" | "reject" | "pending"}.
  ImportReport import_decisions(std::istream& in);

 private:
  std::map<std::string, ReviewItem> items_;
};

}  // namespace schemint
