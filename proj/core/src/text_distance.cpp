#include "schemint/text_distance.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // `row` spans the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(decode_utf8(a), decode_utf8(b));
}

bool edit_distance_within(std::u32string_view a, std::u32string_view b, long bound) {
  if (bound < 0) return false;
  const long la = static_cast<long>(a.size());
  const long lb = static_cast<long>(b.size());
  if (std::labs(la - lb) > bound) return false;
  if (bound == 0) return a == b;

  // Ukkonen band: only cells with |i - j| <= bound can stay within budget.
  constexpr long kInf = std::numeric_limits<long>::max() / 4;
  const long width = 2 * bound + 1;
  std::vector<long> prev(width, kInf);
  std::vector<long> cur(width, kInf);
  // Cell (i, j) lives at index j - i + bound.
  for (long j = 0; j <= std::min(lb, bound); ++j) prev[j + bound] = j;
  for (long i = 1; i <= la; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    long row_min = kInf;
    const long j_lo = std::max(0L, i - bound);
    const long j_hi = std::min(lb, i + bound);
    for (long j = j_lo; j <= j_hi; ++j) {
      const long idx = j - i + bound;
      long best = kInf;
      if (j == 0) {
        best = i;
      } else {
        // diagonal (i-1, j-1) sits at the same index in prev
        best = prev[idx] + (a[i - 1] == b[j - 1] ? 0 : 1);
        if (idx - 1 >= 0) best = std::min(best, cur[idx - 1] + 1);  // (i, j-1)
      }
      if (idx + 1 < width) best = std::min(best, prev[idx + 1] + 1);  // (i-1, j)
      cur[idx] = best;
      row_min = std::min(row_min, best);
    }
    if (row_min > bound) return false;
    std::swap(prev, cur);
  }
  const long final_idx = lb - la + bound;
  return prev[final_idx] <= bound;
}

GramSequence qgrams(std::u32string_view s, int q) {
  if (q < 1) throw ParameterError("q-gram length must be >= 1, got " + std::to_string(q));
  GramSequence out;
  out.source = std::u32string(s);
  out.q = q;
  const auto uq = static_cast<std::size_t>(q);
  if (s.size() >= uq) {
    out.grams.reserve(s.size() - uq + 1);
    for (std::size_t i = 0; i + uq <= s.size(); ++i) out.grams.emplace_back(s.substr(i, uq));
  }
  return out;
}

GramSequence qgrams(std::string_view utf8, int q) { return qgrams(decode_utf8(utf8), q); }

long count_filter_bound(long len_a, long len_b, int q, int eps) {
  return (std::max(len_a, len_b) - q + 1) - static_cast<long>(q) * eps;
}

std::size_t shared_gram_count(const GramSequence& a, const GramSequence& b) {
  std::map<std::u32string_view, std::size_t> counts;
  for (const auto& g : a.grams) ++counts[g];
  std::size_t shared = 0;
  for (const auto& g : b.grams) {
    auto it = counts.find(g);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++shared;
    }
  }
  return shared;
}

}  // namespace schemint
