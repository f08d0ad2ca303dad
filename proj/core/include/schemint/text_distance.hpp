#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace schemint {

// Levenshtein distance with unit-cost insert/delete/substitute over Unicode
// scalar values.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);
std::size_t edit_distance(std::string_view a, std::string_view b);

// True iff edit_distance(a, b) <= bound. Runs a diagonal band of width
// 2*bound+1, so the cost is O(bound * min(|a|, |b|)). A negative bound is
// never satisfied.
bool edit_distance_within(std::u32string_view a, std::u32string_view b, long bound);

struct GramSequence {
  std::u32string source;
  int q = 2;
  std::vector<std::u32string> grams;  // in source order, |source| - q + 1 of them
};

// All length-q substrings in order, no padding. Throws ParameterError for q < 1.
GramSequence qgrams(std::u32string_view s, int q);
GramSequence qgrams(std::string_view utf8, int q);

// Count-filter lower bound on shared q-grams for strings within eps edits:
// (max(len_a, len_b) - q + 1) - q * eps. May be <= 0, in which case the
// filter prunes nothing.
long count_filter_bound(long len_a, long len_b, int q, int eps);

// Size of the multiset intersection of two gram sequences.
std::size_t shared_gram_count(const GramSequence& a, const GramSequence& b);

}  // namespace schemint
