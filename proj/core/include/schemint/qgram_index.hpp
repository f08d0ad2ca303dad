#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace schemint {

using AttrRef = std::uint32_t;

struct Posting {
  AttrRef ref = 0;
  std::uint32_t count = 0;  // occurrences of the gram in the attribute
};

struct Candidate {
  AttrRef ref = 0;
  std::uint32_t shared = 0;  // multiset intersection size with the probe
};

struct ProbeResult {
  std::vector<Candidate> candidates;  // ordered by ref
  // The count threshold |s| - q + 1 - eps*q was <= 0, so grams cannot prune.
  // `candidates` then holds every attribute whose length is within eps of the
  // probe and must be verified directly.
  bool fallback = false;
};

// 64-bit polynomial hash of a gram over its UTF-8 bytes.
std::uint64_t gram_hash(std::u32string_view gram);

// Inverted lists from q-gram hash to attribute occurrences. Attributes are
// ASCII-case-folded before gram extraction. Hash collisions only inflate
// counts, so probes stay complete; callers verify with true edit distance.
class InvertedIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit InvertedIndex(int q = 2);

  static InvertedIndex build(std::span<const std::string> attrs, int q);

  // Appends an attribute and returns its ref (refs are dense, in insertion order).
  AttrRef add(std::string_view attr);

  int q() const { return q_; }
  std::size_t size() const { return originals_.size(); }
  std::size_t posting_list_count() const { return postings_.size(); }
  const std::string& original(AttrRef ref) const { return originals_[ref]; }
  const std::u32string& folded(AttrRef ref) const { return folded_[ref]; }
  // Attributes shorter than q have no grams; they are reachable only via
  // the fallback path of probe().
  bool probe_only(AttrRef ref) const { return folded_[ref].size() < static_cast<std::size_t>(q_); }

  std::span<const Posting> postings(std::uint64_t hash) const;
  std::span<const Posting> postings_for(std::u32string_view gram) const { return postings(gram_hash(gram)); }

  // Attributes whose shared-gram count with `s` reaches |s| - q + 1 - eps*q.
  ProbeResult probe(std::u32string_view folded_probe, int eps) const;
  ProbeResult probe(std::string_view s, int eps) const;

  // header: magic "QGIX" | u32 version | u32 q | u64 attr count | u64 list count
  // attrs:  count x (u32 len | bytes)
  // lists:  sorted by hash, each u64 hash | u32 n | n x (u32 ref | u32 count)
  std::string serialize() const;
  static InvertedIndex deserialize(std::string_view bytes);

 private:
  int q_;
  std::vector<std::string> originals_;
  std::vector<std::u32string> folded_;
  std::unordered_map<std::uint64_t, std::vector<Posting>> postings_;
  std::unordered_map<std::size_t, std::vector<AttrRef>> by_length_;
};

}  // namespace schemint
