#include "schemint/qgram_index.hpp"

#include <algorithm>
#include <map>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"
#include "schemint/text_distance.hpp"

namespace schemint {

namespace {

// Distinct gram hashes of `s` with their multiplicities.
std::vector<std::pair<std::uint64_t, std::uint32_t>> gram_counts(std::u32string_view s, int q) {
  std::vector<std::uint64_t> hashes;
  const auto uq = static_cast<std::size_t>(q);
  if (s.size() >= uq) {
    hashes.reserve(s.size() - uq + 1);
    for (std::size_t i = 0; i + uq <= s.size(); ++i) hashes.push_back(gram_hash(s.substr(i, uq)));
  }
  std::sort(hashes.begin(), hashes.end());
  std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
  for (std::uint64_t h : hashes) {
    if (!out.empty() && out.back().first == h) {
      ++out.back().second;
    } else {
      out.emplace_back(h, 1);
    }
  }
  return out;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Cursor {
  std::string_view data;
  std::size_t pos = 0;
  std::uint64_t get(int n) {
    if (pos + n > data.size()) throw StateCorruption("q-gram index: truncated data");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += n;
    return v;
  }
  std::string_view bytes(std::size_t n) {
    if (pos + n > data.size()) throw StateCorruption("q-gram index: truncated data");
    auto s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

std::uint64_t gram_hash(std::u32string_view gram) {
  std::uint64_t h = 0;
  for (unsigned char c : encode_utf8(gram)) h = h * 1099511628211ULL + c + 1;
  return h;
}

InvertedIndex::InvertedIndex(int q) : q_(q) {
  if (q < 1) throw ParameterError("q-gram length must be >= 1, got " + std::to_string(q));
}

InvertedIndex InvertedIndex::build(std::span<const std::string> attrs, int q) {
  InvertedIndex index(q);
  for (const auto& a : attrs) index.add(a);
  return index;
}

AttrRef InvertedIndex::add(std::string_view attr) {
  const auto ref = static_cast<AttrRef>(originals_.size());
  originals_.emplace_back(attr);
  folded_.push_back(fold_case(attr));
  const std::u32string& f = folded_.back();
  for (const auto& [h, n] : gram_counts(f, q_)) postings_[h].push_back(Posting{ref, n});
  by_length_[f.size()].push_back(ref);
  return ref;
}

std::span<const Posting> InvertedIndex::postings(std::uint64_t hash) const {
  auto it = postings_.find(hash);
  if (it == postings_.end()) return {};
  return it->second;
}

ProbeResult InvertedIndex::probe(std::string_view s, int eps) const { return probe(fold_case(s), eps); }

ProbeResult InvertedIndex::probe(std::u32string_view s, int eps) const {
  ProbeResult result;
  const long threshold = static_cast<long>(s.size()) - q_ + 1 - static_cast<long>(eps) * q_;
  const auto grams = gram_counts(s, q_);

  std::unordered_map<AttrRef, std::uint32_t> shared;
  for (const auto& [h, n] : grams) {
    for (const Posting& p : postings(h)) shared[p.ref] += std::min(n, p.count);
  }

  if (threshold <= 0) {
    result.fallback = true;
    const long lo = std::max(0L, static_cast<long>(s.size()) - eps);
    const long hi = static_cast<long>(s.size()) + eps;
    for (long len = lo; len <= hi; ++len) {
      auto it = by_length_.find(static_cast<std::size_t>(len));
      if (it == by_length_.end()) continue;
      for (AttrRef ref : it->second) {
        auto sh = shared.find(ref);
        result.candidates.push_back(Candidate{ref, sh == shared.end() ? 0u : sh->second});
      }
    }
  } else {
    for (const auto& [ref, count] : shared) {
      if (static_cast<long>(count) >= threshold) result.candidates.push_back(Candidate{ref, count});
    }
  }
  std::sort(result.candidates.begin(), result.candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.ref < b.ref; });
  return result;
}

std::string InvertedIndex::serialize() const {
  std::string out = "QGIX";
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(q_));
  put_u64(out, originals_.size());
  put_u64(out, postings_.size());
  for (const auto& a : originals_) {
    put_u32(out, static_cast<std::uint32_t>(a.size()));
    out.append(a);
  }
  std::map<std::uint64_t, const std::vector<Posting>*> sorted;
  for (const auto& [h, list] : postings_) sorted.emplace(h, &list);
  for (const auto& [h, list] : sorted) {
    put_u64(out, h);
    put_u32(out, static_cast<std::uint32_t>(list->size()));
    for (const Posting& p : *list) {
      put_u32(out, p.ref);
      put_u32(out, p.count);
    }
  }
  return out;
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
  Cursor c{bytes};
  if (c.bytes(4) != "QGIX") throw StateCorruption("q-gram index: bad magic");
  if (c.get(4) != kFormatVersion) throw StateCorruption("q-gram index: unsupported version");
  const auto q = static_cast<int>(c.get(4));
  if (q < 1) throw StateCorruption("q-gram index: invalid q");
  const std::uint64_t attrs = c.get(8);
  const std::uint64_t lists = c.get(8);
  InvertedIndex index(q);
  for (std::uint64_t i = 0; i < attrs; ++i) {
    const auto len = static_cast<std::size_t>(c.get(4));
    index.add(c.bytes(len));
  }
  // Postings are rebuilt by add(); the stored lists must agree with them.
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < lists; ++i) {
    const std::uint64_t h = c.get(8);
    if (i > 0 && h <= prev) throw StateCorruption("q-gram index: posting lists out of order");
    prev = h;
    const auto n = static_cast<std::size_t>(c.get(4));
    const auto stored = index.postings(h);
    if (stored.size() != n) throw StateCorruption("q-gram index: posting list mismatch");
    for (std::size_t k = 0; k < n; ++k) {
      const auto ref = static_cast<AttrRef>(c.get(4));
      const auto count = static_cast<std::uint32_t>(c.get(4));
      if (stored[k].ref != ref || stored[k].count != count) throw StateCorruption("q-gram index: posting list mismatch");
    }
  }
  if (index.posting_list_count() != lists) throw StateCorruption("q-gram index: posting list count mismatch");
  if (c.pos != bytes.size()) throw StateCorruption("q-gram index: trailing bytes");
  return index;
}

}  // namespace schemint
