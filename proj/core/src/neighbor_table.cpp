#include "schemint/neighbor_table.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <tuple>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

namespace {

constexpr char kMagic[4] = {'K', 'B', 'N', 'T'};
constexpr std::uint64_t kAlignment = 4096;
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 4 + 8 + 8 + 8;

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::string_view s) { out_.append(s); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  void pad_to(std::uint64_t offset) { out_.resize(offset, '\0'); }
  void patch_u64(std::uint64_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_[at + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  std::uint64_t size() const { return out_.size(); }
  std::string take() && { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}
  void seek(std::uint64_t pos) {
    if (pos > data_.size()) throw StateCorruption("neighbor table: offset out of range");
    pos_ = pos;
  }
  std::uint64_t pos() const { return pos_; }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::string_view bytes(std::uint64_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view str() { return bytes(u32()); }

 private:
  void need(std::uint64_t n) const {
    if (pos_ + n > data_.size()) throw StateCorruption("neighbor table: truncated data");
  }
  std::uint64_t get(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  std::string_view data_;
  std::uint64_t pos_ = 0;
};

std::uint64_t align_up(std::uint64_t v) { return (v + kAlignment - 1) / kAlignment * kAlignment; }

std::uint64_t bucket_of(std::string_view name, std::uint64_t bucket_count) { return fnv1a64(name) % bucket_count; }

std::uint64_t buckets_for(std::size_t concepts, std::uint64_t bucket_length) {
  return std::max<std::uint64_t>(1, (concepts + bucket_length - 1) / bucket_length);
}

struct Header {
  std::uint32_t k = 0;
  std::uint32_t bucket_length = 0;
  std::uint64_t seed = 0;
  std::uint64_t bucket_count = 0;
  std::uint64_t entry_count = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> buckets;
};

Header read_header(ByteReader& r, std::uint64_t total) {
  if (r.bytes(4) != std::string_view(kMagic, 4)) throw StateCorruption("neighbor table: bad magic");
  const std::uint32_t version = r.u32();
  if (version != NeighborTable::kFormatVersion) {
    throw StateCorruption("neighbor table: unsupported format version " + std::to_string(version));
  }
  Header h;
  h.k = r.u32();
  h.bucket_length = r.u32();
  h.seed = r.u64();
  h.bucket_count = r.u64();
  h.entry_count = r.u64();
  if (h.bucket_length == 0 || h.bucket_count == 0 || h.bucket_count > total) {
    throw StateCorruption("neighbor table: invalid header");
  }
  for (std::uint64_t b = 0; b < h.bucket_count; ++b) {
    const std::uint64_t base = r.u64();
    const std::uint64_t size = r.u64();
    if (base + size > total) throw StateCorruption("neighbor table: bucket outside file");
    h.buckets.emplace_back(base, size);
  }
  return h;
}

}  // namespace

bool is_power_of_two(int k) { return k > 0 && (k & (k - 1)) == 0; }

NeighborTable NeighborTable::build(const KnowledgeGraph& g, int k, BucketHashParams params) {
  if (!is_power_of_two(k)) throw ParameterError("neighbor table hop count must be a power of two, got " + std::to_string(k));
  if (params.bucket_length == 0) throw ParameterError("bucket_length must be > 0");
  NeighborTable t;
  t.k_ = k;
  t.params_ = params;
  const std::size_t n = g.concept_count();
  t.entries_.resize(n);

  std::vector<int> dist(n, -1);
  std::vector<ConceptId> touched;
  std::vector<ConceptId> layer;
  std::vector<ConceptId> next;
  for (ConceptId s = 0; s < n; ++s) {
    dist[s] = 0;
    touched.assign(1, s);
    layer.assign(1, s);
    for (int d = 1; d <= k && !layer.empty(); ++d) {
      next.clear();
      for (ConceptId u : layer) {
        for (ConceptId v : g.neighbors(u)) {
          if (dist[v] < 0) {
            dist[v] = d;
            touched.push_back(v);
            next.push_back(v);
          }
        }
      }
      layer.swap(next);
    }
    if (!layer.empty()) {
      auto& out = t.entries_[s];
      out.assign(layer.begin(), layer.end());
      std::sort(out.begin(), out.end());
    }
    for (ConceptId v : touched) dist[v] = -1;
  }
  return t;
}

std::vector<std::string> NeighborTable::lookup(const KnowledgeGraph& g, std::string_view name) const {
  std::vector<std::string> out;
  if (auto id = g.find(name)) {
    for (ConceptId v : at(*id)) out.push_back(g.name(v));
  }
  return out;
}

std::string NeighborTable::serialize(const KnowledgeGraph& g) const {
  const std::uint64_t bucket_count = buckets_for(entries_.size(), params_.bucket_length);

  // (bucket, slot, name, id), sorted: records are laid out in this order.
  std::vector<std::tuple<std::uint64_t, std::uint64_t, std::string_view, ConceptId>> order;
  order.reserve(entries_.size());
  for (ConceptId id = 0; id < entries_.size(); ++id) {
    const std::string& name = g.name(id);
    order.emplace_back(bucket_of(name, bucket_count), bucket_hash(name, 0, params_.seed, params_.bucket_length), name, id);
  }
  std::sort(order.begin(), order.end());

  ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(k_));
  w.u32(static_cast<std::uint32_t>(params_.bucket_length));
  w.u64(params_.seed);
  w.u64(bucket_count);
  w.u64(entries_.size());
  const std::uint64_t dir_at = w.size();
  for (std::uint64_t b = 0; b < bucket_count; ++b) {
    w.u64(0);
    w.u64(0);
  }

  std::size_t cursor = 0;
  for (std::uint64_t b = 0; b < bucket_count; ++b) {
    const std::uint64_t base = align_up(w.size());
    w.pad_to(base);
    const std::uint64_t slots_at = base;
    w.pad_to(base + params_.bucket_length * 8);
    std::uint64_t prev_record = 0;
    std::uint64_t prev_slot = ~0ULL;
    for (; cursor < order.size() && std::get<0>(order[cursor]) == b; ++cursor) {
      const auto& [bucket, slot, name, id] = order[cursor];
      const std::uint64_t here = w.size();
      if (slot != prev_slot) {
        w.patch_u64(slots_at + slot * 8, here - base);
      } else {
        w.patch_u64(prev_record, here - base);
      }
      prev_slot = slot;
      prev_record = here;
      w.u64(0);
      w.str(name);
      w.u32(static_cast<std::uint32_t>(entries_[id].size()));
      for (ConceptId v : entries_[id]) w.str(g.name(v));
    }
    w.patch_u64(dir_at + b * 16, base);
    w.patch_u64(dir_at + b * 16 + 8, w.size() - base);
  }
  return std::move(w).take();
}

NeighborTable NeighborTable::deserialize(std::string_view bytes, const KnowledgeGraph& g) {
  ByteReader r(bytes);
  const Header h = read_header(r, bytes.size());
  if (!is_power_of_two(static_cast<int>(h.k))) throw StateCorruption("neighbor table: k is not a power of two");
  if (h.entry_count != g.concept_count()) {
    throw StateCorruption("neighbor table: concept count " + std::to_string(h.entry_count) +
                          " does not match graph (" + std::to_string(g.concept_count()) + ")");
  }
  NeighborTable t;
  t.k_ = static_cast<int>(h.k);
  t.params_ = BucketHashParams{h.seed, h.bucket_length};
  t.entries_.resize(g.concept_count());
  std::vector<bool> seen(g.concept_count(), false);
  std::uint64_t records = 0;
  for (const auto& [base, size] : h.buckets) {
    r.seek(base + static_cast<std::uint64_t>(h.bucket_length) * 8);
    while (r.pos() < base + size) {
      r.u64();  // chain link; records are read sequentially
      const std::string_view name = r.str();
      const auto id = g.find(name);
      if (!id) throw StateCorruption("neighbor table: unknown concept '" + std::string(name) + "'");
      if (seen[*id]) throw StateCorruption("neighbor table: duplicate record for '" + std::string(name) + "'");
      seen[*id] = true;
      const std::uint32_t n = r.u32();
      auto& out = t.entries_[*id];
      out.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::string_view nb = r.str();
        const auto nid = g.find(nb);
        if (!nid) throw StateCorruption("neighbor table: unknown concept '" + std::string(nb) + "'");
        out.push_back(*nid);
      }
      std::sort(out.begin(), out.end());
      ++records;
    }
  }
  if (records != h.entry_count) throw StateCorruption("neighbor table: record count mismatch");
  return t;
}

void NeighborTable::save(const std::filesystem::path& path, const KnowledgeGraph& g) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string bytes = serialize(g);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

NeighborTable NeighborTable::load(const std::filesystem::path& path, const KnowledgeGraph& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes, g);
}

NeighborTableImage::NeighborTableImage(std::string bytes) : bytes_(std::move(bytes)) {
  ByteReader r(bytes_);
  Header h = read_header(r, bytes_.size());
  k_ = static_cast<int>(h.k);
  bucket_length_ = h.bucket_length;
  seed_ = h.seed;
  buckets_ = std::move(h.buckets);
}

std::optional<std::vector<std::string>> NeighborTableImage::find(std::string_view name) const {
  if (name.empty()) return std::nullopt;
  const auto& [base, size] = buckets_[bucket_of(name, buckets_.size())];
  ByteReader r(bytes_);
  r.seek(base + bucket_hash(name, 0, seed_, bucket_length_) * 8);
  std::uint64_t link = r.u64();
  while (link != 0) {
    if (link >= size) throw StateCorruption("neighbor table: chain leaves bucket");
    r.seek(base + link);
    link = r.u64();
    const std::string_view rec = r.str();
    const std::uint32_t n = r.u32();
    if (rec == name) {
      std::vector<std::string> out;
      out.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) out.emplace_back(r.str());
      return out;
    }
  }
  return std::nullopt;
}

std::vector<int> decompose_threshold(int gamma) {
  if (gamma < 1) throw ParameterError("threshold must be >= 1, got " + std::to_string(gamma));
  std::vector<int> out;
  for (int bit = 30; bit >= 0; --bit) {
    if (gamma & (1 << bit)) out.push_back(1 << bit);
  }
  return out;
}

std::vector<HopPass> plan_hops(int gamma, std::span<const int> available) {
  if (gamma < 1) throw ParameterError("threshold must be >= 1, got " + std::to_string(gamma));
  std::vector<int> ks;
  for (int k : available) {
    if (k <= gamma) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<HopPass> plan;
  int r = 0;
  while (r < gamma) {
    int reach = r;
    for (int d = r + 1; d <= gamma; ++d) {
      // d is covered if some table hop k lands on it from the exact ball: d - r <= k <= d
      const bool covered = std::any_of(ks.begin(), ks.end(), [&](int k) { return k >= d - r && k <= d; });
      if (!covered) break;
      reach = d;
    }
    if (reach == r) throw ParameterError("neighbor tables cannot reach distance " + std::to_string(r + 1) + " (H_1 missing?)");
    HopPass pass{r, reach, {}};
    for (int k : ks) {
      if (k <= reach) pass.tables.push_back(k);
    }
    plan.push_back(std::move(pass));
    r = reach;
  }
  return plan;
}

const NeighborTable* TableSet::get(int k) const {
  auto it = tables_.find(k);
  return it == tables_.end() ? nullptr : it->second;
}

std::vector<int> TableSet::available() const {
  std::vector<int> out;
  for (const auto& [k, t] : tables_) out.push_back(k);
  return out;
}

std::vector<std::pair<ConceptId, int>> compose_neighbors(const TableSet& tables, ConceptId t, int gamma) {
  if (gamma < 1) throw ParameterError("threshold must be >= 1, got " + std::to_string(gamma));
  std::vector<int> missing;
  for (int k = 1; k <= gamma; k <<= 1) {
    if (!tables.get(k)) missing.push_back(k);
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing neighbor tables for k =";
    for (int k : missing) msg << ' ' << k;
    throw ParameterError(msg.str());
  }

  std::unordered_map<ConceptId, int> best{{t, 0}};
  std::vector<std::vector<ConceptId>> layers(gamma + 1);
  layers[0].push_back(t);
  for (const HopPass& pass : plan_hops(gamma, tables.available())) {
    std::vector<ConceptId> touched;
    for (int k : pass.tables) {
      const NeighborTable& table = *tables.get(k);
      for (int len = std::max(0, pass.from - k + 1); len <= std::min(pass.from, pass.to - k); ++len) {
        for (ConceptId e : layers[len]) {
          for (ConceptId u : table.at(e)) {
            auto [it, inserted] = best.try_emplace(u, len + k);
            if (inserted) {
              touched.push_back(u);
            } else if (len + k < it->second) {
              it->second = len + k;
            }
          }
        }
      }
    }
    for (ConceptId u : touched) layers[best[u]].push_back(u);
  }

  std::vector<std::pair<ConceptId, int>> out;
  for (const auto& [c, d] : best) {
    if (c != t) out.emplace_back(c, d);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return out;
}

}  // namespace schemint
