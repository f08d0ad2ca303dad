#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "schemint/ed_join.hpp"
#include "schemint/kb_store.hpp"
#include "schemint/neighbor_table.hpp"
#include "schemint/semantic_join.hpp"
#include "schemint/text_distance.hpp"

using namespace schemint;

namespace {

std::string random_word(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> len(lo, hi), ch('a', 'j');
  std::string s(len(rng), 'a');
  for (char& c : s) c = static_cast<char>(ch(rng));
  return s;
}

// Disjoint random trees of `size` nodes named k<c>_<i>.
KnowledgeGraph forest(int components, int size) {
  std::mt19937_64 rng(7);
  KnowledgeGraphBuilder b;
  for (int c = 0; c < components; ++c) {
    const std::string p = "k" + std::to_string(c) + "_";
    for (int i = 1; i < size; ++i) {
      std::uniform_int_distribution<int> parent(std::max(0, i - 4), i - 1);
      b.add_edge(p + std::to_string(i), p + std::to_string(parent(rng)));
    }
  }
  return std::move(b).build();
}

}  // namespace

static void BM_BucketHash(benchmark::State& state) {
  const std::string name = "Natchitoches meat pie";
  for (auto _ : state) benchmark::DoNotOptimize(bucket_hash(name, 1000000, 13, 10000));
}
BENCHMARK(BM_BucketHash);

static void BM_EditDistance(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const std::string a = random_word(rng, 40, 40), b = random_word(rng, 40, 40);
  for (auto _ : state) benchmark::DoNotOptimize(edit_distance(std::string_view(a), std::string_view(b)));
}
BENCHMARK(BM_EditDistance);

static void BM_EdSelfJoin(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::set<std::string> uniq;
  while (uniq.size() < static_cast<std::size_t>(state.range(0))) uniq.insert(random_word(rng, 4, 12));
  for (auto _ : state) {
    state.PauseTiming();
    ClusterFamily f;
    for (const auto& s : uniq) f.add_singleton(s);
    state.ResumeTiming();
    benchmark::DoNotOptimize(ed_self_join(f, EdJoinParams{1, 2}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EdSelfJoin)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

// range(0): seeds (result size), range(1): components (KB size)
static void BM_SemanticJoin(benchmark::State& state) {
  const int seeds_n = static_cast<int>(state.range(0));
  const KnowledgeGraph g = forest(static_cast<int>(state.range(1)), 200);
  const NeighborTable h1 = NeighborTable::build(g, 1), h2 = NeighborTable::build(g, 2);
  TableSet tables;
  tables.add(h1);
  tables.add(h2);
  std::vector<std::string> seeds;
  AnchorMap anchors;
  for (int c = 0; c < seeds_n; ++c) {
    seeds.push_back("k" + std::to_string(c) + "_0");
    anchors[seeds.back()] = *g.find(seeds.back());
  }
  for (auto _ : state) {
    state.PauseTiming();
    ClusterFamily f;
    for (const auto& s : seeds) f.add_singleton(s);
    state.ResumeTiming();
    benchmark::DoNotOptimize(semantic_join(f, g, tables, anchors, seeds, SemanticJoinParams{4}));
  }
}
BENCHMARK(BM_SemanticJoin)->Args({200, 400})->Args({200, 800})->Args({400, 800})->Args({400, 1600});

static void BM_NeighborTableBuild(benchmark::State& state) {
  const KnowledgeGraph g = forest(static_cast<int>(state.range(0)), 200);
  for (auto _ : state) benchmark::DoNotOptimize(NeighborTable::build(g, 2));
}
BENCHMARK(BM_NeighborTableBuild)->Arg(50)->Arg(100);
BENCHMARK_MAIN();
