#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schemint/errors.hpp"
#include "schemint/pipeline.hpp"
#include "schemint/text.hpp"

namespace fs = std::filesystem;
using namespace schemint;

namespace {

struct Options {
  IntegrationParams params;
  std::string abbrev, wordlist, overrides;

  std::string edges, out, kb_dir, state, input;
  std::vector<int> tables{1, 2};
  std::uint64_t seed = 13;
  std::uint64_t bucket_length = 10000;
  std::string concept_name;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

Dictionaries load_dictionaries(const Options& o) {
  Dictionaries d;
  if (!o.abbrev.empty()) {
    auto in = open_input(o.abbrev);
    d.load_abbreviations(in);
  }
  if (!o.wordlist.empty()) {
    auto in = open_input(o.wordlist);
    d.load_wordlist(in);
  }
  if (!o.overrides.empty()) {
    auto in = open_input(o.overrides);
    d.load_overrides(in);
  }
  return d;
}

std::vector<Schema> load_schemas(const std::string& path) {
  auto in = open_input(path);
  return read_schemas(in);
}

void print_report(const IntegrationReport& r) {
  std::cout << "attributes seen: " << r.attributes_seen << "\n"
            << "attributes added: " << r.attributes_new << "\n"
            << "literal merges: " << r.ed_merges << "\n"
            << "semantic merges: " << r.semantic_merges << "\n"
            << "held for review: " << r.gated << "\n"
            << "clusters split: " << r.clusters_split << "\n";
  for (const auto& e : r.normalization_errors) std::cerr << "normalize: " << e << "\n";
  for (const auto& a : r.kb_absent) std::cerr << "not in knowledge base: " << a << "\n";
}

std::string kb_for(const Options& o, const IntegrationState& st) {
  if (!o.kb_dir.empty()) return o.kb_dir;
  if (st.kb.empty()) throw ParameterError("state has no knowledge base path; pass --kb");
  return st.kb;
}

int run_kb_build(const Options& o) {
  auto in = open_input(o.edges);
  const KnowledgeBase kb = KnowledgeBase::build(in, o.tables, BucketHashParams{o.seed, o.bucket_length}, o.params.q);
  kb.save(o.out);
  const IngestReport& r = kb.ingest_report();
  for (const auto& rej : r.rejects) std::cerr << o.edges << ":" << rej.line << ": " << rej.reason << "\n";
  std::cout << "concepts: " << kb.graph().concept_count() << "\n"
            << "edges: " << kb.graph().edge_count() << "\n"
            << "duplicates dropped: " << r.duplicates << "\n"
            << "self-loops dropped: " << r.self_loops << "\n"
            << "lines rejected: " << r.rejects.size() << "\n"
            << "tables:";
  for (int k : kb.table_hops()) std::cout << " H" << k;
  std::cout << "\n";
  return 0;
}

int run_kb_neighbors(const Options& o) {
  const KnowledgeBase kb = KnowledgeBase::load(o.kb_dir);
  const auto id = kb.graph().find(o.concept_name);
  if (!id) throw NotFound("concept not in knowledge base: " + o.concept_name);
  if (o.params.gamma < 1) throw ParameterError("gamma must be >= 1");
  auto ball = bfs_ball(kb.graph(), *id, o.params.gamma);
  std::sort(ball.begin(), ball.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return kb.graph().name(a.first) < kb.graph().name(b.first);
  });
  for (const auto& [c, d] : ball) {
    if (c != *id) std::cout << d << "\t" << kb.graph().name(c) << "\n";
  }
  return 0;
}

int run_batch(const Options& o) {
  if (o.kb_dir.empty()) throw ParameterError("--kb is required");
  const KnowledgeBase kb = KnowledgeBase::load(o.kb_dir);
  const auto schemas = load_schemas(o.input);
  IntegrationReport rep;
  IntegrationState st = batch_integrate(schemas, o.params, kb, load_dictionaries(o), &rep);
  st.kb = o.kb_dir;
  save_state(st, o.out);
  print_report(rep);
  std::cout << "clusters: " << st.family.size() << "\n";
  return 0;
}

void apply_overrides(IntegrationParams& p, const Options& o, const CLI::App& app) {
  if (app.count("--epsilon-t")) p.epsilon_t = o.params.epsilon_t;
  if (app.count("--gamma")) p.gamma = o.params.gamma;
  if (app.count("--beta")) p.beta = o.params.beta;
  if (app.count("--q")) p.q = o.params.q;
  if (app.count("--frontier-cap")) p.frontier_cap = o.params.frontier_cap;
}

int run_add(const Options& o, const CLI::App& app) {
  IntegrationState st = load_state(o.state);
  apply_overrides(st.params, o, app);
  if (!o.kb_dir.empty()) st.kb = o.kb_dir;
  const KnowledgeBase kb = KnowledgeBase::load(kb_for(o, st));
  const auto schemas = load_schemas(o.input);
  const IntegrationReport rep = incremental_integrate(st, schemas, kb, load_dictionaries(o));
  save_state(st, o.state);
  print_report(rep);
  std::cout << "clusters: " << st.family.size() << "\n";
  return 0;
}

int run_resolve(const Options& o, const CLI::App& app) {
  IntegrationState st = load_state(o.state);
  apply_overrides(st.params, o, app);
  const KnowledgeBase kb = KnowledgeBase::load(kb_for(o, st));
  const ResolveReport r = resolve_state(st, kb);
  save_state(st, o.state);
  std::cout << "clusters examined: " << r.examined << "\n"
            << "clusters split: " << r.split << "\n"
            << "clusters: " << st.family.size() << "\n";
  return 0;
}

int run_review_export(const Options& o) {
  const IntegrationState st = load_state(o.state);
  std::ofstream out(o.out, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + o.out);
  st.review.export_pending(out);
  std::cout << "pending items: " << st.review.pending().size() << "\n";
  return 0;
}

int run_review_import(const Options& o) {
  IntegrationState st = load_state(o.state);
  const KnowledgeBase kb = KnowledgeBase::load(kb_for(o, st));
  auto in = open_input(o.input);
  const ImportReport r = apply_review_decisions(st, in, kb);
  save_state(st, o.state);
  for (const auto& id : r.unknown) std::cerr << "unknown review id, skipped: " << id << "\n";
  for (const auto& id : r.conflicts) std::cerr << "already decided, skipped: " << id << "\n";
  std::cout << "accepted: " << r.accepted.size() << "\n"
            << "rejected: " << r.rejected.size() << "\n"
            << "clusters: " << st.family.size() << "\n";
  return 0;
}

int run_normalize(const Options& o) {
  const Dictionaries dicts = load_dictionaries(o);
  auto in = open_input(o.input);
  std::vector<TokenizedAttribute> attrs;
  KeywordCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    attrs.push_back(normalize_attribute(line, dicts));
    corpus.add(attrs.back().tokens);
  }
  for (auto& a : attrs) {
    a.keyword = select_keyword(a.tokens, corpus);
    std::cout << a.raw << "\t";
    for (std::size_t i = 0; i < a.tokens.size(); ++i) std::cout << (i ? " " : "") << a.tokens[i];
    std::cout << "\t" << rule_letter(a.rule) << "\t" << a.keyword;
    if (a.flagged()) std::cout << "\tunresolved";
    std::cout << "\n";
  }
  return 0;
}

int run_stats(const Options& o) {
  const IntegrationState st = load_state(o.state);
  const FamilyStats s = family_stats(st.family);
  std::cout << "clusters: " << s.clusters << "\n"
            << "attributes: " << s.attributes << "\n"
            << "overlapping cluster pairs: " << s.overlapping_pairs << "\n"
            << "shared attributes: " << s.shared_attributes << "\n"
            << "pending reviews: " << st.review.pending().size() << "\n"
            << "cluster sizes:\n";
  for (const auto& [size, n] : s.size_histogram) std::cout << "  " << size << ": " << n << "\n";
  std::cout << "frontier sizes:\n";
  for (const auto& [size, n] : s.frontier_histogram) std::cout << "  " << size << ": " << n << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"schemint: attribute-name integration over a knowledge graph"};
  app.set_config("--config", "", "flat key = value file mirroring flag names");
  app.require_subcommand(1);
  Options o;

  app.add_option("--epsilon-t", o.params.epsilon_t, "edit-distance threshold")->capture_default_str();
  app.add_option("--gamma", o.params.gamma, "path-length threshold")->capture_default_str();
  app.add_option("--beta", o.params.beta, "resolve tolerance")->capture_default_str();
  app.add_option("--q", o.params.q, "gram length")->capture_default_str();
  app.add_option("--frontier-cap", o.params.frontier_cap, "1-hop frontier cap for insertions")->capture_default_str();
  app.add_option("--abbrev", o.abbrev, "abbreviation TSV");
  app.add_option("--wordlist", o.wordlist, "newline-delimited wordlist");
  app.add_option("--overrides", o.overrides, "override TSV");

  auto* kb = app.add_subcommand("kb", "knowledge-base artifacts")->require_subcommand(1)->fallthrough();
  auto* kb_build = kb->add_subcommand("build", "ingest edges and write neighbor tables")->fallthrough();
  kb_build->add_option("edges", o.edges, "six-field edge TSV")->required();
  kb_build->add_option("--out", o.out, "output directory")->required();
  kb_build->add_option("--tables", o.tables, "hop counts to materialize")->delimiter(',')->capture_default_str();
  kb_build->add_option("--seed", o.seed, "bucket hash seed")->capture_default_str();
  kb_build->add_option("--bucket-length", o.bucket_length, "slots per bucket")->capture_default_str();
  auto* kb_nb = kb->add_subcommand("neighbors", "print the ball of radius gamma around a concept")->fallthrough();
  kb_nb->add_option("concept", o.concept_name)->required();
  kb_nb->add_option("--kb", o.kb_dir, "knowledge-base directory")->required();

  auto* integ = app.add_subcommand("integrate", "run an integration")->require_subcommand(1)->fallthrough();
  auto* batch = integ->add_subcommand("batch", "integrate a schema corpus from scratch")->fallthrough();
  batch->add_option("schemas", o.input, "schema JSONL")->required();
  batch->add_option("--kb", o.kb_dir, "knowledge-base directory")->required();
  batch->add_option("--out", o.out, "state file to write")->required();
  auto* add = integ->add_subcommand("add", "insert schemas into an existing state")->fallthrough();
  add->add_option("schemas", o.input, "schema JSONL")->required();
  add->add_option("--state", o.state, "state file, updated in place")->required();
  add->add_option("--kb", o.kb_dir, "knowledge-base directory (default: from state)");

  auto* res = app.add_subcommand("resolve", "re-run cluster splitting")->fallthrough();
  res->add_option("--state", o.state)->required();
  res->add_option("--kb", o.kb_dir, "knowledge-base directory (default: from state)");

  auto* review = app.add_subcommand("review", "manual verification queue")->require_subcommand(1)->fallthrough();
  auto* rexp = review->add_subcommand("export", "write pending items")->fallthrough();
  rexp->add_option("--state", o.state)->required();
  rexp->add_option("--out", o.out)->required();
  auto* rimp = review->add_subcommand("import", "apply verdicts")->fallthrough();
  rimp->add_option("decisions", o.input, "decisions JSONL")->required();
  rimp->add_option("--state", o.state)->required();
  rimp->add_option("--kb", o.kb_dir, "knowledge-base directory (default: from state)");

  auto* norm = app.add_subcommand("normalize", "tokenize attribute names")->fallthrough();
  norm->add_option("names", o.input, "one name per line")->required();

  auto* stats = app.add_subcommand("stats", "summarize a state file")->fallthrough();
  stats->add_option("--state", o.state)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*kb_build) return run_kb_build(o);
    if (*kb_nb) return run_kb_neighbors(o);
    if (*batch) return run_batch(o);
    if (*add) return run_add(o, app);
    if (*res) return run_resolve(o, app);
    if (*rexp) return run_review_export(o);
    if (*rimp) return run_review_import(o);
    if (*norm) return run_normalize(o);
    if (*stats) return run_stats(o);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StateCorruption& e) {
    std::cerr << "corrupt state: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
