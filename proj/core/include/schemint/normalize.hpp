#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace schemint {

// Which transformation produced the token list. Precedence when several
// apply: override > abbreviation > word cutting > identity.
enum class RuleTag {
  kIdentity,      // a: plain words, at most case-folded
  kAbbreviation,  // b: a token was expanded
  kWordCutting,   // c: delimiters, camel case or dictionary cutting
  kOverride,      // d: manual override
};

char rule_letter(RuleTag tag);
std::string_view to_string(RuleTag tag);

struct Dictionaries {
  std::map<std::string, std::vector<std::string>> abbreviations;  // lowercased key
  std::set<std::string> wordlist;                                // lowercased
  std::map<std::string, std::vector<std::string>> overrides;      // raw name -> tokens

  // abbr<TAB>expansion per line; the expansion may hold several words.
  void load_abbreviations(std::istream& in);
  // One word per line.
  void load_wordlist(std::istream& in);
  // raw<TAB>space-separated tokens per line.
  void load_overrides(std::istream& in);
};

struct TokenizedAttribute {
  std::string raw;
  std::vector<std::string> tokens;
  RuleTag rule = RuleTag::kIdentity;
  std::string keyword;  // first token until a corpus picks one
  // Tokens that were neither dictionary words nor cuttable; kept verbatim.
  std::vector<std::string> unresolved;

  bool flagged() const { return !unresolved.empty(); }
};

// Splits on space, underscore, hyphen and case/digit boundaries, lowercases,
// expands abbreviations and cuts unknown runs greedily (longest dictionary
// word first). An override for the raw name (exact, then lowercased) wins.
// Throws ParameterError for an empty name.
TokenizedAttribute normalize_attribute(std::string_view raw, const Dictionaries& dicts);

// Document frequencies over token lists.
class KeywordCorpus {
 public:
  void add(std::span<const std::string> tokens);
  std::size_t size() const { return documents_; }
  std::size_t document_frequency(const std::string& token) const;
  // ln(N / df); an unseen token counts as df = 1. Zero for an empty corpus.
  double idf(const std::string& token) const;

 private:
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

// tf * idf per token position, tf = occurrences / |tokens|.
std::vector<double> tf_idf(std::span<const std::string> tokens, const KeywordCorpus& corpus);

// Highest tf-idf token, earliest on ties. Throws ParameterError when empty.
std::string select_keyword(std::span<const std::string> tokens, const KeywordCorpus& corpus);

}  // namespace schemint
