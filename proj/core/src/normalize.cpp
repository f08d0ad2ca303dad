#include "schemint/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>

#include "schemint/errors.hpp"
#include "schemint/text.hpp"

namespace schemint {

char rule_letter(RuleTag tag) {
  switch (tag) {
    case RuleTag::kIdentity: return 'a';
    case RuleTag::kAbbreviation: return 'b';
    case RuleTag::kWordCutting: return 'c';
    case RuleTag::kOverride: return 'd';
  }
  return 'a';
}

std::string_view to_string(RuleTag tag) {
  switch (tag) {
    case RuleTag::kIdentity: return "identity";
    case RuleTag::kAbbreviation: return "abbreviation";
    case RuleTag::kWordCutting: return "word-cutting";
    case RuleTag::kOverride: return "other";
  }
  return "identity";
}

namespace {

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

template <typename F>
void read_lines(std::istream& in, const char* what, F&& f) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    if (!is_valid_utf8(line)) throw DataError(std::string(what) + " line " + std::to_string(no) + ": invalid UTF-8");
    f(line, no);
  }
}

std::pair<std::string, std::string> tab_pair(const std::string& line, const char* what, std::size_t no) {
  const auto tab = line.find('\t');
  if (tab == std::string::npos) throw DataError(std::string(what) + " line " + std::to_string(no) + ": expected two tab-separated fields");
  std::string key(trim(std::string_view(line).substr(0, tab)));
  std::string value(trim(std::string_view(line).substr(tab + 1)));
  if (key.empty() || value.empty()) throw DataError(std::string(what) + " line " + std::to_string(no) + ": empty field");
  return {std::move(key), std::move(value)};
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Pieces of one delimiter-free run split at case and digit boundaries:
// "rptDate" -> rpt|Date, "XMLFile" -> XML|File, "addr2" -> addr|2.
std::vector<std::string> camel_split(std::string_view run) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    const char p = run[i - 1], c = run[i];
    const bool lower_upper = is_lower(p) && is_upper(c);
    const bool acronym_end = is_upper(p) && is_upper(c) && i + 1 < run.size() && is_lower(run[i + 1]);
    const bool digit_edge = (is_digit(p) != is_digit(c)) && (std::isalpha(static_cast<unsigned char>(p)) || std::isalpha(static_cast<unsigned char>(c)));
    if (lower_upper || acronym_end || digit_edge) {
      out.emplace_back(run.substr(start, i - start));
      start = i;
    }
  }
  out.emplace_back(run.substr(start));
  return out;
}

// Greedy longest-prefix cut against the wordlist; empty when it fails.
std::vector<std::string> cut_words(const std::string& token, const std::set<std::string>& wordlist) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < token.size()) {
    std::size_t best = 0;
    for (std::size_t len = token.size() - pos; len > 0; --len) {
      if (wordlist.count(token.substr(pos, len))) {
        best = len;
        break;
      }
    }
    if (best == 0) return {};
    out.push_back(token.substr(pos, best));
    pos += best;
  }
  return out;
}

}  // namespace

void Dictionaries::load_abbreviations(std::istream& in) {
  read_lines(in, "abbreviations", [&](const std::string& line, std::size_t no) {
    auto [key, value] = tab_pair(line, "abbreviations", no);
    abbreviations[ascii_lower(key)] = words(ascii_lower(value));
  });
}

void Dictionaries::load_wordlist(std::istream& in) {
  read_lines(in, "wordlist", [&](const std::string& line, std::size_t) { wordlist.insert(ascii_lower(trim(line))); });
}

void Dictionaries::load_overrides(std::istream& in) {
  read_lines(in, "overrides", [&](const std::string& line, std::size_t no) {
    auto [key, value] = tab_pair(line, "overrides", no);
    overrides[key] = words(ascii_lower(value));
  });
}

TokenizedAttribute normalize_attribute(std::string_view raw, const Dictionaries& dicts) {
  if (trim(raw).empty()) throw ParameterError("attribute name is empty");
  TokenizedAttribute out;
  out.raw = std::string(raw);

  auto ov = dicts.overrides.find(out.raw);
  if (ov == dicts.overrides.end()) ov = dicts.overrides.find(ascii_lower(raw));
  if (ov != dicts.overrides.end() && !ov->second.empty()) {
    out.tokens = ov->second;
    out.rule = RuleTag::kOverride;
    out.keyword = out.tokens.front();
    return out;
  }

  bool expanded = false;
  bool cut = false;
  std::vector<std::string> pieces;
  std::string run;
  auto flush_run = [&] {
    if (run.empty()) return;
    auto parts = camel_split(run);
    if (parts.size() > 1) cut = true;
    for (auto& p : parts) pieces.push_back(ascii_lower(p));
    run.clear();
  };
  for (char c : raw) {
    if (c == ' ' || c == '\t' || c == '_' || c == '-') {
      if (c == '_' || c == '-') cut = true;
      flush_run();
    } else {
      run.push_back(c);
    }
  }
  flush_run();

  for (const auto& piece : pieces) {
    if (auto it = dicts.abbreviations.find(piece); it != dicts.abbreviations.end() && !it->second.empty()) {
      out.tokens.insert(out.tokens.end(), it->second.begin(), it->second.end());
      expanded = true;
      continue;
    }
    if (dicts.wordlist.empty() || dicts.wordlist.count(piece)) {
      out.tokens.push_back(piece);
      continue;
    }
    auto parts = cut_words(piece, dicts.wordlist);
    if (parts.size() > 1) {
      cut = true;
      out.tokens.insert(out.tokens.end(), parts.begin(), parts.end());
    } else {
      out.tokens.push_back(piece);
      out.unresolved.push_back(piece);
    }
  }
  if (out.tokens.empty()) {
    // only delimiters
    out.tokens.push_back(ascii_lower(trim(raw)));
  }
  out.rule = expanded ? RuleTag::kAbbreviation : cut ? RuleTag::kWordCutting : RuleTag::kIdentity;
  out.keyword = out.tokens.front();
  return out;
}

void KeywordCorpus::add(std::span<const std::string> tokens) {
  ++documents_;
  std::set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto& t : seen) ++df_[t];
}

std::size_t KeywordCorpus::document_frequency(const std::string& token) const {
  auto it = df_.find(token);
  return it == df_.end() ? 0 : it->second;
}

double KeywordCorpus::idf(const std::string& token) const {
  if (documents_ == 0) return 0.0;
  const std::size_t df = std::max<std::size_t>(1, document_frequency(token));
  return std::log(static_cast<double>(documents_) / static_cast<double>(df));
}

std::vector<double> tf_idf(std::span<const std::string> tokens, const KeywordCorpus& corpus) {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto n = std::count(tokens.begin(), tokens.end(), t);
    out.push_back(static_cast<double>(n) / static_cast<double>(tokens.size()) * corpus.idf(t));
  }
  return out;
}

std::string select_keyword(std::span<const std::string> tokens, const KeywordCorpus& corpus) {
  if (tokens.empty()) throw ParameterError("select_keyword: empty token list");
  const auto scores = tf_idf(tokens, corpus);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return tokens[best];
}

}  // namespace schemint
