#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radlabel/csv.hpp"
#include "radlabel/error.hpp"
#include "radlabel/text.hpp"

namespace radlabel {

struct Token {
  std::string surface;
  std::string lower;
  std::size_t index = 0;
  // Byte offsets into the text the sentence was segmented from.
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Head/relation per token. Heads are 0-based token indices, or kRoot.
class DependencyGraph {
 public:
  static constexpr int kRoot = -1;

  DependencyGraph() = default;

  // Validates the single-root tree invariant; throws MalformedConllu.
  DependencyGraph(std::vector<int> heads, std::vector<std::string> relations,
                  std::vector<std::string> lemmas = {})
      : heads_(std::move(heads)), relations_(std::move(relations)), lemmas_(std::move(lemmas)) {
    validate();
  }

  std::size_t size() const { return heads_.size(); }
  int head(std::size_t i) const { return heads_[i]; }
  const std::string &relation(std::size_t i) const { return relations_[i]; }
  // Empty when the source had no lemma for this token.
  std::string_view lemma(std::size_t i) const {
    return lemmas_.empty() ? std::string_view() : std::string_view(lemmas_[i]);
  }
  const std::vector<int> &heads() const { return heads_; }
  const std::vector<std::string> &relations() const { return relations_; }

  std::size_t root() const {
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      if (heads_[i] == kRoot) return i;
    }
    return 0;
  }

  // Number of edges between token i and the root.
  std::size_t depth(std::size_t i) const {
    std::size_t d = 0;
    for (int h = heads_[i]; h != kRoot; h = heads_[static_cast<std::size_t>(h)]) ++d;
    return d;
  }

  bool operator==(const DependencyGraph &) const = default;

 private:
  void validate() const {
    const std::size_t n = heads_.size();
    if (n == 0) throw Error(ErrorCode::MalformedConllu, "empty dependency graph");
    if (relations_.size() != n || (!lemmas_.empty() && lemmas_.size() != n)) {
      throw Error(ErrorCode::MalformedConllu, "dependency graph columns differ in length");
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (heads_[i] == kRoot) {
        ++roots;
      } else if (heads_[i] < 0 || static_cast<std::size_t>(heads_[i]) >= n ||
                 static_cast<std::size_t>(heads_[i]) == i) {
        throw Error(ErrorCode::MalformedConllu,
                    "head of token " + std::to_string(i + 1) + " out of range");
      }
    }
    if (roots != 1) {
      throw Error(ErrorCode::MalformedConllu,
                  "expected exactly one ROOT, found " + std::to_string(roots));
    }
    // Every walk towards the root must terminate within n steps.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t steps = 0;
      for (int h = heads_[i]; h != kRoot; h = heads_[static_cast<std::size_t>(h)]) {
        if (++steps > n) {
          throw Error(ErrorCode::MalformedConllu,
                      "cycle through token " + std::to_string(i + 1));
        }
      }
    }
  }

  std::vector<int> heads_;
  std::vector<std::string> relations_;
  std::vector<std::string> lemmas_;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<DependencyGraph> parse;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return tokens.size(); }
};

struct ReportDocument {
  std::string report_id;
  std::string raw_text;
  std::string impression;
  std::vector<Sentence> sentences;
};

namespace detail {

// Matches `^[ \t]*<letters>[ \t]*:` at `pos`. On success returns the offset
// just past the colon and stores the word.
inline std::optional<std::size_t> match_header(std::string_view text, std::size_t pos,
                                               std::string_view &word) {
  std::size_t i = pos;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  const std::size_t w = i;
  while (i < text.size() && ((text[i] >= 'A' && text[i] <= 'Z') ||
                             (text[i] >= 'a' && text[i] <= 'z'))) {
    ++i;
  }
  if (i == w) return std::nullopt;
  word = text.substr(w, i - w);
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  if (i >= text.size() || text[i] != ':') return std::nullopt;
  return i + 1;
}

inline bool is_upper_word(std::string_view w) {
  if (w.size() < 2) return false;
  for (char c : w) {
    if (c < 'A' || c > 'Z') return false;
  }
  return true;
}

inline std::vector<std::size_t> line_starts(std::string_view text) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

// One pass of header scanning; returns [begin, end) of the impression body
// or nullopt when no impression header exists.
inline std::optional<std::pair<std::size_t, std::size_t>> impression_bounds(std::string_view text) {
  const std::vector<std::size_t> starts = line_starts(text);
  for (std::size_t l = 0; l < starts.size(); ++l) {
    std::string_view word;
    const auto body = match_header(text, starts[l], word);
    if (!body || casefold(word) != "impression") continue;
    std::size_t end = text.size();
    for (std::size_t k = l + 1; k < starts.size(); ++k) {
      std::string_view next;
      if (match_header(text, starts[k], next) && is_upper_word(next)) {
        end = starts[k];
        break;
      }
    }
    return std::pair{*body, end};
  }
  return std::nullopt;
}

}  // namespace detail

// Returns the trimmed body of the first line-initial "IMPRESSION:" section
// (header matched case-insensitively), ending at the next line-initial
// ALL-CAPS header or end of text. Without such a header the whole trimmed
// text is returned. Applied to a fixpoint, so the result is idempotent even
// when the body itself starts with another impression header.
inline std::string extract_impression(std::string_view raw_text) {
  std::string_view current = trim(raw_text);
  while (true) {
    const auto bounds = detail::impression_bounds(current);
    if (!bounds) return std::string(current);
    std::string_view next =
        trim(current.substr(bounds->first, bounds->second - bounds->first));
    if (next == current) return std::string(current);
    current = next;
  }
}

// Sentence boundary after '.', '!' or '?' when followed by whitespace or the
// end of the text. Token offsets are relative to `text`.
inline std::vector<Sentence> segment(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    current.begin = current.tokens.front().begin;
    current.end = current.tokens.back().end;
    sentences.push_back(std::move(current));
    current = Sentence{};
  };
  for (const TokenSpan &span : tokenize_spans(text)) {
    Token tok;
    tok.surface = std::string(text.substr(span.begin, span.end - span.begin));
    tok.lower = casefold(tok.surface);
    tok.index = current.tokens.size();
    tok.begin = span.begin;
    tok.end = span.end;
    current.tokens.push_back(std::move(tok));
    const bool terminator = span.end - span.begin == 1 && is_sentence_terminator(text[span.begin]);
    if (terminator && (span.end == text.size() || is_space(text[span.end]))) flush();
  }
  flush();
  return sentences;
}

inline ReportDocument make_document(std::string report_id, std::string raw_text) {
  ReportDocument doc;
  doc.report_id = std::move(report_id);
  doc.raw_text = std::move(raw_text);
  doc.impression = extract_impression(doc.raw_text);
  doc.sentences = segment(doc.impression);
  return doc;
}

struct ReportRecord {
  std::string report_id;
  std::string text;
};

// Streams `report_id,text` records from a CSV. Extra columns are ignored;
// the two named columns may appear in any order.
class ReportReader {
 public:
  explicit ReportReader(std::istream &in, std::string source = "<reports>")
      : csv_(in, std::move(source)) {
    std::vector<std::string> header;
    if (!csv_.next(header)) csv_.fail("missing header");
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == "report_id") id_col_ = i;
      if (header[i] == "text") text_col_ = i;
    }
    if (id_col_ == npos || text_col_ == npos) {
      csv_.fail("header must contain report_id and text columns");
    }
  }

  bool next(ReportRecord &record) {
    std::vector<std::string> &f = fields_;
    if (!csv_.next(f)) return false;
    if (f.size() == 1 && f[0].empty()) return next(record);  // blank line
    if (f.size() <= id_col_ || f.size() <= text_col_) csv_.fail("too few columns");
    record.report_id = std::move(f[id_col_]);
    record.text = std::move(f[text_col_]);
    return true;
  }

  std::size_t line() const { return csv_.line(); }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  csv::Reader csv_;
  std::vector<std::string> fields_;
  std::size_t id_col_ = npos;
  std::size_t text_col_ = npos;
};

}  // namespace radlabel
