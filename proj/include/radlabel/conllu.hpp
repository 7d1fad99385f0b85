#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ranges>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "radlabel/error.hpp"
#include "radlabel/report.hpp"
#include "radlabel/text.hpp"

namespace radlabel {

// One CoNLL-U sentence block plus its alignment metadata.
struct ConlluBlock {
  std::string report_id;
  std::size_t sent_index = 0;
  std::vector<std::string> forms;
  DependencyGraph graph;
  std::size_t line = 0;  // first line of the block, for diagnostics
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// "# key = value" → value, when the key matches.
inline std::optional<std::string_view> comment_value(std::string_view line, std::string_view key) {
  std::string_view rest = trim(line.substr(1));
  if (rest.substr(0, key.size()) != key) return std::nullopt;
  rest = trim(rest.substr(key.size()));
  if (rest.empty() || rest.front() != '=') return std::nullopt;
  return trim(rest.substr(1));
}

}  // namespace detail

// Sequential block reader. Columns used: ID, FORM, LEMMA, HEAD, DEPREL.
// Multiword-token ranges ("3-4") and empty nodes ("3.1") are skipped.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream &in, std::string source = "<conllu>")
      : in_(in), source_(std::move(source)) {}

  std::optional<ConlluBlock> next() {
    std::optional<std::string> report_id;
    std::optional<std::size_t> sent_index;
    std::vector<std::string> forms, lemmas, relations;
    std::vector<int> heads;
    std::size_t first_line = 0;
    bool any_lemma = false;
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) {
        if (first_line == 0) continue;
        break;
      }
      if (first_line == 0) first_line = line_;
      if (line.front() == '#') {
        if (auto v = detail::comment_value(line, "report_id")) report_id = std::string(*v);
        if (auto v = detail::comment_value(line, "sent_index")) {
          const auto n = detail::parse_long(*v);
          if (!n || *n < 0) fail("bad sent_index '" + std::string(*v) + "'");
          sent_index = static_cast<std::size_t>(*n);
        }
        continue;
      }
      const auto cols = detail::split_tabs(line);
      if (cols.size() != 10) fail("expected 10 columns, found " + std::to_string(cols.size()));
      if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
      const auto id = detail::parse_long(cols[0]);
      if (!id || *id != static_cast<long>(forms.size()) + 1) {
        fail("token ID '" + std::string(cols[0]) + "' out of sequence");
      }
      const auto head = detail::parse_long(cols[6]);
      if (!head || *head < 0) fail("bad HEAD '" + std::string(cols[6]) + "'");
      forms.emplace_back(cols[1]);
      if (cols[2] != "_" && !cols[2].empty()) any_lemma = true;
      lemmas.push_back(cols[2] == "_" ? std::string() : casefold(cols[2]));
      heads.push_back(static_cast<int>(*head) - 1);
      relations.emplace_back(cols[7]);
    }
    if (first_line == 0) return std::nullopt;
    if (forms.empty()) fail_at(first_line, "block has no token rows");
    if (!report_id) fail_at(first_line, "block lacks '# report_id = ...'");
    if (!sent_index) fail_at(first_line, "block lacks '# sent_index = ...'");
    for (int h : heads) {
      if (h >= static_cast<int>(forms.size())) fail_at(first_line, "HEAD beyond block length");
    }
    ConlluBlock block;
    block.report_id = std::move(*report_id);
    block.sent_index = *sent_index;
    block.forms = std::move(forms);
    block.line = first_line;
    if (!any_lemma) lemmas.clear();
    try {
      block.graph = DependencyGraph(std::move(heads), std::move(relations), std::move(lemmas));
    } catch (const Error &e) {
      fail_at(first_line, e.what());
    }
    return block;
  }

 private:
  [[noreturn]] void fail(const std::string &what) const { fail_at(line_, what); }
  [[noreturn]] void fail_at(std::size_t line, const std::string &what) const {
    throw Error(ErrorCode::MalformedConllu, source_ + ":" + std::to_string(line) + ": " + what);
  }

  std::istream &in_;
  std::string source_;
  std::size_t line_ = 0;
};

inline std::vector<ConlluBlock> read_conllu(std::istream &in, std::string source = "<conllu>") {
  ConlluReader reader(in, std::move(source));
  std::vector<ConlluBlock> blocks;
  while (auto b = reader.next()) blocks.push_back(std::move(*b));
  return blocks;
}

// Attaches every block whose report_id matches the document. Sentences
// without a block keep no parse. Tokens are never modified.
template <std::ranges::input_range Blocks>
ReportDocument attach_parses(ReportDocument doc, const Blocks &blocks) {
  std::vector<bool> seen(doc.sentences.size(), false);
  for (const ConlluBlock &b : blocks) {
    if (b.report_id != doc.report_id) continue;
    const std::string where = "report " + doc.report_id + " sentence " + std::to_string(b.sent_index);
    if (b.sent_index >= doc.sentences.size()) {
      throw Error(ErrorCode::TokenCountMismatch,
                  where + ": report has only " + std::to_string(doc.sentences.size()) +
                      " sentences");
    }
    if (seen[b.sent_index]) throw Error(ErrorCode::MalformedConllu, where + ": duplicate block");
    seen[b.sent_index] = true;
    Sentence &s = doc.sentences[b.sent_index];
    if (b.graph.size() != s.size()) {
      throw Error(ErrorCode::TokenCountMismatch,
                  where + ": block has " + std::to_string(b.graph.size()) +
                      " rows, sentence has " + std::to_string(s.size()) + " tokens");
    }
    s.parse = b.graph;
  }
  return doc;
}

inline ReportDocument attach_parses(ReportDocument doc, std::istream &conllu) {
  return attach_parses(std::move(doc), read_conllu(conllu));
}

// Blocks grouped by report for corpus-scale lookup.
class ConlluIndex {
 public:
  ConlluIndex() = default;

  explicit ConlluIndex(std::istream &in, std::string source = "<conllu>") {
    ConlluReader reader(in, std::move(source));
    while (auto b = reader.next()) by_report_[b->report_id].push_back(std::move(*b));
  }

  ReportDocument attach(ReportDocument doc) const {
    const auto it = by_report_.find(doc.report_id);
    if (it == by_report_.end()) return doc;
    return attach_parses(std::move(doc), it->second);
  }

  std::size_t report_count() const { return by_report_.size(); }

 private:
  std::unordered_map<std::string, std::vector<ConlluBlock>> by_report_;
};

}  // namespace radlabel
