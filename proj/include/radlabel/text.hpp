#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace radlabel {

// ASCII-only classification; bytes >= 0x80 (UTF-8 continuation and lead
// bytes) are always word characters.
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 0x21 && u <= 0x2f) || (u >= 0x3a && u <= 0x40) ||
         (u >= 0x5b && u <= 0x60) || (u >= 0x7b && u <= 0x7e);
}

inline bool is_sentence_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

inline std::string casefold(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace; every ASCII punctuation character becomes a token
// of its own. Spans are byte offsets into `text`.
inline std::vector<TokenSpan> tokenize_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
    } else if (is_punct(text[i])) {
      spans.push_back({i, i + 1});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !is_space(text[j]) && !is_punct(text[j])) ++j;
      spans.push_back({i, j});
      i = j;
    }
  }
  return spans;
}

// Case-folded token strings, as used for phrases and rule literals.
inline std::vector<std::string> tokenize_folded(std::string_view text) {
  std::vector<std::string> out;
  for (const TokenSpan &s : tokenize_spans(text)) {
    out.push_back(casefold(text.substr(s.begin, s.end - s.begin)));
  }
  return out;
}

inline std::string join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace radlabel
