#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "radlabel/error.hpp"

namespace radlabel::csv {

// RFC 4180 record reader. Quoted fields may span lines; "" inside quotes is
// a literal quote; CRLF and LF line endings are both accepted. A leading
// UTF-8 byte-order mark is dropped.
class Reader {
 public:
  explicit Reader(std::istream &in, std::string source = "<csv>")
      : in_(in), source_(std::move(source)) {}

  // Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string> &fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    if (first_) {
      first_ = false;
      if (c == 0xEF) {
        if (in_.get() != 0xBB || in_.get() != 0xBF) fail("invalid byte-order mark");
        c = in_.get();
        if (c == EOF) return false;
      }
    }
    ++line_;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    while (true) {
      if (quoted) {
        if (c == EOF) fail("unterminated quoted field");
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field += '"';
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line_;
          field += static_cast<char>(c);
        }
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '\n' || c == EOF) {
        break;
      } else if (c == '\r') {
        if (in_.peek() == '\n') {
          in_.get();
          break;
        }
        fail("bare carriage return");
      } else if (c == '"') {
        if (!field.empty() || after_quote) fail("quote inside unquoted field");
        quoted = true;
      } else {
        if (after_quote) fail("text after closing quote");
        field += static_cast<char>(c);
      }
      c = in_.get();
    }
    fields.push_back(std::move(field));
    return true;
  }

  // Line on which the most recently returned record started (1-based).
  std::size_t line() const { return record_line_; }
  const std::string &source() const { return source_; }

  [[noreturn]] void fail(const std::string &what) const {
    throw Error(ErrorCode::MalformedCsv,
                source_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::istream &in_;
  std::string source_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

inline bool needs_quoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void write_field(std::ostream &out, std::string_view field) {
  if (!needs_quoting(field)) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

template <typename Range>
void write_row(std::ostream &out, const Range &fields) {
  bool first = true;
  for (const auto &f : fields) {
    if (!first) out << ',';
    first = false;
    write_field(out, std::string_view(f));
  }
  out << '\n';
}

}  // namespace radlabel::csv
