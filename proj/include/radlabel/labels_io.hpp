#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "radlabel/aggregate.hpp"
#include "radlabel/csv.hpp"
#include "radlabel/error.hpp"
#include "radlabel/observation.hpp"

namespace radlabel {

inline std::vector<std::string> labels_header() {
  std::vector<std::string> h{"report_id"};
  for (Observation o : kAllObservations) h.emplace_back(name_of(o));
  return h;
}

inline std::string_view encode_label(Label l) {
  switch (l) {
    case Label::Blank: return "";
    case Label::Negative: return "0.0";
    case Label::Uncertain: return "-1.0";
    case Label::Positive: return "1.0";
  }
  return "";
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Accepts any numeric spelling of 1, 0 and -1; empty means blank.
inline std::optional<Label> decode_label(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return Label::Blank;
  const auto v = parse_double(cell);
  if (!v) return std::nullopt;
  if (*v == 1.0) return Label::Positive;
  if (*v == 0.0) return Label::Negative;
  if (*v == -1.0) return Label::Uncertain;
  return std::nullopt;
}

// Shortest round-trip decimal; integral values keep a trailing ".0".
inline std::string format_decimal(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, p);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

class LabelWriter {
 public:
  explicit LabelWriter(std::ostream &out) : out_(out) { csv::write_row(out_, labels_header()); }

  void write(const LabelVector &v) {
    std::vector<std::string> row{v.report_id};
    for (Label l : v.labels) row.emplace_back(encode_label(l));
    csv::write_row(out_, row);
  }

 private:
  std::ostream &out_;
};

// Streams label rows; the header must match labels_header() exactly.
class LabelReader {
 public:
  explicit LabelReader(std::istream &in, std::string source = "<labels>")
      : csv_(in, std::move(source)) {
    std::vector<std::string> header;
    if (!csv_.next(header)) csv_.fail("missing header");
    if (header != labels_header()) csv_.fail("unexpected labels header");
  }

  bool next(LabelVector &v) {
    if (!csv_.next(fields_)) return false;
    if (fields_.size() == 1 && fields_[0].empty()) return next(v);
    if (fields_.size() != kObservationCount + 1) {
      csv_.fail("expected " + std::to_string(kObservationCount + 1) + " columns");
    }
    v.report_id = fields_[0];
    for (std::size_t i = 0; i < kObservationCount; ++i) {
      const auto l = decode_label(fields_[i + 1]);
      if (!l) csv_.fail("bad label '" + fields_[i + 1] + "' for " + std::string(name_of(kAllObservations[i])));
      v.labels[i] = *l;
    }
    return true;
  }

  std::size_t line() const { return csv_.line(); }

 private:
  csv::Reader csv_;
  std::vector<std::string> fields_;
};

inline std::vector<LabelVector> read_labels(std::istream &in, std::string source = "<labels>") {
  LabelReader reader(in, std::move(source));
  std::vector<LabelVector> out;
  LabelVector v;
  while (reader.next(v)) out.push_back(v);
  return out;
}

inline void write_labels(std::ostream &out, const std::vector<LabelVector> &rows) {
  LabelWriter w(out);
  for (const LabelVector &v : rows) w.write(v);
}

}  // namespace radlabel
