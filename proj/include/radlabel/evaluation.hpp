#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "radlabel/aggregate.hpp"
#include "radlabel/csv.hpp"
#include "radlabel/error.hpp"
#include "radlabel/labels_io.hpp"
#include "radlabel/observation.hpp"

namespace radlabel {

enum class Task { Mention, Negation, Uncertainty };

inline constexpr std::array<Task, 3> kAllTasks = {Task::Mention, Task::Negation, Task::Uncertainty};

constexpr std::string_view task_name(Task t) {
  switch (t) {
    case Task::Mention: return "mention";
    case Task::Negation: return "negation";
    case Task::Uncertainty: return "uncertainty";
  }
  return "";
}

// Gold rows share the prediction row layout.
using GoldAnnotation = LabelVector;

// Mention: any assigned label; negation: 0; uncertainty: u.
constexpr bool binarize(Label label, Task task) {
  switch (task) {
    case Task::Mention: return label != Label::Blank;
    case Task::Negation: return label == Label::Negative;
    case Task::Uncertainty: return label == Label::Uncertain;
  }
  return false;
}

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts &) const = default;
};

// 2tp / (2tp + fp + fn); undefined when all three counts are zero.
inline std::optional<double> f1_score(const ConfusionCounts &c) {
  const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

struct MetricReport {
  Task task = Task::Mention;
  std::array<ConfusionCounts, kObservationCount> counts{};
  std::array<std::optional<double>, kObservationCount> f1{};
  std::optional<double> macro;  // mean of defined per-observation F1
  std::optional<double> micro;  // F1 of counts pooled over all observations
  ConfusionCounts pooled;
};

inline MetricReport f1_report(std::span<const LabelVector> pred, std::span<const GoldAnnotation> gold,
                              Task task) {
  std::unordered_map<std::string_view, const GoldAnnotation *> by_id;
  for (const GoldAnnotation &g : gold) {
    if (!by_id.emplace(g.report_id, &g).second) {
      throw Error(ErrorCode::ReportIdMismatch, "duplicate gold report_id " + g.report_id);
    }
  }
  if (pred.size() != gold.size()) {
    throw Error(ErrorCode::ReportIdMismatch,
                std::to_string(pred.size()) + " predicted vs " + std::to_string(gold.size()) +
                    " gold reports");
  }
  MetricReport r;
  r.task = task;
  std::unordered_map<std::string_view, bool> used;
  for (const LabelVector &p : pred) {
    const auto it = by_id.find(p.report_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::ReportIdMismatch, "report_id " + p.report_id + " missing from gold");
    }
    if (!used.emplace(p.report_id, true).second) {
      throw Error(ErrorCode::ReportIdMismatch, "duplicate predicted report_id " + p.report_id);
    }
    const GoldAnnotation &g = *it->second;
    for (std::size_t o = 0; o < kObservationCount; ++o) {
      const bool yp = binarize(p.labels[o], task);
      const bool yg = binarize(g.labels[o], task);
      if (yp && yg) ++r.counts[o].tp;
      if (yp && !yg) ++r.counts[o].fp;
      if (!yp && yg) ++r.counts[o].fn;
    }
  }
  double sum = 0;
  std::size_t defined = 0;
  for (std::size_t o = 0; o < kObservationCount; ++o) {
    r.f1[o] = f1_score(r.counts[o]);
    r.pooled += r.counts[o];
    if (r.f1[o]) {
      sum += *r.f1[o];
      ++defined;
    }
  }
  if (defined) r.macro = sum / static_cast<double>(defined);
  r.micro = f1_score(r.pooled);
  return r;
}

inline std::string format_metric(const std::optional<double> &v, int precision = 3) {
  if (!v) return "N/A";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

// CSV records: one per observation per task, then macro and micro rows.
inline void write_metric_csv(std::ostream &out, std::span<const MetricReport> reports) {
  csv::write_row(out, std::vector<std::string>{"task", "observation", "tp", "fp", "fn", "f1"});
  auto cell = [](const std::optional<double> &v) { return v ? format_decimal(*v) : std::string("N/A"); };
  for (const MetricReport &r : reports) {
    const std::string task(task_name(r.task));
    for (std::size_t o = 0; o < kObservationCount; ++o) {
      const ConfusionCounts &c = r.counts[o];
      csv::write_row(out, std::vector<std::string>{task, std::string(name_of(kAllObservations[o])),
                                                   std::to_string(c.tp), std::to_string(c.fp),
                                                   std::to_string(c.fn), cell(r.f1[o])});
    }
    csv::write_row(out, std::vector<std::string>{task, "Macro-average", "", "", "", cell(r.macro)});
    csv::write_row(out, std::vector<std::string>{task, "Micro-average", std::to_string(r.pooled.tp),
                                                 std::to_string(r.pooled.fp),
                                                 std::to_string(r.pooled.fn), cell(r.micro)});
  }
}

// Observations as rows, one F1 column per task.
inline void write_metric_table(std::ostream &out, std::span<const MetricReport> reports) {
  constexpr int kNameWidth = 28;
  constexpr int kColWidth = 14;
  out << std::left << std::setw(kNameWidth) << "Category";
  for (const MetricReport &r : reports) {
    out << std::right << std::setw(kColWidth) << (std::string(task_name(r.task)) + " F1");
  }
  out << '\n' << std::string(kNameWidth + kColWidth * reports.size(), '-') << '\n';
  for (std::size_t o = 0; o < kObservationCount; ++o) {
    out << std::left << std::setw(kNameWidth) << name_of(kAllObservations[o]);
    for (const MetricReport &r : reports) out << std::right << std::setw(kColWidth) << format_metric(r.f1[o]);
    out << '\n';
  }
  out << std::string(kNameWidth + kColWidth * reports.size(), '-') << '\n';
  out << std::left << std::setw(kNameWidth) << "Macro-average";
  for (const MetricReport &r : reports) out << std::right << std::setw(kColWidth) << format_metric(r.macro);
  out << '\n' << std::left << std::setw(kNameWidth) << "Micro-average";
  for (const MetricReport &r : reports) out << std::right << std::setw(kColWidth) << format_metric(r.micro);
  out << '\n';
}

namespace detail {
inline void check_scores(std::span<const double> scores, const std::vector<bool> &truths) {
  if (scores.size() != truths.size()) {
    throw Error(ErrorCode::ShapeMismatch, std::to_string(scores.size()) + " scores vs " +
                                              std::to_string(truths.size()) + " truths");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error(ErrorCode::InvalidArgument, "NaN score");
  }
}
}  // namespace detail

// Mann-Whitney estimate P(s+ > s-) + P(s+ = s-)/2, computed in one sorted
// sweep over tie groups.
inline double auroc(std::span<const double> scores, const std::vector<bool> &truths) {
  detail::check_scores(scores, truths);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::uint64_t pos = 0, neg = 0;
  std::uint64_t twice_wins = 0;  // 2 * (wins + ties/2), kept integral
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t gp = 0, gn = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (truths[order[j]]) ++gp; else ++gn;
      ++j;
    }
    twice_wins += 2 * gp * neg_below + gp * gn;
    neg_below += gn;
    pos += gp;
    neg += gn;
    i = j;
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::DegenerateClass, "AUROC needs at least one positive and one negative");
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

struct BrierScores {
  double brier = 0;
  double scaled = 0;  // 1 - brier / (p(1-p)), p = positive prevalence; higher is better
};

inline double brier_score(std::span<const double> probs, const std::vector<bool> &truths) {
  detail::check_scores(probs, truths);
  if (probs.empty()) throw Error(ErrorCode::InvalidArgument, "Brier score of an empty set");
  double sum = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0 || probs[i] > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "probability outside [0,1]");
    }
    const double d = probs[i] - (truths[i] ? 1.0 : 0.0);
    sum += d * d;
  }
  return sum / static_cast<double>(probs.size());
}

inline BrierScores brier_scores(std::span<const double> probs, const std::vector<bool> &truths) {
  BrierScores out;
  out.brier = brier_score(probs, truths);
  const auto positives = static_cast<double>(std::count(truths.begin(), truths.end(), true));
  const double prevalence = positives / static_cast<double>(truths.size());
  if (prevalence == 0.0 || prevalence == 1.0) {
    throw Error(ErrorCode::DegenerateClass, "scaled Brier score needs both classes present");
  }
  out.scaled = 1.0 - out.brier / (prevalence * (1.0 - prevalence));
  return out;
}

}  // namespace radlabel
