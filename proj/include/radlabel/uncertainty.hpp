#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "radlabel/aggregate.hpp"
#include "radlabel/error.hpp"
#include "radlabel/grid.hpp"

namespace radlabel {

using LabelMatrix = Grid<Label>;

inline LabelMatrix to_label_matrix(std::span<const LabelVector> rows) {
  LabelMatrix m(rows.size(), kObservationCount, Label::Blank);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < kObservationCount; ++c) m(r, c) = rows[r].labels[c];
  }
  return m;
}

enum class Policy { Ignore, Zeros, Ones, SelfTrained, MultiClass };

constexpr std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::Ignore: return "ignore";
    case Policy::Zeros: return "zeros";
    case Policy::Ones: return "ones";
    case Policy::SelfTrained: return "selftrain";
    case Policy::MultiClass: return "multiclass";
  }
  return "";
}

enum class ThreeClass { Negative = 0, Positive = 1, Uncertain = 2 };

// Binary policies produce hard or soft targets; MultiClass produces class
// ids. Masked cells hold NaN (binary) or Negative (three-class).
struct PolicyOutput {
  Policy policy = Policy::Ignore;
  std::variant<Grid<double>, Grid<ThreeClass>> targets;
  Grid<bool> mask;  // true = contributes to the loss

  const Grid<double> &binary() const { return std::get<Grid<double>>(targets); }
  const Grid<ThreeClass> &classes() const { return std::get<Grid<ThreeClass>>(targets); }
};

inline constexpr double kMaskedTarget = std::numeric_limits<double>::quiet_NaN();

// ignore: u and blank masked; zeros/ones: u mapped to 0/1; multiclass: u is
// its own class. Blank cells are masked under every policy.
inline PolicyOutput apply_policy(const LabelMatrix &labels, Policy policy) {
  if (policy == Policy::SelfTrained) {
    throw Error(ErrorCode::InvalidArgument, "selftrain needs predictions; use apply_selftrain");
  }
  PolicyOutput out;
  out.policy = policy;
  out.mask = Grid<bool>(labels.rows(), labels.cols(), false);
  if (policy == Policy::MultiClass) {
    Grid<ThreeClass> t(labels.rows(), labels.cols(), ThreeClass::Negative);
    for (std::size_t r = 0; r < labels.rows(); ++r) {
      for (std::size_t c = 0; c < labels.cols(); ++c) {
        switch (labels(r, c)) {
          case Label::Blank: continue;
          case Label::Negative: t(r, c) = ThreeClass::Negative; break;
          case Label::Positive: t(r, c) = ThreeClass::Positive; break;
          case Label::Uncertain: t(r, c) = ThreeClass::Uncertain; break;
        }
        out.mask(r, c) = true;
      }
    }
    out.targets = std::move(t);
    return out;
  }
  Grid<double> t(labels.rows(), labels.cols(), kMaskedTarget);
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      switch (labels(r, c)) {
        case Label::Blank: continue;
        case Label::Negative: t(r, c) = 0.0; break;
        case Label::Positive: t(r, c) = 1.0; break;
        case Label::Uncertain:
          if (policy == Policy::Ignore) continue;
          t(r, c) = policy == Policy::Ones ? 1.0 : 0.0;
          break;
      }
      out.mask(r, c) = true;
    }
  }
  out.targets = std::move(t);
  return out;
}

// One-shot relabel: u cells take the model's probability, 0/1 cells are
// kept, blank cells are masked.
inline PolicyOutput apply_selftrain(const LabelMatrix &labels, const Grid<double> &preds) {
  if (!labels.same_shape(preds)) {
    throw Error(ErrorCode::ShapeMismatch, "predictions " + std::to_string(preds.rows()) + "x" +
                                              std::to_string(preds.cols()) + " vs labels " +
                                              std::to_string(labels.rows()) + "x" +
                                              std::to_string(labels.cols()));
  }
  PolicyOutput out = apply_policy(labels, Policy::Zeros);
  out.policy = Policy::SelfTrained;
  auto &t = std::get<Grid<double>>(out.targets);
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      if (labels(r, c) != Label::Uncertain) continue;
      const double p = preds(r, c);
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "prediction outside [0,1]");
      t(r, c) = p;
    }
  }
  return out;
}

inline constexpr double kProbabilityEpsilon = 1e-7;

enum class Reduction { Sum, Mean };

// Binary cross-entropy over unmasked cells with predictions clamped to
// [eps, 1 - eps]. Targets may be soft. Mean divides by the unmasked count.
inline double masked_bce(const Grid<double> &targets, const Grid<bool> &mask, const Grid<double> &preds,
                         Reduction reduction = Reduction::Sum) {
  if (!targets.same_shape(mask) || !targets.same_shape(preds)) {
    throw Error(ErrorCode::ShapeMismatch, "targets, mask and predictions differ in shape");
  }
  double loss = 0;
  std::size_t active = 0;
  for (std::size_t r = 0; r < targets.rows(); ++r) {
    for (std::size_t c = 0; c < targets.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double t = targets(r, c);
      const double p = std::clamp(preds(r, c), kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
      loss -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
      ++active;
    }
  }
  if (reduction == Reduction::Mean) return active ? loss / static_cast<double>(active) : 0.0;
  return loss;
}

inline double masked_bce(const PolicyOutput &out, const Grid<double> &preds,
                         Reduction reduction = Reduction::Sum) {
  return masked_bce(out.binary(), out.mask, preds, reduction);
}

struct ClassProbabilities {
  double negative = 0;   // p0
  double positive = 0;   // p1
  double uncertain = 0;  // pu
};

inline constexpr double kTripleSumTolerance = 1e-9;

// p1 / (p0 + p1): the positive probability after a softmax restricted to
// the negative and positive classes.
inline double multiclass_positive_probability(double p0, double p1, double pu) {
  for (double p : {p0, p1, pu}) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "class probability outside [0,1]");
  }
  if (std::abs(p0 + p1 + pu - 1.0) > kTripleSumTolerance) {
    throw Error(ErrorCode::InvalidArgument, "class probabilities do not sum to 1");
  }
  if (p0 + p1 == 0.0) throw Error(ErrorCode::DegenerateTriple, "p0 + p1 = 0");
  return p1 / (p0 + p1);
}

inline double multiclass_positive_probability(const ClassProbabilities &p) {
  return multiclass_positive_probability(p.negative, p.positive, p.uncertain);
}

// Elementwise maximum across views of the same study.
inline std::vector<double> combine_views(std::span<const std::vector<double>> views) {
  if (views.empty()) throw Error(ErrorCode::EmptyViews, "no views to combine");
  std::vector<double> out = views.front();
  for (const std::vector<double> &v : views.subspan(1)) {
    if (v.size() != out.size()) throw Error(ErrorCode::ShapeMismatch, "views differ in length");
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(out[i], v[i]);
  }
  return out;
}

}  // namespace radlabel
