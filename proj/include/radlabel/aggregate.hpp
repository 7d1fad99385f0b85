#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "radlabel/classify.hpp"
#include "radlabel/error.hpp"
#include "radlabel/mentions.hpp"
#include "radlabel/observation.hpp"
#include "radlabel/report.hpp"
#include "radlabel/rules.hpp"

namespace radlabel {

// Declared in precedence order: blank < 0 < u < 1.
enum class Label { Blank, Negative, Uncertain, Positive };

using Labels = std::array<Label, kObservationCount>;

inline Labels blank_labels() {
  Labels l;
  l.fill(Label::Blank);
  return l;
}

struct LabelVector {
  std::string report_id;
  Labels labels = blank_labels();

  Label operator[](Observation o) const { return labels[index_of(o)]; }
  Label &operator[](Observation o) { return labels[index_of(o)]; }

  bool operator==(const LabelVector &) const = default;
};

inline Label to_label(MentionLabel m) {
  switch (m) {
    case MentionLabel::Positive: return Label::Positive;
    case MentionLabel::Negative: return Label::Negative;
    case MentionLabel::Uncertain: return Label::Uncertain;
  }
  return Label::Blank;
}

// Per observation, the highest-precedence class among its mentions
// (1 > u > 0 > blank). No Finding is left blank; see derive_no_finding.
inline Labels aggregate(const std::vector<Mention> &mentions) {
  Labels out = blank_labels();
  for (const Mention &m : mentions) {
    if (!m.cls) {
      throw Error(ErrorCode::UnclassifiedMention,
                  std::string(name_of(m.observation)) + " mention in sentence " +
                      std::to_string(m.sentence_index) + " has no class");
    }
    if (is_derived(m.observation)) continue;
    Label &slot = out[index_of(m.observation)];
    slot = std::max(slot, to_label(m.cls->value));
  }
  return out;
}

// 1 when no pathology is 1 or u, otherwise blank. Support Devices and the
// No Finding slot itself are ignored.
inline Label derive_no_finding(const Labels &labels) {
  for (Observation o : kAllObservations) {
    if (!is_pathology(o)) continue;
    const Label l = labels[index_of(o)];
    if (l == Label::Positive || l == Label::Uncertain) return Label::Blank;
  }
  return Label::Positive;
}

inline LabelVector label_study(const ReportDocument &doc, const RuleSet &rules) {
  const std::vector<Mention> mentions = classify_mentions(extract_mentions(doc, rules), doc, rules);
  LabelVector v{doc.report_id, aggregate(mentions)};
  v[Observation::NoFinding] = derive_no_finding(v.labels);
  return v;
}

}  // namespace radlabel
