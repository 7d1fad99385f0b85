#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <tuple>
#include <vector>

#include "radlabel/observation.hpp"
#include "radlabel/report.hpp"
#include "radlabel/rules.hpp"

namespace radlabel {

enum class MentionLabel { Positive, Negative, Uncertain };

// Identifies the rule that decided a mention's class.
struct RuleRef {
  Phase phase = Phase::Negation;
  std::size_t index = 0;  // position within the phase

  bool operator==(const RuleRef &) const = default;
};

struct MentionClass {
  MentionLabel value = MentionLabel::Positive;
  std::optional<RuleRef> deciding_rule;  // absent for the positive default

  bool operator==(const MentionClass &) const = default;
};

struct Mention {
  Observation observation = Observation::NoFinding;
  std::size_t sentence_index = 0;
  std::size_t begin = 0;  // token span [begin, end)
  std::size_t end = 0;
  PhrasePattern matched_phrase;
  std::optional<MentionClass> cls;
};

// True when `phrase` matches the sentence tokens starting at `pos`.
inline bool phrase_matches_at(const PhrasePattern &phrase, const Sentence &s, std::size_t pos) {
  if (pos + phrase.tokens.size() > s.size()) return false;
  for (std::size_t k = 0; k < phrase.tokens.size(); ++k) {
    if (s.tokens[pos + k].lower != phrase.tokens[k]) return false;
  }
  return true;
}

// Per observation: greedy left-to-right scan taking the longest phrase at
// each position, which yields leftmost-longest non-overlapping matches.
// Mentions of different observations may overlap.
inline std::vector<Mention> extract_mentions(const ReportDocument &doc, const RuleSet &rules) {
  std::vector<Mention> out;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence &s = doc.sentences[si];
    for (Observation o : kAllObservations) {
      if (is_derived(o)) continue;
      std::size_t pos = 0;
      while (pos < s.size()) {
        std::size_t matched = 0;
        const PhrasePattern *phrase = nullptr;
        for (std::size_t idx : rules.candidates(o, s.tokens[pos].lower)) {
          const PhrasePattern &p = rules.phrases()[idx];
          if (phrase_matches_at(p, s, pos)) {
            matched = p.tokens.size();
            phrase = &p;
            break;  // candidates are sorted longest first
          }
        }
        if (phrase == nullptr) {
          ++pos;
          continue;
        }
        out.push_back(Mention{o, si, pos, pos + matched, *phrase, std::nullopt});
        pos += matched;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Mention &a, const Mention &b) {
    return std::tuple(a.sentence_index, a.begin, name_of(a.observation)) <
           std::tuple(b.sentence_index, b.begin, name_of(b.observation));
  });
  return out;
}

}  // namespace radlabel
