#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "radlabel/mentions.hpp"
#include "radlabel/report.hpp"
#include "radlabel/rules.hpp"

namespace radlabel {

namespace detail {

using Elements = std::span<const PatternElement>;

// Matches `elems` against tokens starting at `pos` and moving by `step`
// (+1 forward, -1 backward). Only the elements must be consumed; tokens
// beyond them are unconstrained.
inline bool align(Elements elems, const Sentence &s, long pos, long step) {
  if (elems.empty()) return true;
  const PatternElement &e = elems.front();
  const long n = static_cast<long>(s.size());
  if (e.kind == PatternElement::Kind::Gap) {
    // Cursor range is [pos, n] going forward and [-1, pos] going backward.
    for (long p = pos; step > 0 ? p <= n : p >= -1; p += step) {
      if (align(elems.subspan(1), s, p, step)) return true;
    }
    return false;
  }
  if (pos < 0 || pos >= n) return false;
  if (s.tokens[static_cast<std::size_t>(pos)].lower != e.literal) return false;
  return align(elems.subspan(1), s, pos + step, step);
}

}  // namespace detail

// True when the rule's literals align around the mention with {M} covering
// exactly the mention span and each gap absorbing zero or more tokens. The
// pattern is not anchored to the sentence edges.
inline bool match_surface(const SurfaceRule &rule, const Mention &mention, const Sentence &s) {
  const auto &pat = rule.pattern;
  std::size_t m = 0;
  while (m < pat.size() && pat[m].kind != PatternElement::Kind::Mention) ++m;
  if (m == pat.size() || mention.end > s.size() || mention.begin >= mention.end) return false;

  std::vector<PatternElement> before(pat.rbegin() + static_cast<long>(pat.size() - m), pat.rend());
  const std::span<const PatternElement> after(pat.data() + m + 1, pat.size() - m - 1);
  return detail::align(after, s, static_cast<long>(mention.end), +1) &&
         detail::align(before, s, static_cast<long>(mention.begin) - 1, -1);
}

// Token of the mention span closest to ROOT; ties go to the leftmost.
inline std::size_t mention_head(const Mention &mention, const DependencyGraph &g) {
  std::size_t best = mention.begin;
  std::size_t best_depth = g.depth(best);
  for (std::size_t i = mention.begin + 1; i < mention.end; ++i) {
    const std::size_t d = g.depth(i);
    if (d < best_depth) {
      best = i;
      best_depth = d;
    }
  }
  return best;
}

// Trigger lemma: the parse lemma when present, else the case-folded form.
inline bool match_dependency(const DependencyRule &rule, const Mention &mention, const Sentence &s) {
  if (!s.parse || s.parse->size() != s.size() || mention.end > s.size() ||
      mention.begin >= mention.end) {
    return false;
  }
  const DependencyGraph &g = *s.parse;
  const std::size_t target = mention_head(mention, g);
  const std::size_t n = s.size();

  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view lemma = g.lemma(i).empty() ? std::string_view(s.tokens[i].lower) : g.lemma(i);
    if (lemma == rule.trigger_lemma) frontier.push_back(i);
  }
  for (const PathStep &step : rule.path) {
    std::vector<bool> next(n, false);
    for (std::size_t cur : frontier) {
      if (step.direction == Direction::DependentOf) {
        for (std::size_t j = 0; j < n; ++j) {
          if (g.head(j) == static_cast<int>(cur) && g.relation(j) == step.relation) next[j] = true;
        }
      } else if (g.head(cur) != DependencyGraph::kRoot && g.relation(cur) == step.relation) {
        next[static_cast<std::size_t>(g.head(cur))] = true;
      }
    }
    frontier.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (next[j]) frontier.push_back(j);
    }
    if (frontier.empty()) return false;
  }
  for (std::size_t i : frontier) {
    if (i == target) return true;
  }
  return false;
}

inline bool rule_matches(const Rule &rule, const Mention &mention, const Sentence &s) {
  if (const auto *sr = std::get_if<SurfaceRule>(&rule)) return match_surface(*sr, mention, s);
  return match_dependency(std::get<DependencyRule>(rule), mention, s);
}

// Phases run pre-negation uncertainty → negation → post-negation
// uncertainty; the first matching rule decides. No match means positive.
inline MentionClass classify_mention(const Mention &mention, const Sentence &s, const RuleSet &rules) {
  for (Phase phase : kAllPhases) {
    const auto &list = rules.rules(phase);
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!rule_matches(list[i], mention, s)) continue;
      const MentionLabel value =
          phase == Phase::Negation ? MentionLabel::Negative : MentionLabel::Uncertain;
      return MentionClass{value, RuleRef{phase, i}};
    }
  }
  return MentionClass{MentionLabel::Positive, std::nullopt};
}

inline std::vector<Mention> classify_mentions(std::vector<Mention> mentions, const ReportDocument &doc,
                                              const RuleSet &rules) {
  for (Mention &m : mentions) m.cls = classify_mention(m, doc.sentences[m.sentence_index], rules);
  return mentions;
}

}  // namespace radlabel
