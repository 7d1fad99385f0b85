#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "radlabel/error.hpp"
#include "radlabel/observation.hpp"
#include "radlabel/text.hpp"

namespace radlabel {

enum class Phase : std::size_t {
  PreNegationUncertainty,
  Negation,
  PostNegationUncertainty,
};

inline constexpr std::array<Phase, 3> kAllPhases = {
    Phase::PreNegationUncertainty, Phase::Negation, Phase::PostNegationUncertainty};

constexpr std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::PreNegationUncertainty: return "pre_negation_uncertainty";
    case Phase::Negation: return "negation";
    case Phase::PostNegationUncertainty: return "post_negation_uncertainty";
  }
  return "";
}

struct PhrasePattern {
  Observation observation = Observation::NoFinding;
  std::vector<std::string> tokens;  // case-folded, non-empty

  bool operator==(const PhrasePattern &) const = default;
};

inline PhrasePattern make_phrase(Observation observation, std::string_view text) {
  PhrasePattern p{observation, tokenize_folded(text)};
  if (p.tokens.empty()) {
    throw Error(ErrorCode::EmptyPhrase,
                "phrase for " + std::string(name_of(observation)) + " has no tokens");
  }
  return p;
}

// Where a rule came from; not part of rule identity.
struct RuleOrigin {
  std::string source;
  std::size_t line = 0;
};

struct PatternElement {
  enum class Kind { Literal, Mention, Gap };
  Kind kind = Kind::Literal;
  std::string literal;  // only for Kind::Literal

  static PatternElement lit(std::string s) { return {Kind::Literal, std::move(s)}; }
  static PatternElement mention() { return {Kind::Mention, {}}; }
  static PatternElement gap() { return {Kind::Gap, {}}; }

  bool operator==(const PatternElement &) const = default;
};

struct SurfaceRule {
  Phase phase = Phase::Negation;
  std::vector<PatternElement> pattern;  // exactly one Mention element
  RuleOrigin origin;

  bool operator==(const SurfaceRule &o) const { return phase == o.phase && pattern == o.pattern; }
};

enum class Direction {
  HeadOf,       // 'h': step to the head of the current token
  DependentOf,  // 'd': step to a dependent of the current token
};

// One edge of a dependency path. For DependentOf the relation labels the
// dependent being stepped to; for HeadOf it labels the current token's own
// attachment.
struct PathStep {
  std::string relation;
  Direction direction = Direction::DependentOf;

  bool operator==(const PathStep &) const = default;
};

inline constexpr std::size_t kMaxPathLength = 3;

struct DependencyRule {
  Phase phase = Phase::Negation;
  std::string trigger_lemma;
  std::vector<PathStep> path;  // 1..kMaxPathLength steps, trigger → mention head
  RuleOrigin origin;

  bool operator==(const DependencyRule &o) const {
    return phase == o.phase && trigger_lemma == o.trigger_lemma && path == o.path;
  }
};

using Rule = std::variant<SurfaceRule, DependencyRule>;

inline Phase phase_of(const Rule &r) {
  return std::visit([](const auto &x) { return x.phase; }, r);
}

inline const RuleOrigin &origin_of(const Rule &r) {
  return std::visit([](const auto &x) -> const RuleOrigin & { return x.origin; }, r);
}

// Rule-file line for a rule; parse_rule_line(to_rule_line(r)) == r.
inline std::string to_rule_line(const Rule &rule) {
  if (const auto *s = std::get_if<SurfaceRule>(&rule)) {
    std::string out = "surface:";
    for (const PatternElement &e : s->pattern) {
      out += ' ';
      switch (e.kind) {
        case PatternElement::Kind::Literal: out += e.literal; break;
        case PatternElement::Kind::Mention: out += "{M}"; break;
        case PatternElement::Kind::Gap: out += "..."; break;
      }
    }
    return out;
  }
  const auto &d = std::get<DependencyRule>(rule);
  std::string out = "dep: " + d.trigger_lemma + ' ';
  for (std::size_t i = 0; i < d.path.size(); ++i) {
    if (i) out += ',';
    out += d.path[i].relation;
    out += d.path[i].direction == Direction::HeadOf ? ":h" : ":d";
  }
  return out;
}

namespace detail {

[[noreturn]] inline void rule_error(ErrorCode code, const RuleOrigin &at, const std::string &what) {
  throw Error(code, at.source + ":" + std::to_string(at.line) + ": " + what);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) parts.push_back(s.substr(i, j - i));
    i = j;
  }
  return parts;
}

inline void append_chunk_elements(std::string_view segment, std::vector<PatternElement> &out) {
  for (std::string_view chunk : split_ws(segment)) {
    if (chunk == "...") {
      out.push_back(PatternElement::gap());
    } else {
      for (std::string &t : tokenize_folded(chunk)) out.push_back(PatternElement::lit(std::move(t)));
    }
  }
}

inline SurfaceRule parse_surface(std::string_view body, Phase phase, const RuleOrigin &at) {
  SurfaceRule rule{phase, {}, at};
  std::size_t mentions = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t m = body.find("{M}", pos);
    append_chunk_elements(body.substr(pos, m == std::string_view::npos ? body.npos : m - pos),
                          rule.pattern);
    if (m == std::string_view::npos) break;
    rule.pattern.push_back(PatternElement::mention());
    ++mentions;
    pos = m + 3;
  }
  if (mentions == 0) {
    rule_error(ErrorCode::MissingMentionPlaceholder, at, "surface rule has no {M}");
  }
  if (mentions > 1) rule_error(ErrorCode::MalformedRule, at, "surface rule has more than one {M}");
  return rule;
}

inline DependencyRule parse_dependency(std::string_view body, Phase phase, const RuleOrigin &at) {
  const auto parts = split_ws(body);
  if (parts.size() != 2) {
    rule_error(ErrorCode::MalformedRule, at, "expected 'dep: <lemma> <rel>:<dir>[,...]'");
  }
  DependencyRule rule{phase, casefold(parts[0]), {}, at};
  std::string_view path = parts[1];
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t comma = std::min(path.find(',', pos), path.size());
    const std::string_view step = path.substr(pos, comma - pos);
    const std::size_t colon = step.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 2 != step.size()) {
      rule_error(ErrorCode::MalformedRule, at, "bad path step '" + std::string(step) + "'");
    }
    const char dir = step[colon + 1];
    if (dir != 'h' && dir != 'd') {
      rule_error(ErrorCode::MalformedRule, at, "direction must be h or d in '" + std::string(step) + "'");
    }
    rule.path.push_back(
        {std::string(step.substr(0, colon)), dir == 'h' ? Direction::HeadOf : Direction::DependentOf});
    pos = comma + 1;
  }
  if (rule.path.size() > kMaxPathLength) {
    rule_error(ErrorCode::MalformedRule, at,
               "dependency path longer than " + std::to_string(kMaxPathLength));
  }
  return rule;
}

}  // namespace detail

// Parses one non-comment line: `surface: <pattern>` or
// `dep: <lemma> <rel>:<dir>[,<rel>:<dir>...]`.
inline Rule parse_rule_line(std::string_view line, Phase phase, RuleOrigin at = {}) {
  const std::string_view text = trim(line);
  constexpr std::string_view kSurface = "surface:";
  constexpr std::string_view kDep = "dep:";
  if (text.substr(0, kSurface.size()) == kSurface) {
    return detail::parse_surface(text.substr(kSurface.size()), phase, at);
  }
  if (text.substr(0, kDep.size()) == kDep) {
    return detail::parse_dependency(text.substr(kDep.size()), phase, at);
  }
  detail::rule_error(ErrorCode::MalformedRule, at, "line must start with 'surface:' or 'dep:'");
}

inline std::vector<Rule> parse_rules(std::istream &in, Phase phase, const std::string &source) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    rules.push_back(parse_rule_line(t, phase, RuleOrigin{source, number}));
  }
  return rules;
}

inline std::vector<Rule> parse_rule_file(const std::filesystem::path &path, Phase phase) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open rule file " + path.string());
  return parse_rules(in, phase, path.string());
}

// One phrase per line; '#' comments and blank lines skipped.
inline std::vector<PhrasePattern> parse_phrases(std::istream &in, Observation observation,
                                                const std::string &source) {
  std::vector<PhrasePattern> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      out.push_back(make_phrase(observation, t));
    } catch (const Error &e) {
      throw Error(e.code(), source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

// Reads `<slug>.txt` files; other extensions are ignored. Output is grouped
// in canonical observation order with duplicates removed.
inline std::vector<PhrasePattern> parse_phrase_dir(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  std::array<std::vector<fs::path>, kObservationCount> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    const std::string slug = entry.path().stem().string();
    const auto obs = observation_from_slug(slug);
    if (!obs) {
      throw Error(ErrorCode::UnknownObservationFile, "unrecognized observation file " + entry.path().string());
    }
    if (is_derived(*obs)) {
      throw Error(ErrorCode::UnknownObservationFile,
                  entry.path().string() + ": No Finding is derived and takes no phrases");
    }
    files[index_of(*obs)].push_back(entry.path());
  }
  std::vector<PhrasePattern> out;
  for (Observation o : kAllObservations) {
    for (const fs::path &p : files[index_of(o)]) {
      std::ifstream in(p);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
      for (PhrasePattern &ph : parse_phrases(in, o, p.string())) {
        if (std::find(out.begin(), out.end(), ph) == out.end()) out.push_back(std::move(ph));
      }
    }
  }
  return out;
}

// Compiled phrases and phase-partitioned rules. Immutable once built; the
// add_* methods exist for construction only.
class RuleSet {
 public:
  RuleSet() = default;

  // Phrases are kept grouped in canonical observation order, file order
  // within an observation.
  void add_phrases(const std::vector<PhrasePattern> &phrases) {
    for (const PhrasePattern &p : phrases) {
      if (p.tokens.empty()) throw Error(ErrorCode::EmptyPhrase, "phrase has no tokens");
      if (is_derived(p.observation)) {
        throw Error(ErrorCode::InvalidArgument, "No Finding takes no phrases");
      }
      if (std::find(phrases_.begin(), phrases_.end(), p) == phrases_.end()) phrases_.push_back(p);
    }
    std::stable_sort(phrases_.begin(), phrases_.end(), [](const PhrasePattern &a, const PhrasePattern &b) {
      return index_of(a.observation) < index_of(b.observation);
    });
    for (auto &m : by_first_token_) m.clear();
    for (std::size_t i = 0; i < phrases_.size(); ++i) {
      by_first_token_[index_of(phrases_[i].observation)][phrases_[i].tokens.front()].push_back(i);
    }
    for (auto &m : by_first_token_) {
      for (auto &[first, bucket] : m) {
        std::stable_sort(bucket.begin(), bucket.end(), [this](std::size_t a, std::size_t b) {
          return phrases_[a].tokens.size() > phrases_[b].tokens.size();
        });
      }
    }
  }

  // Rules land in their own phase regardless of call order; file order is
  // preserved within a phase.
  void add_rules(const std::vector<Rule> &rules) {
    for (const Rule &r : rules) rules_[static_cast<std::size_t>(phase_of(r))].push_back(r);
  }

  const std::vector<PhrasePattern> &phrases() const { return phrases_; }
  const std::vector<Rule> &rules(Phase p) const { return rules_[static_cast<std::size_t>(p)]; }

  std::size_t rule_count() const {
    return rules_[0].size() + rules_[1].size() + rules_[2].size();
  }

  // Phrase indices for `o` whose first token is `first`, longest first.
  const std::vector<std::size_t> &candidates(Observation o, const std::string &first) const {
    static const std::vector<std::size_t> kNone;
    const auto &m = by_first_token_[index_of(o)];
    const auto it = m.find(first);
    return it == m.end() ? kNone : it->second;
  }

  bool operator==(const RuleSet &o) const { return phrases_ == o.phrases_ && rules_ == o.rules_; }

 private:
  std::vector<PhrasePattern> phrases_;
  std::array<std::vector<Rule>, 3> rules_;
  std::array<std::unordered_map<std::string, std::vector<std::size_t>>, kObservationCount>
      by_first_token_;
};

// Loads `<rules_dir>/<phase>.rules` (a missing phase file means an empty
// phase) and the phrase directory.
inline RuleSet load_rule_set(const std::filesystem::path &rules_dir,
                             const std::filesystem::path &phrases_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(rules_dir)) {
    throw Error(ErrorCode::Io, "not a directory: " + rules_dir.string());
  }
  RuleSet set;
  set.add_phrases(parse_phrase_dir(phrases_dir));
  for (Phase p : kAllPhases) {
    const fs::path file = rules_dir / (std::string(phase_name(p)) + ".rules");
    if (fs::exists(file)) set.add_rules(parse_rule_file(file, p));
  }
  return set;
}

inline std::string phrase_file_text(const RuleSet &set, Observation o) {
  std::string out;
  for (const PhrasePattern &p : set.phrases()) {
    if (p.observation == o) out += join(p.tokens, " ") + '\n';
  }
  return out;
}

inline std::string rule_file_text(const RuleSet &set, Phase p) {
  std::string out;
  for (const Rule &r : set.rules(p)) out += to_rule_line(r) + '\n';
  return out;
}

// Writes the directory layout read by load_rule_set.
inline void write_rule_set(const RuleSet &set, const std::filesystem::path &rules_dir,
                           const std::filesystem::path &phrases_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(rules_dir);
  fs::create_directories(phrases_dir);
  for (Observation o : kAllObservations) {
    const std::string text = phrase_file_text(set, o);
    if (text.empty()) continue;
    std::ofstream(phrases_dir / (std::string(slug_of(o)) + ".txt")) << text;
  }
  for (Phase p : kAllPhases) {
    std::ofstream(rules_dir / (std::string(phase_name(p)) + ".rules")) << rule_file_text(set, p);
  }
}

}  // namespace radlabel
