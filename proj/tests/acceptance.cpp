// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radlabel/cli.hpp"
#include "radlabel/radlabel.hpp"
#include "test_support.hpp"

using namespace radlabel;
using testing_support::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

// Collects failure messages for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string &what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok) ++failed;
  }
  void near(double got, double want, double tol, const std::string &what) {
    expect(std::fabs(got - want) <= tol, what + ": got " + std::to_string(got) + " want " + std::to_string(want));
  }
  std::size_t failed = 0;
};

int g_failed = 0;

void criterion(const std::string &name, const std::function<void(Check &)> &body) {
  Check c;
  const auto start = Clock::now();
  try {
    body(c);
  } catch (const std::exception &e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool ok = c.failed == 0;
  if (!ok) ++g_failed;
  std::printf("%s  %-28s (%.2fs)\n", ok ? "PASS" : "FAIL", name.c_str(), secs);
  for (const std::string &f : c.failures) std::printf("      %s\n", f.c_str());
}

constexpr Label B = Label::Blank, N = Label::Negative, U = Label::Uncertain, P = Label::Positive;

LabelVector vec(const std::string &id, std::initializer_list<std::pair<Observation, Label>> cells) {
  LabelVector v;
  v.report_id = id;
  for (auto [o, l] : cells) v[o] = l;
  return v;
}

std::string describe(const LabelVector &v) {
  std::ostringstream s;
  s << v.report_id << ":";
  for (Observation o : kAllObservations) {
    if (v[o] != B) s << " " << name_of(o) << "=" << encode_label(v[o]);
  }
  return s.str();
}

void golden_sentences(Check &c) {
  const auto start = Clock::now();
  const RuleSet rules = testing_support::demo_rules();
  using O = Observation;
  const std::vector<std::pair<std::string, LabelVector>> cases = {
      {"no evidence of pulmonary edema, pleural effusions or pneumothorax",
       vec("g", {{O::NoFinding, P}, {O::Edema, N}, {O::PleuralEffusion, N}, {O::Pneumothorax, N}})},
      {"diffuse reticular pattern may represent mild interstitial pulmonary edema", vec("g", {{O::Edema, U}})},
      {"moderate bilateral effusions and bibasilar opacities",
       vec("g", {{O::PleuralEffusion, P}, {O::LungOpacity, P}})},
      {"heart size is stable", vec("g", {{O::Cardiomegaly, U}})},
      {"cannot exclude pneumothorax", vec("g", {{O::Pneumothorax, U}})},
      {"findings may represent atelectasis versus consolidation",
       vec("g", {{O::Atelectasis, U}, {O::Consolidation, U}})},
  };
  for (const auto &[text, want] : cases) {
    const LabelVector got = label_study(make_document("g", text), rules);
    c.expect(got == want, "\"" + text + "\" -> " + describe(got));
  }

  // With a parse, the negation-phase dependency rule also fires on
  // "exclude -dobj-> pneumothorax", but the pre-negation rule still decides.
  std::istringstream parse(
      "# report_id = g\n# sent_index = 0\n"
      "1\tcannot\tcan\t_\t_\t_\t2\taux\t_\t_\n"
      "2\texclude\texclude\t_\t_\t_\t0\troot\t_\t_\n"
      "3\tpneumothorax\tpneumothorax\t_\t_\t_\t2\tdobj\t_\t_\n\n");
  const ReportDocument doc = attach_parses(make_document("g", "cannot exclude pneumothorax"), parse);
  const auto mentions = classify_mentions(extract_mentions(doc, rules), doc, rules);
  c.expect(mentions.size() == 1 && mentions[0].cls && mentions[0].cls->value == MentionLabel::Uncertain &&
               mentions[0].cls->deciding_rule && mentions[0].cls->deciding_rule->phase == Phase::PreNegationUncertainty,
           "parsed 'cannot exclude pneumothorax' not decided by pre-negation rule");
  bool dep_fires = false;
  for (const Rule &r : rules.rules(Phase::Negation)) {
    if (std::holds_alternative<DependencyRule>(r) && rule_matches(r, mentions.at(0), doc.sentences[0])) dep_fires = true;
  }
  c.expect(dep_fires, "dependency exclude rule does not match the parsed sentence");

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  c.expect(secs < 1.0, "runtime " + std::to_string(secs) + " s");
}

void aggregation_oracle(Check &c) {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Mention> mentions;
    std::array<std::vector<MentionLabel>, kObservationCount> per_obs;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      const auto o = kAllObservations[std::uniform_int_distribution<std::size_t>(1, kObservationCount - 1)(rng)];
      const auto cls = static_cast<MentionLabel>(std::uniform_int_distribution<int>(0, 2)(rng));
      Mention m;
      m.observation = o;
      m.cls = MentionClass{cls, std::nullopt};
      mentions.push_back(m);
      per_obs[index_of(o)].push_back(cls);
    }
    const Labels got = aggregate(mentions);
    for (Observation o : kAllObservations) {
      if (is_derived(o)) continue;
      c.expect(got[index_of(o)] == oracle::precedence(per_obs[index_of(o)]),
               "trial " + std::to_string(trial) + " " + std::string(name_of(o)));
    }
  }
}

void extraction_oracle(Check &c) {
  std::mt19937 rng(202);
  const std::vector<std::string> vocab = {"left", "pleural", "effusion", "edema", "no", "small", "heart", "size"};
  auto pick = [&] { return vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]; };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PhrasePattern> phrases;
    const int np = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < np; ++i) {
      const auto o = kAllObservations[std::uniform_int_distribution<std::size_t>(1, 4)(rng)];
      std::string text = pick();
      const int len = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 1; k < len; ++k) text += " " + pick();
      phrases.push_back(make_phrase(o, text));
    }
    RuleSet set;
    set.add_phrases(phrases);
    std::string text;
    const int nt = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < nt; ++i) text += (i ? " " : "") + pick();
    const ReportDocument doc = make_document("x", text);
    std::vector<std::vector<std::string>> folded;
    for (const Sentence &s : doc.sentences) {
      folded.emplace_back();
      for (const Token &t : s.tokens) folded.back().push_back(t.lower);
    }
    std::vector<oracle::Span> got;
    for (const Mention &m : extract_mentions(doc, set)) got.push_back({m.observation, m.sentence_index, m.begin, m.end});
    c.expect(got == oracle::leftmost_longest(folded, set.phrases()), "trial " + std::to_string(trial) + ": " + text);
  }
}

void f1_harness(Check &c) {
  using O = Observation;
  const std::vector<GoldAnnotation> gold = {
      vec("r1", {{O::Edema, P}, {O::Pneumothorax, N}, {O::Cardiomegaly, U}}),
      vec("r2", {{O::Edema, U}}),
      vec("r3", {{O::NoFinding, P}, {O::PleuralEffusion, N}}),
  };
  const std::vector<LabelVector> pred = {
      vec("r3", {{O::NoFinding, P}, {O::Fracture, N}, {O::PleuralEffusion, N}}),
      vec("r1", {{O::Edema, P}, {O::Pneumothorax, U}, {O::Cardiomegaly, U}}),
      vec("r2", {{O::Edema, N}, {O::Atelectasis, P}}),
  };
  struct Expected {
    Task task;
    std::vector<std::pair<O, double>> f1;  // every other cell N/A
    double macro, micro;
    ConfusionCounts pooled;
  };
  const std::vector<Expected> expected = {
      {Task::Mention,
       {{O::Edema, 1}, {O::Pneumothorax, 1}, {O::Cardiomegaly, 1}, {O::NoFinding, 1}, {O::PleuralEffusion, 1},
        {O::Atelectasis, 0}, {O::Fracture, 0}},
       5.0 / 7.0, 6.0 / 7.0, {6, 2, 0}},
      {Task::Negation,
       {{O::Pneumothorax, 0}, {O::Edema, 0}, {O::Fracture, 0}, {O::PleuralEffusion, 1}},
       1.0 / 4.0, 2.0 / 5.0, {1, 2, 1}},
      {Task::Uncertainty, {{O::Cardiomegaly, 1}, {O::Pneumothorax, 0}, {O::Edema, 0}}, 1.0 / 3.0, 0.5, {1, 1, 1}},
  };
  for (const Expected &e : expected) {
    const MetricReport r = f1_report(pred, gold, e.task);
    const std::string t(task_name(e.task));
    for (Observation o : kAllObservations) {
      const auto it = std::find_if(e.f1.begin(), e.f1.end(), [&](const auto &p) { return p.first == o; });
      const std::string cell = t + " " + std::string(name_of(o));
      if (it == e.f1.end()) {
        c.expect(!r.f1[index_of(o)].has_value(), cell + " should be N/A");
      } else {
        c.expect(r.f1[index_of(o)].has_value(), cell + " should be defined");
        if (r.f1[index_of(o)]) c.near(*r.f1[index_of(o)], it->second, 1e-12, cell);
      }
    }
    c.expect(r.macro && r.micro, t + " aggregate undefined");
    if (r.macro) c.near(*r.macro, e.macro, 1e-12, t + " macro");
    if (r.micro) c.near(*r.micro, e.micro, 1e-12, t + " micro");
    c.expect(r.pooled == e.pooled, t + " pooled counts");
  }

  // Self-evaluation of a labeling output.
  const RuleSet rules = testing_support::demo_rules();
  const std::vector<std::string> texts = {
      "No pneumothorax. Possible pneumonia.", "Heart size is stable. Small effusion.",
      "Cannot exclude atelectasis.", "Pacemaker in place. No edema.", "Moderate cardiomegaly.",
      "Findings may represent edema versus consolidation. Rib fracture."};
  std::vector<LabelVector> labeled;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    labeled.push_back(label_study(make_document("s" + std::to_string(i), texts[i]), rules));
  }
  for (Task task : kAllTasks) {
    const MetricReport r = f1_report(labeled, labeled, task);
    for (const auto &f : r.f1) {
      if (f) c.expect(*f == 1.0, std::string(task_name(task)) + " self-evaluation cell below 1");
    }
    c.expect(!r.macro || *r.macro == 1.0, "self macro");
    c.expect(!r.micro || *r.micro == 1.0, "self micro");
  }
}

Grid<double> random_probs(std::mt19937 &rng, std::size_t rows, std::size_t cols) {
  Grid<double> g(rows, cols);
  std::uniform_real_distribution<double> d(0.001, 0.999);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < cols; ++col) g(r, col) = d(rng);
  }
  return g;
}

LabelMatrix random_labels(std::mt19937 &rng, std::size_t rows, std::size_t cols) {
  LabelMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t col = 0; col < cols; ++col) m(r, col) = static_cast<Label>(std::uniform_int_distribution<int>(0, 3)(rng));
  }
  return m;
}

void loss_identities(Check &c) {
  std::mt19937 rng(303);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t cols = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    Grid<double> targets(1, cols);
    const Grid<double> preds = random_probs(rng, 1, cols);
    std::vector<double> t, p;
    for (std::size_t col = 0; col < cols; ++col) {
      targets(0, col) = std::uniform_int_distribution<int>(0, 1)(rng);
      t.push_back(targets(0, col));
      p.push_back(preds(0, col));
    }
    c.near(masked_bce(targets, Grid<bool>(1, cols, true), preds), oracle::plain_bce(t, p), 1e-9,
           "full mask trial " + std::to_string(trial));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const LabelMatrix m = random_labels(rng, 8, kObservationCount);
    const PolicyOutput out = apply_policy(m, Policy::Ignore);
    Grid<double> preds = random_probs(rng, 8, kObservationCount);
    const double before = masked_bce(out, preds);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t col = 0; col < m.cols(); ++col) {
        if (m(r, col) == U) preds(r, col) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      }
    }
    const double after = masked_bce(out, preds);
    c.expect(std::memcmp(&before, &after, sizeof(double)) == 0, "ignore loss moved, trial " + std::to_string(trial));
  }
  const LabelMatrix worked = Grid<Label>::from_rows({{P, U, N}});
  c.near(masked_bce(apply_policy(worked, Policy::Ignore), Grid<double>::from_rows({{0.9, 0.5, 0.2}})),
         -(std::log(0.9) + std::log(0.8)), 1e-9, "worked value");
}

void policy_semantics(Check &c) {
  std::mt19937 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const LabelMatrix m = random_labels(rng, 6, kObservationCount);
    const PolicyOutput ones = apply_policy(m, Policy::Ones);
    const PolicyOutput zeros = apply_policy(m, Policy::Zeros);
    const Grid<double> preds = random_probs(rng, 6, kObservationCount);
    const PolicyOutput self = apply_selftrain(m, preds);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t col = 0; col < m.cols(); ++col) {
        const Label l = m(r, col);
        const std::string at = "trial " + std::to_string(trial) + " cell " + std::to_string(r) + "," + std::to_string(col);
        if (l == U) {
          c.expect(ones.binary()(r, col) == 1.0 && ones.mask(r, col), "ones " + at);
          c.expect(zeros.binary()(r, col) == 0.0 && zeros.mask(r, col), "zeros " + at);
          c.expect(self.binary()(r, col) == preds(r, col) && self.mask(r, col), "selftrain " + at);
        } else if (l == B) {
          c.expect(!ones.mask(r, col) && !zeros.mask(r, col) && !self.mask(r, col), "blank masked " + at);
        } else {
          const double want = l == P ? 1.0 : 0.0;
          for (const PolicyOutput *o : {&ones, &zeros, &self}) {
            c.expect(o->binary()(r, col) == want && o->mask(r, col), std::string(policy_name(o->policy)) + " " + at);
          }
        }
      }
    }
  }
  c.near(multiclass_positive_probability(0.2, 0.6, 0.2), 0.75, 1e-12, "multiclass (0.2,0.6,0.2)");
  c.near(multiclass_positive_probability(0.5, 0.5, 0.0), 0.5, 1e-12, "multiclass (0.5,0.5,0)");
  std::uniform_real_distribution<double> d(0.01, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = d(rng), b = d(rng), u = d(rng), s = a + b + u;
    const double p0 = a / s, p1 = b / s, pu = u / s;
    const double got = multiclass_positive_probability(p0, p1, pu);
    c.near(got, p1 / (p0 + p1), 1e-12, "multiclass trial " + std::to_string(trial));
    // Moving mass between u and the other two classes, keeping p1:p0, leaves
    // the result unchanged.
    const double k = std::uniform_real_distribution<double>(0.1, 1.0 / (p0 + p1))(rng);
    const double q0 = p0 * k, q1 = p1 * k;
    c.near(multiclass_positive_probability(q0, q1, std::max(0.0, 1.0 - q0 - q1)), got, 1e-12,
           "rescaling trial " + std::to_string(trial));
  }
}

void auroc_checks(Check &c) {
  std::mt19937 rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores(30);
    std::vector<bool> truths(30);
    for (std::size_t i = 0; i < 30; ++i) {
      // Coarse grid so ties occur.
      scores[i] = std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
      truths[i] = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    }
    truths[0] = true;
    truths[1] = false;
    const double got = auroc(scores, truths);
    c.near(got, oracle::auroc_pairs(scores, truths), 1e-12, "oracle trial " + std::to_string(trial));
    std::vector<double> transformed;
    for (double s : scores) transformed.push_back(std::exp(3 * s) - 7);
    c.expect(auroc(transformed, truths) == got, "transform trial " + std::to_string(trial));
  }
  const std::vector<double> ranked = {0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  const std::vector<bool> perfect = {false, false, false, true, true, true};
  const std::vector<bool> inverted = {true, true, true, false, false, false};
  c.expect(auroc(ranked, perfect) == 1.0, "perfect ranking");
  c.expect(auroc(ranked, inverted) == 0.0, "inverted ranking");
}

void determinism(Check &c) {
  TempDir dir;
  const std::vector<std::string> fragments = {
      "No pneumothorax.", "Possible pneumonia.", "Heart size is stable.", "Small left pleural effusion.",
      "Cannot exclude atelectasis.", "Pacemaker in place.", "Findings may represent edema versus consolidation.",
      "No evidence of pulmonary edema, pleural effusions or pneumothorax.", "Rib fracture.",
      "Moderate bilateral effusions and bibasilar opacities.", "Lungs are clear.", "Resolution of the opacity."};
  std::mt19937 rng(606);
  std::string corpus = "report_id,text\n";
  for (int i = 0; i < 10000; ++i) {
    std::string text = "FINDINGS: Portable view.\nIMPRESSION:";
    const int n = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int k = 0; k < n; ++k) text += " " + fragments[std::uniform_int_distribution<std::size_t>(0, fragments.size() - 1)(rng)];
    corpus += "syn-" + std::to_string(i) + ",\"" + text + "\"\n";
  }
  testing_support::write_file(dir / "reports.csv", corpus);
  const auto demo = testing_support::kDemoDir;
  auto run = [&](const std::string &out, const std::string &workers) {
    std::ostringstream o, e;
    const int status = cli::run({"label", "--reports", (dir / "reports.csv").string(), "--rules", (demo / "rules").string(),
                                 "--phrases", (demo / "phrases").string(), "--surface-only", "--workers", workers,
                                 "--output", (dir / out).string()},
                                o, e);
    c.expect(status == 0, "run exited " + std::to_string(status) + ": " + e.str());
  };
  const auto start = Clock::now();
  run("a.csv", "1");
  const double first = std::chrono::duration<double>(Clock::now() - start).count();
  run("b.csv", "4");
  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  const std::string a = testing_support::read_file(dir / "a.csv");
  c.expect(!a.empty() && a == testing_support::read_file(dir / "b.csv"), "outputs differ");
  c.expect(std::count(a.begin(), a.end(), '\n') == 10001, "unexpected row count");
  c.expect(first < 60.0 && total - first < 60.0, "runtime " + std::to_string(total) + " s");
}

}  // namespace

int main() {
  criterion("golden-sentences", golden_sentences);
  criterion("aggregation-oracle", aggregation_oracle);
  criterion("extraction-oracle", extraction_oracle);
  criterion("f1-harness", f1_harness);
  criterion("loss-identities", loss_identities);
  criterion("policy-semantics", policy_semantics);
  criterion("auroc", auroc_checks);
  criterion("determinism", determinism);
  std::printf("%d criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
