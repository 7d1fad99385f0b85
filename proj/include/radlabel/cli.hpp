#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"

#include "radlabel/conllu.hpp"
#include "radlabel/csv.hpp"
#include "radlabel/error.hpp"
#include "radlabel/evaluation.hpp"
#include "radlabel/labels_io.hpp"
#include "radlabel/pipeline.hpp"
#include "radlabel/rules.hpp"
#include "radlabel/uncertainty.hpp"

namespace radlabel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Root holding rules/ and phrases/ when --rules / --phrases are omitted.
inline constexpr const char *kRulesDirEnv = "RADLABEL_RULES_DIR";

enum class Subcommand { Label, Evaluate, Transform };

struct RunConfig {
  Subcommand subcommand = Subcommand::Label;
  // label
  std::string reports;
  std::string rules_dir;
  std::string phrases_dir;
  std::string conllu;
  bool surface_only = false;
  std::size_t workers = 1;
  // evaluate
  std::string pred;
  std::string gold;
  std::string task = "all";
  std::string table;
  // transform
  std::string labels;
  std::string policy;
  std::string preds;
  std::string mask;
  // shared
  std::string output;
};

namespace detail {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::ifstream open_in(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void with_output(const std::string &path, std::ostream &fallback, Fn &&fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream out = open_out(path);
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

inline int run_label(const RunConfig &cfg, std::ostream &out) {
  if (cfg.surface_only && !cfg.conllu.empty()) {
    throw UsageError("--surface-only and --conllu are mutually exclusive");
  }
  std::string rules_dir = cfg.rules_dir, phrases_dir = cfg.phrases_dir;
  if (rules_dir.empty() || phrases_dir.empty()) {
    const char *root = std::getenv(kRulesDirEnv);
    if (root == nullptr || *root == '\0') {
      throw UsageError(std::string("--rules and --phrases are required unless ") + kRulesDirEnv + " is set");
    }
    if (rules_dir.empty()) rules_dir = (std::filesystem::path(root) / "rules").string();
    if (phrases_dir.empty()) phrases_dir = (std::filesystem::path(root) / "phrases").string();
  }
  const RuleSet rules = load_rule_set(rules_dir, phrases_dir);

  std::optional<ConlluIndex> parses;
  if (!cfg.conllu.empty()) {
    std::ifstream in = open_in(cfg.conllu);
    parses.emplace(in, cfg.conllu);
  }
  std::ifstream reports = open_in(cfg.reports);
  LabelOptions options;
  options.parses = parses ? &*parses : nullptr;
  options.workers = cfg.workers;
  with_output(cfg.output, out, [&](std::ostream &o) { label_corpus(reports, o, rules, options, cfg.reports); });
  return kExitOk;
}

inline std::vector<LabelVector> load_labels(const std::string &path) {
  std::ifstream in = open_in(path);
  return read_labels(in, path);
}

inline int run_evaluate(const RunConfig &cfg, std::ostream &out) {
  const std::vector<LabelVector> pred = load_labels(cfg.pred);
  const std::vector<LabelVector> gold = load_labels(cfg.gold);
  std::vector<MetricReport> reports;
  for (Task t : kAllTasks) {
    if (cfg.task == "all" || cfg.task == task_name(t)) reports.push_back(f1_report(pred, gold, t));
  }
  if (!cfg.output.empty()) {
    with_output(cfg.output, out, [&](std::ostream &o) { write_metric_csv(o, reports); });
  }
  with_output(cfg.table, out, [&](std::ostream &o) { write_metric_table(o, reports); });
  return kExitOk;
}

// Probability rows keyed by report_id; empty cells read as NaN.
inline std::unordered_map<std::string, std::vector<double>> load_predictions(const std::string &path) {
  std::ifstream in = open_in(path);
  csv::Reader reader(in, path);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields != labels_header()) reader.fail("unexpected predictions header");
  std::unordered_map<std::string, std::vector<double>> rows;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != kObservationCount + 1) reader.fail("wrong column count");
    std::vector<double> probs(kObservationCount, kMaskedTarget);
    for (std::size_t i = 0; i < kObservationCount; ++i) {
      const std::string_view cell = trim(fields[i + 1]);
      if (cell.empty()) continue;
      const auto v = parse_double(cell);
      if (!v || *v < 0.0 || *v > 1.0) reader.fail("bad probability '" + fields[i + 1] + "'");
      probs[i] = *v;
    }
    if (!rows.emplace(fields[0], std::move(probs)).second) reader.fail("duplicate report_id " + fields[0]);
  }
  return rows;
}

inline Policy parse_policy(const std::string &name) {
  for (Policy p : {Policy::Ignore, Policy::Zeros, Policy::Ones, Policy::SelfTrained, Policy::MultiClass}) {
    if (policy_name(p) == name) return p;
  }
  throw UsageError("unknown policy " + name);
}

inline void write_targets(std::ostream &o, const std::vector<LabelVector> &rows, const PolicyOutput &p) {
  csv::write_row(o, labels_header());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> cells{rows[r].report_id};
    for (std::size_t c = 0; c < kObservationCount; ++c) {
      if (!p.mask(r, c)) {
        cells.emplace_back();
      } else if (p.policy == Policy::MultiClass) {
        cells.push_back(std::to_string(static_cast<int>(p.classes()(r, c))));
      } else {
        cells.push_back(format_decimal(p.binary()(r, c)));
      }
    }
    csv::write_row(o, cells);
  }
}

inline void write_mask(std::ostream &o, const std::vector<LabelVector> &rows, const PolicyOutput &p) {
  csv::write_row(o, labels_header());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> cells{rows[r].report_id};
    for (std::size_t c = 0; c < kObservationCount; ++c) cells.emplace_back(p.mask(r, c) ? "1" : "0");
    csv::write_row(o, cells);
  }
}

inline int run_transform(const RunConfig &cfg, std::ostream &out) {
  const Policy policy = parse_policy(cfg.policy);
  if (policy == Policy::SelfTrained && cfg.preds.empty()) throw UsageError("--policy selftrain requires --preds");
  if (policy != Policy::SelfTrained && !cfg.preds.empty()) throw UsageError("--preds is only used by selftrain");
  const std::vector<LabelVector> rows = load_labels(cfg.labels);
  const LabelMatrix labels = to_label_matrix(rows);
  PolicyOutput result;
  if (policy == Policy::SelfTrained) {
    const auto by_id = load_predictions(cfg.preds);
    Grid<double> preds(labels.rows(), labels.cols(), kMaskedTarget);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto it = by_id.find(rows[r].report_id);
      if (it == by_id.end()) {
        throw Error(ErrorCode::ShapeMismatch, "no predictions for report " + rows[r].report_id);
      }
      for (std::size_t c = 0; c < kObservationCount; ++c) {
        preds(r, c) = it->second[c];
        if (labels(r, c) == Label::Uncertain && std::isnan(preds(r, c))) {
          throw Error(ErrorCode::ShapeMismatch, "report " + rows[r].report_id + ": missing prediction for " +
                                                    std::string(name_of(kAllObservations[c])));
        }
      }
    }
    result = apply_selftrain(labels, preds);
  } else {
    result = apply_policy(labels, policy);
  }
  with_output(cfg.output, out, [&](std::ostream &o) { write_targets(o, rows, result); });
  std::string mask_path = cfg.mask;
  if (mask_path.empty() && !cfg.output.empty()) {
    std::filesystem::path p(cfg.output);
    mask_path = (p.parent_path() / (p.stem().string() + ".mask.csv")).string();
  }
  if (!mask_path.empty()) {
    std::ofstream m = open_out(mask_path);
    write_mask(m, rows, result);
  }
  return kExitOk;
}

}  // namespace detail

inline int run(const RunConfig &cfg, std::ostream &out = std::cout) {
  switch (cfg.subcommand) {
    case Subcommand::Label: return detail::run_label(cfg, out);
    case Subcommand::Evaluate: return detail::run_evaluate(cfg, out);
    case Subcommand::Transform: return detail::run_transform(cfg, out);
  }
  return kExitUsage;
}

// Parses argv-style arguments (without the program name) and runs. Never
// throws; diagnostics go to `err`.
inline int run(std::vector<std::string> args, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Rule-based radiology report labeler", "radlabel"};
  app.require_subcommand(1);

  auto *label = app.add_subcommand("label", "Label reports as positive/negative/uncertain/blank");
  label->add_option("--reports", cfg.reports, "Reports CSV (report_id,text)")->required()->check(CLI::ExistingFile);
  label->add_option("--rules", cfg.rules_dir, "Directory of <phase>.rules files")->check(CLI::ExistingDirectory);
  label->add_option("--phrases", cfg.phrases_dir, "Directory of <observation>.txt phrase lists")
      ->check(CLI::ExistingDirectory);
  auto *conllu = label->add_option("--conllu", cfg.conllu, "CoNLL-U parses aligned to the reports")
                     ->check(CLI::ExistingFile);
  auto *surface = label->add_flag("--surface-only", cfg.surface_only, "Ignore dependency rules");
  conllu->excludes(surface);
  label->add_option("--workers", cfg.workers, "Labeling threads")->check(CLI::Range(1, 1024));
  label->add_option("--output", cfg.output, "Labels CSV (default: stdout)");

  auto *evaluate = app.add_subcommand("evaluate", "Score predicted labels against gold labels");
  evaluate->add_option("--pred", cfg.pred, "Predicted labels CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gold", cfg.gold, "Gold labels CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--task", cfg.task, "mention, negation, uncertainty or all")
      ->check(CLI::IsMember({"mention", "negation", "uncertainty", "all"}));
  evaluate->add_option("--output", cfg.output, "Per-observation metrics CSV");
  evaluate->add_option("--table", cfg.table, "Human-readable table (default: stdout)");

  auto *transform = app.add_subcommand("transform", "Turn labels into training targets and loss masks");
  transform->add_option("--labels", cfg.labels, "Labels CSV")->required()->check(CLI::ExistingFile);
  transform->add_option("--policy", cfg.policy, "ignore, zeros, ones, selftrain or multiclass")
      ->required()
      ->check(CLI::IsMember({"ignore", "zeros", "ones", "selftrain", "multiclass"}));
  transform->add_option("--preds", cfg.preds, "Probabilities CSV for selftrain")->check(CLI::ExistingFile);
  transform->add_option("--output", cfg.output, "Targets CSV (default: stdout)");
  transform->add_option("--mask", cfg.mask, "Mask CSV (default: <output>.mask.csv)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (label->parsed()) cfg.subcommand = Subcommand::Label;
  if (evaluate->parsed()) cfg.subcommand = Subcommand::Evaluate;
  if (transform->parsed()) cfg.subcommand = Subcommand::Transform;

  try {
    return run(cfg, out);
  } catch (const detail::UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace radlabel::cli
