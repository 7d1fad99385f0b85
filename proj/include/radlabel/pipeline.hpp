#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <istream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "radlabel/aggregate.hpp"
#include "radlabel/conllu.hpp"
#include "radlabel/error.hpp"
#include "radlabel/labels_io.hpp"
#include "radlabel/report.hpp"
#include "radlabel/rules.hpp"

namespace radlabel {

struct LabelOptions {
  const ConlluIndex *parses = nullptr;  // null = surface-only
  std::size_t workers = 1;
  std::size_t chunk_size = 4096;
};

inline LabelVector label_record(const ReportRecord &rec, const RuleSet &rules, const ConlluIndex *parses) {
  try {
    ReportDocument doc = make_document(rec.report_id, rec.text);
    if (parses) doc = parses->attach(std::move(doc));
    return label_study(doc, rules);
  } catch (const Error &e) {
    throw Error(e.code(), "report " + rec.report_id + ": " + e.what());
  }
}

// Reads reports in fixed-size chunks, labels each chunk across `workers`
// threads and writes rows in input order. Returns the number of reports.
inline std::size_t label_corpus(std::istream &reports, std::ostream &out, const RuleSet &rules,
                                const LabelOptions &options = {}, const std::string &source = "<reports>") {
  ReportReader reader(reports, source);
  LabelWriter writer(out);
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
  std::vector<ReportRecord> batch;
  std::vector<LabelVector> results;
  std::size_t total = 0;
  bool more = true;
  while (more) {
    batch.clear();
    ReportRecord rec;
    while (batch.size() < chunk && (more = reader.next(rec))) batch.push_back(std::move(rec));
    if (batch.empty()) break;
    results.assign(batch.size(), LabelVector{});

    // Failures are kept per record so the reported error is always the
    // first one in input order, independent of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(batch.size());
    auto work = [&] {
      for (std::size_t i = next++; i < batch.size(); i = next++) {
        try {
          results[i] = label_record(batch[i], rules, options.parses);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto &e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const LabelVector &v : results) writer.write(v);
    total += batch.size();
  }
  return total;
}

}  // namespace radlabel
