#include "evipath/evidence_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "evipath/errors.hpp"
#include "evipath/jobs.hpp"

namespace evipath {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

// Per-document partial sums; merged in document order so the result does not
// depend on the parallel schedule.
struct DocPartial {
  std::int64_t n_instances = 0;
  std::int64_t n_covered = 0;
  std::int64_t n_with_paths = 0;
  std::int64_t sum_union = 0;
  std::int64_t sum_paths = 0;
  std::vector<InstanceCoverage> detail;
};

DocPartial coverage_for_doc(const Document& doc, const RuleConfig& config, bool keep_detail) {
  DocPartial part;
  const OccurrenceIndex index = OccurrenceIndex::build(doc);
  for (std::size_t k = 0; k < doc.instances.size(); ++k) {
    const RelationInstance& inst = doc.instances[k];
    if (inst.evidence.empty()) continue;
    const PathSet paths = extract_paths(doc, index, inst.head, inst.tail, config);
    std::set<int> covered_sentences;
    for (const Path& p : paths.paths) {
      covered_sentences.insert(p.sentences.begin(), p.sentences.end());
    }
    const bool covered = std::includes(covered_sentences.begin(), covered_sentences.end(),
                                       inst.evidence.begin(), inst.evidence.end());
    part.n_instances += 1;
    part.n_covered += covered ? 1 : 0;
    if (!paths.paths.empty()) {
      part.n_with_paths += 1;
      part.sum_union += static_cast<std::int64_t>(covered_sentences.size());
      part.sum_paths += static_cast<std::int64_t>(paths.paths.size());
    }
    if (keep_detail) {
      part.detail.push_back({doc.doc_id, static_cast<int>(k), inst.head, inst.tail, covered,
                             static_cast<int>(paths.paths.size()),
                             static_cast<int>(covered_sentences.size())});
    }
  }
  return part;
}

CoverageReport merge_partials(std::vector<DocPartial>& parts, const RuleConfig& config) {
  CoverageReport report;
  report.config_label = config.label();
  for (DocPartial& part : parts) {
    report.n_instances += part.n_instances;
    report.n_covered += part.n_covered;
    report.n_instances_with_paths += part.n_with_paths;
    report.sum_union_sentences += part.sum_union;
    report.sum_path_count += part.sum_paths;
    report.per_instance.insert(report.per_instance.end(),
                               std::make_move_iterator(part.detail.begin()),
                               std::make_move_iterator(part.detail.end()));
  }
  if (report.n_instances > 0) {
    report.coverage = static_cast<double>(report.n_covered) / static_cast<double>(report.n_instances);
  }
  if (report.n_instances_with_paths > 0) {
    report.avg_union_sentences = static_cast<double>(report.sum_union_sentences) /
                                 static_cast<double>(report.n_instances_with_paths);
    report.avg_path_count = static_cast<double>(report.sum_path_count) /
                            static_cast<double>(report.n_instances_with_paths);
  }
  return report;
}

}  // namespace

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  if (s == "md" || s == "markdown") return ReportFormat::Markdown;
  throw ArgumentError("unknown report format: \"" + s + "\" (expected json, csv or md)");
}

EvidenceSizeHistogram evidence_size_distribution(std::span<const Document> corpus) {
  if (corpus.empty()) {
    throw ArgumentError("corpus is empty");
  }
  EvidenceSizeHistogram hist;
  std::int64_t sentence_sum = 0;
  for (const Document& doc : corpus) {
    hist.n_documents += 1;
    sentence_sum += static_cast<std::int64_t>(doc.sentences.size());
    for (const RelationInstance& inst : doc.instances) {
      const std::size_t bucket = std::min<std::size_t>(inst.evidence.size(), 4);
      hist.counts[bucket] += 1;
      hist.n_instances += 1;
    }
  }
  if (hist.n_instances == 0) {
    throw ArgumentError("corpus has no relation instances");
  }
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    hist.proportions[b] = static_cast<double>(hist.counts[b]) / static_cast<double>(hist.n_instances);
  }
  hist.avg_doc_sentences = static_cast<double>(sentence_sum) / static_cast<double>(hist.n_documents);
  return hist;
}

CoverageReport coverage_report_serial(std::span<const Document> corpus,
                                      const RuleConfig& config,
                                      bool keep_detail) {
  std::vector<DocPartial> parts;
  parts.reserve(corpus.size());
  for (const Document& doc : corpus) {
    parts.push_back(coverage_for_doc(doc, config, keep_detail));
  }
  return merge_partials(parts, config);
}

CoverageReport coverage_report(std::span<const Document> corpus,
                               const RuleConfig& config,
                               int jobs,
                               bool keep_detail) {
  const int workers = resolve_jobs(jobs);
  std::vector<DocPartial> parts(corpus.size());
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (std::int64_t d = 0; d < static_cast<std::int64_t>(corpus.size()); ++d) {
    try {
      parts[d] = coverage_for_doc(corpus[d], config, keep_detail);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  (void)workers;
  if (failure) std::rethrow_exception(failure);
  return merge_partials(parts, config);
}

std::string emit_report(const CoverageReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: {
      json out;
      out["config"] = report.config_label;
      out["coverage"] = report.coverage;
      out["coverage_pct"] = round_to(report.coverage * 100.0, 1);
      out["avg_union_sentences"] = round_to(report.avg_union_sentences, 2);
      out["avg_path_count"] = round_to(report.avg_path_count, 2);
      out["n_instances"] = report.n_instances;
      out["n_covered"] = report.n_covered;
      out["n_instances_with_paths"] = report.n_instances_with_paths;
      if (!report.per_instance.empty()) {
        json rows = json::array();
        for (const InstanceCoverage& row : report.per_instance) {
          json jr;
          jr["doc_id"] = row.doc_id;
          jr["instance"] = row.instance_index;
          jr["h"] = row.head;
          jr["t"] = row.tail;
          jr["covered"] = row.covered;
          jr["n_paths"] = row.n_paths;
          jr["union_size"] = row.union_size;
          rows.push_back(std::move(jr));
        }
        out["per_instance"] = std::move(rows);
      }
      return out.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream out;
      out << "config,coverage_pct,avg_union_sentences,avg_path_count,"
             "n_instances,n_covered,n_instances_with_paths\n";
      out << report.config_label << ',' << fixed(report.coverage * 100.0, 1) << ','
          << fixed(report.avg_union_sentences, 2) << ',' << fixed(report.avg_path_count, 2) << ','
          << report.n_instances << ',' << report.n_covered << ',' << report.n_instances_with_paths
          << '\n';
      return out.str();
    }
    case ReportFormat::Markdown: {
      std::ostringstream out;
      out << "| Config | Coverage | #Sent | #Path |\n";
      out << "| --- | --- | --- | --- |\n";
      out << "| " << report.config_label << " | " << fixed(report.coverage * 100.0, 1) << "% | "
          << fixed(report.avg_union_sentences, 2) << " | " << fixed(report.avg_path_count, 2)
          << " |\n";
      return out.str();
    }
  }
  throw ArgumentError("unknown report format");
}

std::string emit_report(const EvidenceSizeHistogram& hist, ReportFormat format) {
  static const char* kBucketNames[5] = {"0", "1", "2", "3", "4+"};
  switch (format) {
    case ReportFormat::Json: {
      json buckets;
      json proportions;
      for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        buckets[kBucketNames[b]] = hist.counts[b];
        proportions[kBucketNames[b]] = round_to(hist.proportions[b] * 100.0, 1);
      }
      json out;
      out["buckets"] = std::move(buckets);
      out["proportions_pct"] = std::move(proportions);
      out["avg_doc_sentences"] = round_to(hist.avg_doc_sentences, 1);
      out["n_instances"] = hist.n_instances;
      out["n_documents"] = hist.n_documents;
      return out.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream out;
      out << "bucket_0_pct,bucket_1_pct,bucket_2_pct,bucket_3_pct,bucket_ge4_pct,"
             "avg_doc_sentences,n_instances,n_documents\n";
      for (std::size_t b = 0; b < hist.proportions.size(); ++b) {
        out << fixed(hist.proportions[b] * 100.0, 1) << ',';
      }
      out << fixed(hist.avg_doc_sentences, 1) << ',' << hist.n_instances << ','
          << hist.n_documents << '\n';
      return out.str();
    }
    case ReportFormat::Markdown: {
      std::ostringstream out;
      out << "| 0 | 1 | 2 | 3 | >=4 | #Sent |\n";
      out << "| --- | --- | --- | --- | --- | --- |\n";
      out << "| ";
      for (std::size_t b = 0; b < hist.proportions.size(); ++b) {
        out << fixed(hist.proportions[b] * 100.0, 1) << "% | ";
      }
      out << fixed(hist.avg_doc_sentences, 1) << " |\n";
      return out.str();
    }
  }
  throw ArgumentError("unknown report format");
}

}  // namespace evipath
