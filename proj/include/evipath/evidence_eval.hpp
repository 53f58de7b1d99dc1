#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evipath/corpus.hpp"
#include "evipath/pathfinder.hpp"

namespace evipath {

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat report_format_from_string(const std::string& s);

// Distribution of gold evidence sizes over all relation instances, bucketed
// as 0, 1, 2, 3, >=4, plus the mean sentence count per document.
struct EvidenceSizeHistogram {
  std::array<std::int64_t, 5> counts{};
  std::array<double, 5> proportions{};
  double avg_doc_sentences = 0.0;
  std::int64_t n_instances = 0;
  std::int64_t n_documents = 0;

  bool operator==(const EvidenceSizeHistogram&) const = default;
};

EvidenceSizeHistogram evidence_size_distribution(std::span<const Document> corpus);

struct InstanceCoverage {
  std::string doc_id;
  int instance_index = 0;
  int head = 0;
  int tail = 0;
  bool covered = false;
  int n_paths = 0;
  int union_size = 0;

  bool operator==(const InstanceCoverage&) const = default;
};

// Path-sufficiency statistics for one rule configuration. Instances with
// empty gold evidence are excluded throughout. Coverage is the fraction of
// remaining instances whose evidence is a subset of the union of extracted
// path sentences; the averages are over instances with at least one path.
struct CoverageReport {
  std::string config_label;
  double coverage = 0.0;
  double avg_union_sentences = 0.0;  // #Sent
  double avg_path_count = 0.0;       // #Path
  std::int64_t n_instances = 0;
  std::int64_t n_covered = 0;
  std::int64_t n_instances_with_paths = 0;
  // Integer accumulators kept so parallel and serial runs agree bit-for-bit.
  std::int64_t sum_union_sentences = 0;
  std::int64_t sum_path_count = 0;
  std::vector<InstanceCoverage> per_instance;  // filled only when requested

  bool operator==(const CoverageReport&) const = default;
};

// Single-threaded reference implementation.
CoverageReport coverage_report_serial(std::span<const Document> corpus,
                                      const RuleConfig& config,
                                      bool keep_detail = false);

// OpenMP kernel over documents; jobs <= 0 resolves via resolve_jobs().
// Produces output identical to the serial reference for every jobs value.
CoverageReport coverage_report(std::span<const Document> corpus,
                               const RuleConfig& config,
                               int jobs = 0,
                               bool keep_detail = false);

// Deterministic serialization. Markdown reproduces the
// "Config | Coverage | #Sent | #Path" table layout; percentages are printed
// with 1 decimal and averages with 2.
std::string emit_report(const CoverageReport& report, ReportFormat format);
std::string emit_report(const EvidenceSizeHistogram& hist, ReportFormat format);

}  // namespace evipath
