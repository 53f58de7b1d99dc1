#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "evipath/corpus.hpp"
#include "evipath/errors.hpp"
#include "evipath/evidence_eval.hpp"
#include "evipath/jobs.hpp"
#include "evipath/pathfinder.hpp"
#include "evipath/pathrel.hpp"

namespace fs = std::filesystem;

namespace {

using namespace evipath;

// Flag problems that should exit with the usage code.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

void require_file(const std::string& path, const char* flag) {
  if (!fs::is_regular_file(path)) {
    throw UsageError(std::string("file for ") + flag + " not found: " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Empty output path -> stdout. A directory -> the canonical file name inside
// it. Anything else -> that exact path.
void write_output(const std::string& content, const std::string& output,
                  const std::string& canonical_name) {
  if (output.empty()) {
    std::cout << content;
    return;
  }
  fs::path target(output);
  if (fs::is_directory(target)) {
    target /= canonical_name;
  }
  std::ofstream out(target, std::ios::binary);
  if (!out) {
    throw UsageError("cannot write output file: " + target.string());
  }
  out << content;
  std::cerr << "wrote " << target.string() << "\n";
}

const char* format_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "md";
  }
  return "out";
}

struct CommonOptions {
  std::string input;
  std::string rules = "cmd";
  std::string format = "json";
  std::string output;
  int jobs = 0;
  int max_gap = 2;
  int max_bridges = 2;

  RuleConfig config() const {
    RuleConfig cfg = RuleConfig::from_rules(rules);
    if (max_gap < 0) throw UsageError("--max-gap must be >= 0");
    if (max_bridges < 1 || max_bridges > 2) throw UsageError("--max-bridges must be 1 or 2");
    cfg.max_gap = max_gap;
    cfg.max_bridges = max_bridges;
    return cfg;
  }
};

int run_validate(const std::string& input) {
  require_file(input, "--input");
  const std::vector<Document> corpus = load_docred_file(input);
  std::int64_t entities = 0, instances = 0;
  for (const Document& doc : corpus) {
    entities += static_cast<std::int64_t>(doc.entities.size());
    instances += static_cast<std::int64_t>(doc.instances.size());
  }
  std::cout << "ok: " << corpus.size() << " documents, " << entities << " entities, "
            << instances << " instances\n";
  return 0;
}

int run_stats(const CommonOptions& opt) {
  require_file(opt.input, "--input");
  const std::vector<Document> corpus = load_docred_file(opt.input);
  const ReportFormat format = report_format_from_string(opt.format);
  const EvidenceSizeHistogram hist = evidence_size_distribution(corpus);
  write_output(emit_report(hist, format), opt.output,
               std::string("evidence_hist.") + format_extension(format));
  return 0;
}

int run_paths(const CommonOptions& opt, int doc_index, int head, int tail) {
  require_file(opt.input, "--input");
  const std::vector<Document> corpus = load_docred_file(opt.input);
  if (doc_index < 0 || doc_index >= static_cast<int>(corpus.size())) {
    throw UsageError("--doc index " + std::to_string(doc_index) + " out of range (corpus has " +
                     std::to_string(corpus.size()) + " documents)");
  }
  const Document& doc = corpus[doc_index];
  const PathSet set = extract_paths(doc, head, tail, opt.config());
  write_output(dump_pathset_json(doc, set), opt.output, "paths.json");
  return 0;
}

int run_coverage(const CommonOptions& opt, bool detail) {
  require_file(opt.input, "--input");
  const std::vector<Document> corpus = load_docred_file(opt.input);
  const ReportFormat format = report_format_from_string(opt.format);
  const CoverageReport report = coverage_report(corpus, opt.config(), opt.jobs, detail);
  write_output(emit_report(report, format), opt.output,
               "coverage_" + opt.rules + "." + format_extension(format));
  return 0;
}

int run_export_segments(const CommonOptions& opt) {
  require_file(opt.input, "--input");
  const std::vector<Document> corpus = load_docred_file(opt.input);
  const RuleConfig config = opt.config();
  std::string out;
  for (const Document& doc : corpus) {
    const std::vector<SegmentRecord> records = export_segments(doc, config);
    out += dump_segments_jsonl(records);
  }
  write_output(out, opt.output, "segments.jsonl");
  return 0;
}

int run_score(const CommonOptions& opt, const std::string& vectors_path,
              const std::string& weights_path, double threshold, bool fit) {
  require_file(opt.input, "--input");
  require_file(vectors_path, "--vectors");
  require_file(weights_path, "--weights");
  const std::vector<Document> corpus = load_docred_file(opt.input);
  const VectorTable table = VectorTable::load_file(vectors_path);
  const MLPWeights weights = MLPWeights::load_file(weights_path);
  const EmbeddingLookupEncoder encoder(table);
  if (weights.input_dim != 4 * encoder.dimension()) {
    throw UsageError("--weights input_dim " + std::to_string(weights.input_dim) +
                     " does not match 4 x vector dimension (" +
                     std::to_string(4 * encoder.dimension()) + ")");
  }
  const std::vector<ScoredPair> scored =
      score_corpus(corpus, opt.config(), encoder, weights, opt.jobs);
  if (fit) {
    threshold = fit_threshold(scored, weights.labels, gold_tuples(corpus));
    std::cerr << "fitted threshold: " << threshold << "\n";
  }
  const std::vector<PredictionRow> rows = threshold_predictions(scored, weights.labels, threshold);
  write_output(dump_predictions_jsonl(rows), opt.output, "predictions.jsonl");
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gold_path,
             const std::string& output) {
  require_file(pred_path, "--pred");
  require_file(gold_path, "--gold");
  const std::vector<Document> gold_corpus = load_docred_file(gold_path);
  const std::vector<PredictionRow> rows = parse_predictions_jsonl(read_file(pred_path));
  std::set<RelationTuple> predictions;
  for (const PredictionRow& row : rows) {
    predictions.insert({row.doc_id, row.head, row.tail, row.relation});
  }
  const EvalResult result =
      evaluate_f1(predictions, gold_tuples(gold_corpus), build_locality(gold_corpus));

  auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
  auto prf_json = [&](const Prf& prf) {
    nlohmann::json out;
    out["precision"] = round6(prf.precision);
    out["recall"] = round6(prf.recall);
    out["f1"] = round6(prf.f1);
    out["tp"] = prf.tp;
    out["fp"] = prf.fp;
    out["fn"] = prf.fn;
    return out;
  };
  nlohmann::json out;
  out["precision"] = round6(result.overall.precision);
  out["recall"] = round6(result.overall.recall);
  out["overall_f1"] = round6(result.overall.f1);
  out["intra_f1"] = round6(result.intra.f1);
  out["inter_f1"] = round6(result.inter.f1);
  out["overall"] = prf_json(result.overall);
  out["intra"] = prf_json(result.intra);
  out["inter"] = prf_json(result.inter);
  write_output(out.dump(2) + "\n", output, "eval.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evidence path toolkit for document-level relation extraction"};
  app.require_subcommand(1);

  CommonOptions opt;
  int doc_index = 0, head = 0, tail = 0;
  bool detail = false;
  std::string vectors_path, weights_path, pred_path, gold_path;
  double threshold = 0.5;
  bool fit = false;

  CLI::App* validate = app.add_subcommand("validate", "parse a DocRED JSON corpus and check every invariant");
  validate->add_option("--input", opt.input, "DocRED JSON file")->required();

  CLI::App* stats = app.add_subcommand("stats", "evidence-size distribution and average document length");
  stats->add_option("--input", opt.input, "DocRED JSON file")->required();
  stats->add_option("--format", opt.format, "json, csv or md");
  stats->add_option("--output", opt.output, "output file or directory (default: stdout)");

  CLI::App* paths = app.add_subcommand("paths", "extracted paths for one entity pair");
  paths->add_option("--input", opt.input, "DocRED JSON file")->required();
  paths->add_option("--doc", doc_index, "document index")->required();
  paths->add_option("--head", head, "head entity index")->required();
  paths->add_option("--tail", tail, "tail entity index")->required();
  paths->add_option("--rules", opt.rules, "rule letters: c, m, d (default cmd)");
  paths->add_option("--max-gap", opt.max_gap, "consecutive window gap (default 2)");
  paths->add_option("--max-bridges", opt.max_bridges, "bridge chain limit, 1 or 2 (default 2)");
  paths->add_option("--output", opt.output, "output file or directory (default: stdout)");

  CLI::App* coverage = app.add_subcommand("coverage", "gold-evidence coverage statistics per rule configuration");
  coverage->add_option("--input", opt.input, "DocRED JSON file")->required();
  coverage->add_option("--rules", opt.rules, "rule letters: c, m, d")->required();
  coverage->add_option("--format", opt.format, "json, csv or md");
  coverage->add_option("--output", opt.output, "output file or directory (default: stdout)");
  coverage->add_option("--jobs", opt.jobs, "worker threads (default: all cores, or EVIPATH_JOBS)");
  coverage->add_option("--max-gap", opt.max_gap, "consecutive window gap (default 2)");
  coverage->add_option("--max-bridges", opt.max_bridges, "bridge chain limit, 1 or 2 (default 2)");
  coverage->add_flag("--detail", detail, "include per-instance rows (json only)");

  CLI::App* export_segments_cmd = app.add_subcommand("export-segments", "JSONL segments for labeled pairs");
  export_segments_cmd->add_option("--input", opt.input, "DocRED JSON file")->required();
  export_segments_cmd->add_option("--rules", opt.rules, "rule letters: c, m, d (default cmd)");
  export_segments_cmd->add_option("--max-gap", opt.max_gap, "consecutive window gap (default 2)");
  export_segments_cmd->add_option("--max-bridges", opt.max_bridges, "bridge chain limit, 1 or 2 (default 2)");
  export_segments_cmd->add_option("--output", opt.output, "output file or directory (default: stdout)");

  CLI::App* score = app.add_subcommand("score", "score every entity pair with supplied vectors and weights");
  score->add_option("--input", opt.input, "DocRED JSON file")->required();
  score->add_option("--vectors", vectors_path, "token vectors, one \"token v1 ... vd\" per line")->required();
  score->add_option("--weights", weights_path, "perceptron weights JSON")->required();
  CLI::Option* threshold_opt = score->add_option("--threshold", threshold, "prediction threshold in [0, 1]");
  CLI::Option* fit_opt = score->add_flag("--fit-threshold", fit, "fit the threshold on this corpus by F1 maximization");
  threshold_opt->excludes(fit_opt);
  score->add_option("--rules", opt.rules, "rule letters: c, m, d (default cmd)");
  score->add_option("--max-gap", opt.max_gap, "consecutive window gap (default 2)");
  score->add_option("--max-bridges", opt.max_bridges, "bridge chain limit, 1 or 2 (default 2)");
  score->add_option("--jobs", opt.jobs, "worker threads (default: all cores, or EVIPATH_JOBS)");
  score->add_option("--output", opt.output, "output file or directory (default: stdout)");

  CLI::App* eval = app.add_subcommand("eval", "micro F1 of a predictions file against a gold corpus");
  eval->add_option("--pred", pred_path, "predictions JSONL")->required();
  eval->add_option("--gold", gold_path, "gold DocRED JSON file")->required();
  eval->add_option("--output", opt.output, "output file or directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(opt.input);
    if (*stats) return run_stats(opt);
    if (*paths) return run_paths(opt, doc_index, head, tail);
    if (*coverage) return run_coverage(opt, detail);
    if (*export_segments_cmd) return run_export_segments(opt);
    if (*score) {
      if (!fit && threshold_opt->count() == 0) {
        throw UsageError("score requires --threshold or --fit-threshold");
      }
      if (threshold < 0.0 || threshold > 1.0) {
        throw UsageError("--threshold must be in [0, 1]");
      }
      return run_score(opt, vectors_path, weights_path, threshold, fit);
    }
    if (*eval) return run_eval(pred_path, gold_path, opt.output);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // Parse, schema, validation and contract failures all indicate bad input
    // data rather than bad usage.
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
