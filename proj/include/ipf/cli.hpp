#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ipf/core.hpp"
#include "ipf/corpus.hpp"
#include "ipf/error.hpp"
#include "ipf/inventory.hpp"
#include "ipf/io_formats.hpp"
#include "ipf/pipeline.hpp"

namespace ipf::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInternalError = 2 };

/// `.json` inventories are JSON, anything else is read as WordNet index.sense.
inline SynsetInventory load_inventory_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open inventory " + path.string());
  try {
    return path.extension() == ".json" ? load_json_inventory(in) : load_index_sense(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what(), e.line());
  }
}

struct BuildOptions {
  std::string inventory;
  std::string corpus;
  double alpha = 0.8;
  std::string footprint_mode = "inclusive";
  std::string variant = "both";
  std::uint64_t min_count = 0;
  std::string unknown_sense = "skip";
  std::string format = "jsonl";
  std::string out;
  bool verbose = false;
  unsigned threads = 1;

  PipelineConfig config() const {
    PipelineConfig cfg;
    cfg.alpha = alpha;
    cfg.footprint_mode = footprint_mode == "exclusive" ? FootprintMode::exclusive : FootprintMode::inclusive;
    if (variant == "1983") cfg.variants = {Variant::v1983};
    else if (variant == "1993") cfg.variants = {Variant::v1993};
    cfg.min_count = min_count;
    cfg.unknown_sense_policy =
        unknown_sense == "fail" ? UnknownSensePolicy::fail : UnknownSensePolicy::skip_and_tally;
    cfg.verbose = verbose;
    cfg.threads = threads;
    return cfg;
  }
};

inline void add_pipeline_flags(CLI::App* cmd, BuildOptions& o) {
  cmd->add_option("--alpha", o.alpha, "footprint confidence level in (0,1]")->capture_default_str();
  cmd->add_option("--footprint-mode", o.footprint_mode, "inclusive|exclusive")
      ->check(CLI::IsMember({"inclusive", "exclusive"}))
      ->capture_default_str();
  cmd->add_option("--variant", o.variant, "1983|1993|both")
      ->check(CLI::IsMember({"1983", "1993", "both"}))
      ->capture_default_str();
  cmd->add_option("--min-count", o.min_count, "zero counts below this threshold")->capture_default_str();
  cmd->add_option("--unknown-sense", o.unknown_sense, "skip|fail")
      ->check(CLI::IsMember({"skip", "fail"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

struct BuildResult {
  SynsetInventory inventory;
  Aggregation aggregation;
  PipelineConfig config;
};

inline BuildResult load_and_aggregate(const BuildOptions& o, std::ostream& err) {
  auto cfg = o.config();
  cfg.validate();
  auto inv = load_inventory_file(o.inventory);
  auto partition = discover_corpus(o.corpus);
  auto agg = aggregate_wsf(partition, inv, cfg.unknown_sense_policy, cfg.threads);
  if (agg.unknown.occurrences > 0)
    err << "ipf-build skipped_unknown occurrences=" << agg.unknown.occurrences
        << " distinct=" << agg.unknown.keys.size() << '\n';
  return {std::move(inv), std::move(agg), std::move(cfg)};
}

inline std::filesystem::path with_extension(std::filesystem::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::io_failure, "cannot write " + path.string());
  w(f);
}

inline int run_build(const BuildOptions& o, std::ostream& out, std::ostream& err) {
  auto b = load_and_aggregate(o, err);
  const auto records = build_ipf_synsets(b.aggregation.table, b.inventory, b.config);
  const auto header = make_header(b.config, b.aggregation.table);

  const std::filesystem::path target = o.out;
  if (o.format == "jsonl" || o.format == "both") {
    const auto path = o.format == "both" ? with_extension(target, ".jsonl") : target;
    write_file(path, [&](std::ostream& f) { write_jsonl(records, header, f); });
  }
  if (o.format == "tsv" || o.format == "both") {
    const auto path = o.format == "both" ? with_extension(target, ".tsv") : target;
    write_file(path, [&](std::ostream& f) { write_tsv(records, header, f); });
  }

  std::size_t no_data = 0;
  for (const auto& r : records) no_data += r.status == RecordStatus::no_data;
  out << "ipf-build ok synsets=" << b.inventory.synset_count() << " senses=" << records.size()
      << " no_data=" << no_data << " categories=" << header.n_categories() << " alpha=" << format_number(b.config.alpha)
      << " mode=" << to_string(b.config.footprint_mode) << '\n';
  return kOk;
}

inline std::string value_or_na(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

inline void print_synset(const std::vector<IpfSynsetRecord>& records, const OutputHeader& h, std::ostream& out) {
  out << "synset " << records.front().synset_id.to_string() << " alpha=" << format_number(h.alpha)
      << " mode=" << to_string(h.footprint_mode) << " categories=" << h.n_categories() << '\n';
  for (const auto& r : records) {
    out << "sense " << r.sense_index << ' ' << r.sense_key << " status=" << to_string(r.status) << '\n';
    if (r.status == RecordStatus::ok) {
      out << "  footprint";
      for (auto k : r.footprint) out << ' ' << h.categories.at(k);
      out << " mass=" << format_number(r.footprint_mass) << '\n';
      for (auto v : {Variant::v1983, Variant::v1993})
        if (const auto& iv = r.interval(v))
          out << "  interval_" << to_string(v) << " [" << format_number(iv->low) << ", " << format_number(iv->up)
              << "]\n";
    }
    if (!r.diagnostics) {
      out << "  (no per-category diagnostics; build with --verbose)\n";
      continue;
    }
    const auto& d = *r.diagnostics;
    out << "  category\tpmv\twsp\tpi_1983\tpi_1993\n";
    for (std::size_t k = 0; k < h.categories.size(); ++k) {
      auto at = [k](const std::vector<std::optional<double>>& v) {
        return k < v.size() ? value_or_na(v[k]) : std::string("-");
      };
      out << "  " << h.categories[k] << '\t' << at(d.pmv) << '\t' << at(d.wsp) << '\t' << at(d.possibility_1983)
          << '\t' << at(d.possibility_1993) << '\n';
    }
  }
}

inline JsonlDocument read_results_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open results " + path);
  try {
    return read_jsonl(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what(), e.line());
  }
}

inline int run_inspect(const std::string& synset, const std::string& results, const BuildOptions& o,
                       std::ostream& out, std::ostream& err) {
  const auto id = try_parse_synset_id(synset);
  if (!id) fail(Errc::unknown_synset, "malformed synset id '" + synset + "' (expected OFFSET-POS)");
  if (!results.empty()) {
    auto doc = read_results_file(results);
    std::vector<IpfSynsetRecord> mine;
    for (auto& r : doc.records)
      if (r.synset_id == *id) mine.push_back(std::move(r));
    if (mine.empty()) fail(Errc::unknown_synset, synset + " not in " + results);
    print_synset(mine, doc.header, out);
    return kOk;
  }
  if (o.inventory.empty() || o.corpus.empty())
    fail(Errc::invalid_config, "inspect needs --results or both --inventory and --corpus");
  BuildOptions verbose = o;
  verbose.verbose = true;
  auto b = load_and_aggregate(verbose, err);
  const auto records = build_synset_records(b.aggregation.table, b.inventory, b.config, *id);
  print_synset(records, make_header(b.config, b.aggregation.table), out);
  return kOk;
}

inline int run_stats(const std::string& results, std::ostream& out) {
  const auto doc = read_results_file(results);
  out << format_stats(summarize(doc.records));
  return kOk;
}

inline int run_validate(const std::string& inventory, std::ostream& out) {
  const auto inv = load_inventory_file(inventory);
  std::size_t singletons = 0;
  for (const auto& s : inv.synsets()) singletons += s.senses.size() == 1;
  out << "inventory ok synsets=" << inv.synset_count() << " senses=" << inv.sense_count()
      << " singleton_synsets=" << singletons << " fingerprint=" << inv.fingerprint() << '\n';
  return kOk;
}

/// Entry point shared by the `ipf` binary and the tests. Exit codes: 0 ok,
/// 1 input or usage error, 2 internal invariant violation.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interval probabilistic fuzzy synset builder", "ipf"};
  app.require_subcommand(1);

  BuildOptions opts;
  std::string results;
  std::string synset;

  auto* build = app.add_subcommand("build", "build IPF synsets from an inventory and a categorized corpus");
  build->add_option("--inventory", opts.inventory, "index.sense or .json inventory")->required();
  build->add_option("--corpus", opts.corpus, "corpus root directory or JSON manifest")->required();
  build->add_option("--out", opts.out, "output path")->required();
  build->add_option("--format", opts.format, "jsonl|tsv|both")
      ->check(CLI::IsMember({"jsonl", "tsv", "both"}))
      ->capture_default_str();
  build->add_flag("--verbose", opts.verbose, "emit per-category PMV/WSP/possibility diagnostics");
  add_pipeline_flags(build, opts);

  auto* inspect = app.add_subcommand("inspect", "print one synset's diagnostics and intervals");
  inspect->add_option("synset", synset, "synset id, OFFSET-POS")->required();
  inspect->add_option("--results", results, "JSONL from a previous build");
  inspect->add_option("--inventory", opts.inventory, "rebuild from this inventory");
  inspect->add_option("--corpus", opts.corpus, "rebuild from this corpus");
  add_pipeline_flags(inspect, opts);

  auto* stats = app.add_subcommand("stats", "summarize a JSONL results file");
  stats->add_option("--results", results, "JSONL results")->required();

  auto* validate = app.add_subcommand("validate-inventory", "parse an inventory and report its integrity");
  validate->add_option("--inventory", opts.inventory, "index.sense or .json inventory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*build) {
      opts.config().validate();
      return run_build(opts, out, err);
    }
    if (*inspect) {
      opts.config().validate();
      return run_inspect(synset, results, opts, out, err);
    }
    if (*stats) return run_stats(results, out);
    if (*validate) return run_validate(opts.inventory, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_internal() ? kInternalError : kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

}  // namespace ipf::cli
