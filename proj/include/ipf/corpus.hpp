#pragma once

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ipf/error.hpp"
#include "ipf/fingerprint.hpp"
#include "ipf/inventory.hpp"
#include "ipf/text.hpp"

namespace ipf {

struct CategoryId {
  std::string name;
  friend auto operator<=>(const CategoryId&, const CategoryId&) = default;
  friend bool operator==(const CategoryId&, const CategoryId&) = default;
};

enum class StreamFormat { token_per_line, count_file };
enum class UnknownSensePolicy { skip_and_tally, fail };

struct KeyCount {
  std::string key;
  std::uint64_t count = 0;
  friend bool operator==(const KeyCount&, const KeyCount&) = default;
};

/// Pull-style reader over WSD output.
///
/// token-per-line: `token TAB lemma TAB sense_key`, one occurrence per line.
/// count-file:     `sense_key TAB count`, lines with count 0 yield nothing.
/// Blank lines and lines starting with `#` are skipped in both formats.
/// Sense keys are passed through unparsed; the aggregator decides what is
/// known.
class AnnotatedStreamReader {
 public:
  AnnotatedStreamReader(std::istream& in, StreamFormat format) : in_(in), format_(format) {}

  std::optional<KeyCount> next() {
    while (text::getline(in_, line_)) {
      ++line_no_;
      if (line_.empty() || line_[0] == '#' || text::is_blank(line_)) continue;
      const auto f = text::split(line_, '\t');
      if (format_ == StreamFormat::token_per_line) {
        if (f.size() != 3) fail(Errc::malformed_line, "expected token<TAB>lemma<TAB>sense_key", line_no_);
        if (f[2].empty()) fail(Errc::malformed_line, "empty sense key", line_no_);
        return KeyCount{std::string(f[2]), 1};
      }
      if (f.size() != 2 || f[0].empty()) fail(Errc::malformed_line, "expected sense_key<TAB>count", line_no_);
      const auto count_text = f[1];
      if (!count_text.empty() && count_text[0] == '-' && text::all_digits(count_text.substr(1)))
        fail(Errc::negative_count, std::string(count_text), line_no_);
      const auto c = text::all_digits(count_text) ? text::parse_int<std::uint64_t>(count_text) : std::nullopt;
      if (!c) fail(Errc::malformed_line, "count is not a non-negative integer", line_no_);
      if (*c == 0) continue;
      return KeyCount{std::string(f[0]), *c};
    }
    if (in_.bad()) fail(Errc::io_failure, "read error", line_no_);
    return std::nullopt;
  }

  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  StreamFormat format_;
  std::string line_;
  std::size_t line_no_ = 0;
};

inline std::vector<KeyCount> read_annotated_stream(std::istream& in, StreamFormat format) {
  AnnotatedStreamReader reader(in, format);
  std::vector<KeyCount> out;
  while (auto kc = reader.next()) out.push_back(std::move(*kc));
  return out;
}

/// Sparse WSF matrix: occurrences per (category, sense). Senses are addressed
/// by their flat ordinal in the fingerprinted inventory, which fixes the
/// (synset, j) pair.
class WsfTable {
 public:
  WsfTable() = default;
  WsfTable(std::vector<CategoryId> categories, std::string inventory_fingerprint, std::size_t sense_count)
      : categories_(std::move(categories)),
        inventory_fingerprint_(std::move(inventory_fingerprint)),
        sense_count_(sense_count),
        counts_(categories_.size()) {}

  const std::vector<CategoryId>& categories() const { return categories_; }
  const std::string& inventory_fingerprint() const { return inventory_fingerprint_; }
  std::size_t sense_count() const { return sense_count_; }

  std::optional<std::size_t> category_index(std::string_view name) const {
    for (std::size_t k = 0; k < categories_.size(); ++k)
      if (categories_[k].name == name) return k;
    return std::nullopt;
  }

  std::uint64_t count(std::size_t category, std::size_t ordinal) const {
    const auto& m = counts_.at(category);
    auto it = m.find(ordinal);
    return it == m.end() ? 0 : it->second;
  }

  void add(std::size_t category, std::size_t ordinal, std::uint64_t c) {
    ensure(ordinal < sense_count_, "sense ordinal outside inventory");
    if (c == 0) return;
    counts_.at(category)[ordinal] += c;
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& m : counts_)
      for (const auto& [ord, c] : m) t += c;
    return t;
  }

  /// Nonzero cells as (category, ordinal, count), sorted.
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> entries() const {
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> out;
    for (std::size_t k = 0; k < counts_.size(); ++k)
      for (const auto& [ord, c] : counts_[k]) out.emplace_back(k, ord, c);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Content checksum; independent of insertion order.
  std::string fingerprint() const {
    Fingerprinter fp;
    fp.field("ipf-wsf").field(inventory_fingerprint_).number(categories_.size());
    for (const auto& c : categories_) fp.field(c.name);
    for (const auto& [k, ord, c] : entries()) fp.number(k).number(ord).number(c);
    return fp.hex();
  }

  /// In-place pointwise sum; both tables must share inventory and categories.
  void absorb(const WsfTable& b) {
    if (inventory_fingerprint_ != b.inventory_fingerprint_ || sense_count_ != b.sense_count_)
      fail(Errc::fingerprint_mismatch, inventory_fingerprint_ + " vs " + b.inventory_fingerprint_);
    if (categories_ != b.categories_) fail(Errc::category_mismatch, "category lists differ");
    for (std::size_t k = 0; k < b.counts_.size(); ++k)
      for (const auto& [ord, c] : b.counts_[k]) counts_[k][ord] += c;
  }

  friend bool operator==(const WsfTable& a, const WsfTable& b) {
    return a.categories_ == b.categories_ && a.inventory_fingerprint_ == b.inventory_fingerprint_ &&
           a.sense_count_ == b.sense_count_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<CategoryId> categories_;
  std::string inventory_fingerprint_;
  std::size_t sense_count_ = 0;
  std::vector<std::unordered_map<std::size_t, std::uint64_t>> counts_;
};

inline WsfTable merge_wsf(const WsfTable& a, const WsfTable& b) {
  WsfTable out = a;
  out.absorb(b);
  return out;
}

inline void check_same_inventory(const WsfTable& wsf, const SynsetInventory& inv) {
  if (wsf.inventory_fingerprint() != inv.fingerprint())
    fail(Errc::fingerprint_mismatch, "WSF table was built against a different inventory");
}

/// Occurrences of sense j of synset i in category k.
inline std::uint64_t wsf_count(const WsfTable& wsf, const SynsetInventory& inv, std::size_t synset_index,
                               std::size_t sense, std::size_t category) {
  return wsf.count(category, inv.first_ordinal(synset_index) + sense);
}

/// Sum over j of counts[(k, i, j)]; 0 when the synset never occurs in k.
inline std::uint64_t category_totals(const WsfTable& wsf, const SynsetInventory& inv, const SynsetId& id,
                                     const CategoryId& category) {
  check_same_inventory(wsf, inv);
  const auto i = inv.index_of(id);
  if (!i) fail(Errc::unknown_synset, id.to_string());
  const auto k = wsf.category_index(category.name);
  if (!k) fail(Errc::unknown_category, category.name);
  std::uint64_t total = 0;
  const std::size_t n = inv.synset(*i).senses.size();
  for (std::size_t j = 0; j < n; ++j) total += wsf_count(wsf, inv, *i, j, *k);
  return total;
}

/// One input stream of a category, opened lazily so that aggregation can
/// run on worker threads.
struct StreamSource {
  std::string label;
  StreamFormat format = StreamFormat::token_per_line;
  std::function<std::unique_ptr<std::istream>()> open;
};

inline std::optional<StreamFormat> format_for_extension(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".tsv") return StreamFormat::token_per_line;
  if (ext == ".cnt") return StreamFormat::count_file;
  return std::nullopt;
}

inline StreamSource file_source(const std::filesystem::path& path) {
  const auto fmt = format_for_extension(path);
  if (!fmt) fail(Errc::invalid_config, path.string() + ": unknown corpus file extension (want .tsv or .cnt)");
  return StreamSource{path.string(), *fmt, [path] {
                        auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
                        if (!*f) fail(Errc::io_failure, "cannot open " + path.string());
                        return std::unique_ptr<std::istream>(std::move(f));
                      }};
}

inline StreamSource text_source(std::string label, std::string content, StreamFormat format) {
  auto shared = std::make_shared<const std::string>(std::move(content));
  return StreamSource{std::move(label), format,
                      [shared] { return std::unique_ptr<std::istream>(std::make_unique<std::istringstream>(*shared)); }};
}

struct CategoryStreams {
  CategoryId category;
  std::vector<StreamSource> sources;
};

using CorpusPartition = std::vector<CategoryStreams>;

/// Sense keys that were not in the inventory, with their skipped mass.
struct UnknownTally {
  std::uint64_t occurrences = 0;
  std::map<std::string, std::uint64_t> keys;

  void add(const std::string& key, std::uint64_t c) {
    occurrences += c;
    keys[key] += c;
  }
  void merge(const UnknownTally& o) {
    occurrences += o.occurrences;
    for (const auto& [k, c] : o.keys) keys[k] += c;
  }
  friend bool operator==(const UnknownTally&, const UnknownTally&) = default;
};

struct Aggregation {
  WsfTable table;
  UnknownTally unknown;
  std::uint64_t accepted = 0;  // annotation mass that landed in the table
};

namespace detail {

inline Aggregation aggregate_one(const StreamSource& src, std::size_t category, const std::vector<CategoryId>& cats,
                                 const SynsetInventory& inv, UnknownSensePolicy policy) {
  Aggregation agg{WsfTable(cats, inv.fingerprint(), inv.sense_count()), {}, 0};
  auto in = src.open();
  AnnotatedStreamReader reader(*in, src.format);
  try {
    while (auto kc = reader.next()) {
      if (auto loc = inv.locate(kc->key)) {
        agg.table.add(category, loc->ordinal, kc->count);
        agg.accepted += kc->count;
      } else if (policy == UnknownSensePolicy::fail) {
        fail(Errc::unknown_sense, kc->key, reader.line_number());
      } else {
        agg.unknown.add(kc->key, kc->count);
      }
    }
  } catch (const Error& e) {
    if (e.is_internal()) throw;
    throw Error(e.code(), src.label + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
  }
  return agg;
}

}  // namespace detail

/// Builds the WSF table for a partitioned corpus. Each source is aggregated
/// independently (optionally on `threads` workers) and the partial tables
/// are merged; the result does not depend on scheduling.
inline Aggregation aggregate_wsf(const CorpusPartition& partition, const SynsetInventory& inv,
                                 UnknownSensePolicy policy, unsigned threads = 1) {
  if (partition.empty()) fail(Errc::invalid_config, "corpus has no categories");
  std::vector<CategoryId> cats;
  std::set<std::string> names;
  for (const auto& c : partition) {
    if (c.category.name.empty()) fail(Errc::invalid_config, "empty category name");
    if (!names.insert(c.category.name).second) fail(Errc::invalid_config, "duplicate category " + c.category.name);
    cats.push_back(c.category);
  }

  std::vector<std::pair<std::size_t, const StreamSource*>> jobs;
  for (std::size_t k = 0; k < partition.size(); ++k)
    for (const auto& s : partition[k].sources) jobs.emplace_back(k, &s);

  std::vector<std::optional<Aggregation>> partial(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n; (n = next.fetch_add(1)) < jobs.size();) {
      try {
        partial[n] = detail::aggregate_one(*jobs[n].second, jobs[n].first, cats, inv, policy);
      } catch (...) {
        errors[n] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Aggregation out{WsfTable(cats, inv.fingerprint(), inv.sense_count()), {}, 0};
  for (auto& p : partial) {
    out.table.absorb(p->table);
    out.unknown.merge(p->unknown);
    out.accepted += p->accepted;
  }
  return out;
}

/// `<root>/<category>/...` with `.tsv`/`.cnt` files (other files ignored),
/// categories sorted by name; or a JSON manifest
/// `{"category": ["relative/or/absolute/path", ...], ...}` in document order.
inline CorpusPartition discover_corpus(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  CorpusPartition out;
  std::error_code ec;
  if (fs::is_directory(root, ec)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(d))
        if (e.is_regular_file() && format_for_extension(e.path())) files.push_back(e.path());
      std::sort(files.begin(), files.end());
      CategoryStreams cs{CategoryId{d.filename().string()}, {}};
      for (const auto& f : files) cs.sources.push_back(file_source(f));
      out.push_back(std::move(cs));
    }
    if (out.empty()) fail(Errc::invalid_config, root.string() + ": no category directories");
    return out;
  }

  std::ifstream in(root, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open corpus " + root.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_document, root.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.empty())
    fail(Errc::malformed_document, root.string() + ": manifest must map categories to file lists");
  const auto base = root.parent_path();
  for (const auto& [name, files] : doc.items()) {
    if (!files.is_array()) fail(Errc::malformed_document, "category " + name + ": expected an array of paths");
    CategoryStreams cs{CategoryId{name}, {}};
    for (const auto& f : files) {
      if (!f.is_string()) fail(Errc::malformed_document, "category " + name + ": paths must be strings");
      fs::path p = f.get<std::string>();
      cs.sources.push_back(file_source(p.is_absolute() ? p : base / p));
    }
    out.push_back(std::move(cs));
  }
  return out;
}

}  // namespace ipf
