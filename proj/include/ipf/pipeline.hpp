#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ipf/core.hpp"
#include "ipf/corpus.hpp"
#include "ipf/error.hpp"
#include "ipf/inventory.hpp"

namespace ipf {

struct PipelineConfig {
  double alpha = 0.8;
  FootprintMode footprint_mode = FootprintMode::inclusive;
  std::vector<Variant> variants{Variant::v1983, Variant::v1993};
  std::uint64_t min_count = 0;
  UnknownSensePolicy unknown_sense_policy = UnknownSensePolicy::skip_and_tally;
  bool verbose = false;  // attach per-category diagnostics to every record
  unsigned threads = 1;

  bool wants(Variant v) const { return std::find(variants.begin(), variants.end(), v) != variants.end(); }

  void validate() const {
    check_alpha(alpha);
    if (variants.empty()) fail(Errc::invalid_config, "at least one variant is required");
    if (threads == 0) fail(Errc::invalid_config, "threads must be >= 1");
  }
};

enum class RecordStatus { ok, no_data };

constexpr std::string_view to_string(RecordStatus s) { return s == RecordStatus::ok ? "ok" : "no-data"; }

/// Per-category values for one sense, NoData as nullopt. Possibility vectors
/// are empty for variants that were not requested.
struct RecordDiagnostics {
  std::vector<std::optional<double>> pmv;
  std::vector<std::optional<double>> wsp;
  std::vector<std::optional<double>> possibility_1983;
  std::vector<std::optional<double>> possibility_1993;
  friend bool operator==(const RecordDiagnostics&, const RecordDiagnostics&) = default;
};

struct IpfSynsetRecord {
  SynsetId synset_id;
  std::string sense_key;
  std::size_t sense_index = 0;
  RecordStatus status = RecordStatus::no_data;
  std::optional<IntervalMembership> v1983;
  std::optional<IntervalMembership> v1993;
  std::vector<std::size_t> footprint;  // category indices in selection order
  double footprint_mass = 0.0;
  std::optional<RecordDiagnostics> diagnostics;

  const std::optional<IntervalMembership>& interval(Variant v) const { return v == Variant::v1983 ? v1983 : v1993; }
  std::optional<IntervalMembership>& interval(Variant v) { return v == Variant::v1983 ? v1983 : v1993; }

  friend bool operator==(const IpfSynsetRecord&, const IpfSynsetRecord&) = default;
};

namespace detail {

/// Everything needed for one synset: its count matrix and lazily computed
/// per-category possibility distributions.
class SynsetWork {
 public:
  SynsetWork(const WsfTable& wsf, const SynsetInventory& inv, std::size_t synset_index, std::uint64_t min_count)
      : n_(wsf.categories().size()), size_(inv.synset(synset_index).senses.size()), counts_(n_ * size_) {
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t j = 0; j < size_; ++j) {
        auto c = wsf_count(wsf, inv, synset_index, j, k);
        counts_[k * size_ + j] = c < min_count ? 0 : c;
      }
    pmv_.reserve(n_);
    for (std::size_t k = 0; k < n_; ++k)
      pmv_.push_back(compute_pmv(std::span<const std::uint64_t>(counts_).subspan(k * size_, size_)));
    for (auto& cache : possibility_) cache.resize(n_);
  }

  const PmvRow& pmv(std::size_t k) const { return pmv_[k]; }

  WspRow wsp(std::size_t j) const {
    std::vector<std::uint64_t> by_category(n_);
    for (std::size_t k = 0; k < n_; ++k) by_category[k] = counts_[k * size_ + j];
    return compute_wsp(by_category);
  }

  std::optional<double> possibility(Variant v, std::size_t k, std::size_t j) {
    if (pmv_[k].is_no_data()) return std::nullopt;
    auto& slot = possibility_[static_cast<std::size_t>(v)][k];
    if (!slot) slot = possibility_profile(pmv_[k], v);
    return (*slot)[j];
  }

  PossibilityProfile profile(Variant v, std::size_t j) {
    PossibilityProfile p{v, {}};
    for (std::size_t k = 0; k < n_; ++k) p.values.push_back(possibility(v, k, j));
    return p;
  }

 private:
  std::size_t n_;
  std::size_t size_;
  std::vector<std::uint64_t> counts_;  // [k][j]
  std::vector<PmvRow> pmv_;
  std::array<std::vector<std::optional<std::vector<double>>>, 2> possibility_;
};

inline void build_synset(const WsfTable& wsf, const SynsetInventory& inv, const PipelineConfig& cfg,
                         std::size_t synset_index, std::span<IpfSynsetRecord> out) {
  const auto& synset = inv.synset(synset_index);
  const std::size_t n = wsf.categories().size();
  SynsetWork work(wsf, inv, synset_index, cfg.min_count);

  for (std::size_t j = 0; j < synset.senses.size(); ++j) {
    IpfSynsetRecord rec;
    rec.synset_id = synset.id;
    rec.sense_key = synset.senses[j].raw;
    rec.sense_index = j;
    const WspRow wsp = work.wsp(j);

    if (!wsp.is_no_data()) {
      const auto fp = alpha_footprint(wsp, cfg.alpha, cfg.footprint_mode);
      rec.status = RecordStatus::ok;
      rec.footprint = fp.categories;
      rec.footprint_mass = fp.cumulative_prob;
      for (auto v : cfg.variants) {
        PossibilityProfile restricted{v, std::vector<std::optional<double>>(n)};
        for (std::size_t k : fp.categories) {
          // A sense occurrence implies its synset occurs in that category.
          ensure(!work.pmv(k).is_no_data(), "footprint category without synset occurrences");
          restricted.values[k] = work.possibility(v, k, j);
        }
        rec.interval(v) = interval_from_footprint(restricted, fp);
      }
    }

    if (cfg.verbose) {
      RecordDiagnostics d;
      for (std::size_t k = 0; k < n; ++k) {
        d.pmv.push_back(work.pmv(k).at(j));
        d.wsp.push_back(wsp.at(k));
      }
      if (cfg.wants(Variant::v1983)) d.possibility_1983 = work.profile(Variant::v1983, j).values;
      if (cfg.wants(Variant::v1993)) d.possibility_1993 = work.profile(Variant::v1993, j).values;
      rec.diagnostics = std::move(d);
    }
    out[j] = std::move(rec);
  }
}

}  // namespace detail

/// One record per (synset, sense) of the inventory, in inventory order.
/// Synsets are independent; `cfg.threads` workers fill disjoint slots, so
/// the output does not depend on scheduling.
inline std::vector<IpfSynsetRecord> build_ipf_synsets(const WsfTable& wsf, const SynsetInventory& inv,
                                                      const PipelineConfig& cfg) {
  cfg.validate();
  check_same_inventory(wsf, inv);
  if (wsf.categories().empty()) fail(Errc::invalid_config, "no categories");

  std::vector<IpfSynsetRecord> out(inv.sense_count());
  constexpr std::size_t chunk = 512;
  const std::size_t chunks = (inv.synset_count() + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(chunks);
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
      try {
        const std::size_t end = std::min(inv.synset_count(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i)
          detail::build_synset(wsf, inv, cfg, i,
                               std::span(out).subspan(inv.first_ordinal(i), inv.synset(i).senses.size()));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.threads, std::max<std::size_t>(chunks, 1)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Records of a single synset, as build_ipf_synsets would emit them.
inline std::vector<IpfSynsetRecord> build_synset_records(const WsfTable& wsf, const SynsetInventory& inv,
                                                         const PipelineConfig& cfg, const SynsetId& id) {
  cfg.validate();
  check_same_inventory(wsf, inv);
  const auto i = inv.index_of(id);
  if (!i) fail(Errc::unknown_synset, id.to_string());
  std::vector<IpfSynsetRecord> out(inv.synset(*i).senses.size());
  detail::build_synset(wsf, inv, cfg, *i, out);
  return out;
}

struct FuzzyMembership {
  SynsetId synset_id;
  std::string sense_key;
  double membership = 0.0;
  friend bool operator==(const FuzzyMembership&, const FuzzyMembership&) = default;
};

/// Plain fuzzy synsets of a single category: the point possibility of every
/// sense whose synset occurs there.
inline std::vector<FuzzyMembership> build_fuzzy_synsets(const WsfTable& wsf, const SynsetInventory& inv,
                                                        std::string_view category, Variant variant,
                                                        std::uint64_t min_count = 0) {
  check_same_inventory(wsf, inv);
  const auto k = wsf.category_index(category);
  if (!k) fail(Errc::unknown_category, std::string(category));
  std::vector<FuzzyMembership> out;
  for (std::size_t i = 0; i < inv.synset_count(); ++i) {
    detail::SynsetWork work(wsf, inv, i, min_count);
    if (work.pmv(*k).is_no_data()) continue;
    const auto& s = inv.synset(i);
    for (std::size_t j = 0; j < s.senses.size(); ++j)
      out.push_back({s.id, s.senses[j].raw, *work.possibility(variant, *k, j)});
  }
  return out;
}

struct VariantStats {
  static constexpr std::size_t bins = 10;
  std::size_t intervals = 0;
  std::array<std::size_t, bins> width_histogram{};  // [b/10, (b+1)/10), last bin closed
  double mean_low = 0.0;
  double mean_up = 0.0;
  double mean_width = 0.0;
  std::size_t degenerate = 0;  // low == up
  friend bool operator==(const VariantStats&, const VariantStats&) = default;
};

struct StatsReport {
  std::size_t ok = 0;
  std::size_t no_data = 0;
  VariantStats v1983;
  VariantStats v1993;
  std::map<std::size_t, std::size_t> footprint_sizes;
  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

inline std::size_t width_bin(double width) {
  const auto b = static_cast<std::size_t>(std::floor(width * static_cast<double>(VariantStats::bins)));
  return std::min(b, VariantStats::bins - 1);
}

inline StatsReport summarize(const std::vector<IpfSynsetRecord>& records) {
  StatsReport r;
  std::array<double, 2> sum_low{}, sum_up{}, sum_width{};
  for (const auto& rec : records) {
    if (rec.status != RecordStatus::ok) {
      ++r.no_data;
      continue;
    }
    ++r.ok;
    ++r.footprint_sizes[rec.footprint.size()];
    for (auto v : {Variant::v1983, Variant::v1993}) {
      const auto& iv = rec.interval(v);
      if (!iv) continue;
      auto& vs = v == Variant::v1983 ? r.v1983 : r.v1993;
      const auto idx = static_cast<std::size_t>(v);
      const double w = iv->up - iv->low;
      ++vs.intervals;
      ++vs.width_histogram[width_bin(w)];
      if (iv->low == iv->up) ++vs.degenerate;
      sum_low[idx] += iv->low;
      sum_up[idx] += iv->up;
      sum_width[idx] += w;
    }
  }
  for (auto v : {Variant::v1983, Variant::v1993}) {
    auto& vs = v == Variant::v1983 ? r.v1983 : r.v1993;
    const auto idx = static_cast<std::size_t>(v);
    if (vs.intervals == 0) continue;
    const auto cnt = static_cast<double>(vs.intervals);
    vs.mean_low = sum_low[idx] / cnt;
    vs.mean_up = sum_up[idx] / cnt;
    vs.mean_width = sum_width[idx] / cnt;
  }
  return r;
}

}  // namespace ipf
