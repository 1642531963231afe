#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ipf/core.hpp"
#include "ipf/corpus.hpp"
#include "ipf/error.hpp"
#include "ipf/inventory.hpp"
#include "ipf/pipeline.hpp"
#include "ipf/text.hpp"

namespace ipf {

inline constexpr std::string_view kFormatVersion = "ipf/1";

/// Settings block written at the top of every output file. Every setting
/// that affects numeric results appears here.
struct OutputHeader {
  std::string format_version{kFormatVersion};
  double alpha = 0.8;
  FootprintMode footprint_mode = FootprintMode::inclusive;
  std::vector<Variant> variants{Variant::v1983, Variant::v1993};
  std::uint64_t min_count = 0;
  std::vector<std::string> categories;
  std::string inventory_fingerprint;
  std::string corpus_fingerprint;

  std::size_t n_categories() const { return categories.size(); }
  friend bool operator==(const OutputHeader&, const OutputHeader&) = default;
};

inline OutputHeader make_header(const PipelineConfig& cfg, const WsfTable& wsf) {
  OutputHeader h;
  h.alpha = cfg.alpha;
  h.footprint_mode = cfg.footprint_mode;
  h.variants = cfg.variants;
  h.min_count = cfg.min_count;
  for (const auto& c : wsf.categories()) h.categories.push_back(c.name);
  h.inventory_fingerprint = wsf.inventory_fingerprint();
  h.corpus_fingerprint = wsf.fingerprint();
  return h;
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) { return nlohmann::json(v).dump(); }

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson optional_array(const std::vector<std::optional<double>>& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(x ? ojson(*x) : ojson(nullptr));
  return a;
}

inline ojson header_json(const OutputHeader& h) {
  ojson j;
  j["format_version"] = h.format_version;
  j["alpha"] = h.alpha;
  j["footprint_mode"] = to_string(h.footprint_mode);
  auto& vs = j["variants"] = ojson::array();
  for (auto v : h.variants) vs.push_back(to_string(v));
  j["min_count"] = h.min_count;
  j["n_categories"] = h.n_categories();
  j["categories"] = h.categories;
  j["inventory_fingerprint"] = h.inventory_fingerprint;
  j["corpus_fingerprint"] = h.corpus_fingerprint;
  return j;
}

inline ojson record_json(const IpfSynsetRecord& r, const OutputHeader& h) {
  ojson j;
  j["synset_id"] = r.synset_id.to_string();
  j["sense_key"] = r.sense_key;
  j["sense_index"] = r.sense_index;
  j["status"] = to_string(r.status);
  if (r.status == RecordStatus::ok) {
    for (auto v : {Variant::v1983, Variant::v1993}) {
      if (const auto& iv = r.interval(v)) {
        j["low_" + std::string(to_string(v))] = iv->low;
        j["up_" + std::string(to_string(v))] = iv->up;
      }
    }
    auto& fp = j["footprint"] = ojson::array();
    for (auto k : r.footprint) fp.push_back(h.categories.at(k));
    j["footprint_size"] = r.footprint.size();
    j["footprint_mass"] = r.footprint_mass;
  }
  if (r.diagnostics) {
    ojson d;
    d["pmv"] = optional_array(r.diagnostics->pmv);
    d["wsp"] = optional_array(r.diagnostics->wsp);
    if (!r.diagnostics->possibility_1983.empty()) d["possibility_1983"] = optional_array(r.diagnostics->possibility_1983);
    if (!r.diagnostics->possibility_1993.empty()) d["possibility_1993"] = optional_array(r.diagnostics->possibility_1993);
    j["diagnostics"] = std::move(d);
  }
  return j;
}

inline std::uint64_t put(std::ostream& out, const std::string& s) {
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) fail(Errc::io_failure, "stream write failed");
  return s.size();
}

template <typename T>
T field(const nlohmann::json& j, const char* name, std::size_t line) {
  auto it = j.find(name);
  if (it == j.end()) fail(Errc::malformed_line, std::string("missing field '") + name + "'", line);
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(Errc::malformed_line, std::string("field '") + name + "' has the wrong type", line);
  }
}

inline std::vector<std::optional<double>> optional_doubles(const nlohmann::json& a, std::size_t line) {
  if (!a.is_array()) fail(Errc::malformed_line, "diagnostic values must be an array", line);
  std::vector<std::optional<double>> out;
  for (const auto& x : a) {
    if (x.is_null()) out.emplace_back(std::nullopt);
    else if (x.is_number()) out.emplace_back(x.get<double>());
    else fail(Errc::malformed_line, "diagnostic value is neither number nor null", line);
  }
  return out;
}

inline Variant parse_variant(std::string_view s) {
  if (s == "1983") return Variant::v1983;
  if (s == "1993") return Variant::v1993;
  fail(Errc::invalid_config, "unknown variant '" + std::string(s) + "'");
}

inline FootprintMode parse_mode(std::string_view s) {
  if (s == "inclusive") return FootprintMode::inclusive;
  if (s == "exclusive") return FootprintMode::exclusive;
  fail(Errc::invalid_config, "unknown footprint mode '" + std::string(s) + "'");
}

inline OutputHeader parse_header(const nlohmann::json& j) {
  if (!j.is_object()) fail(Errc::malformed_line, "header is not an object", 1);
  const auto version = field<std::string>(j, "format_version", 1);
  if (version != kFormatVersion) fail(Errc::unsupported_version, version, 1);
  OutputHeader h;
  h.alpha = field<double>(j, "alpha", 1);
  h.min_count = field<std::uint64_t>(j, "min_count", 1);
  h.categories = field<std::vector<std::string>>(j, "categories", 1);
  h.inventory_fingerprint = field<std::string>(j, "inventory_fingerprint", 1);
  h.corpus_fingerprint = field<std::string>(j, "corpus_fingerprint", 1);
  try {
    h.footprint_mode = parse_mode(field<std::string>(j, "footprint_mode", 1));
    h.variants.clear();
    for (const auto& v : field<std::vector<std::string>>(j, "variants", 1)) h.variants.push_back(parse_variant(v));
  } catch (const Error& e) {
    if (e.code() == Errc::malformed_line) throw;
    fail(Errc::malformed_line, e.what(), 1);
  }
  if (field<std::size_t>(j, "n_categories", 1) != h.categories.size())
    fail(Errc::malformed_line, "n_categories does not match categories", 1);
  return h;
}

inline IpfSynsetRecord parse_record(const nlohmann::json& j, const OutputHeader& h, std::size_t line) {
  if (!j.is_object()) fail(Errc::malformed_line, "record is not an object", line);
  IpfSynsetRecord r;
  const auto sid = field<std::string>(j, "synset_id", line);
  auto id = try_parse_synset_id(sid);
  if (!id) fail(Errc::malformed_line, "bad synset_id '" + sid + "'", line);
  r.synset_id = *id;
  r.sense_key = field<std::string>(j, "sense_key", line);
  r.sense_index = field<std::size_t>(j, "sense_index", line);
  const auto status = field<std::string>(j, "status", line);
  if (status == "ok") {
    r.status = RecordStatus::ok;
  } else if (status == "no-data") {
    r.status = RecordStatus::no_data;
  } else {
    fail(Errc::malformed_line, "unknown status '" + status + "'", line);
  }
  if (r.status == RecordStatus::ok) {
    for (const auto& name : field<std::vector<std::string>>(j, "footprint", line)) {
      std::size_t k = 0;
      while (k < h.categories.size() && h.categories[k] != name) ++k;
      if (k == h.categories.size()) fail(Errc::malformed_line, "unknown footprint category '" + name + "'", line);
      r.footprint.push_back(k);
    }
    if (field<std::size_t>(j, "footprint_size", line) != r.footprint.size())
      fail(Errc::malformed_line, "footprint_size does not match footprint", line);
    r.footprint_mass = field<double>(j, "footprint_mass", line);
    for (auto v : {Variant::v1983, Variant::v1993}) {
      const std::string suffix(to_string(v));
      if (!j.contains("low_" + suffix)) continue;
      IntervalMembership iv;
      iv.low = field<double>(j, ("low_" + suffix).c_str(), line);
      iv.up = field<double>(j, ("up_" + suffix).c_str(), line);
      iv.variant = v;
      iv.footprint_size = r.footprint.size();
      r.interval(v) = iv;
    }
  }
  if (auto d = j.find("diagnostics"); d != j.end()) {
    if (!d->is_object()) fail(Errc::malformed_line, "diagnostics is not an object", line);
    RecordDiagnostics diag;
    diag.pmv = optional_doubles(d->value("pmv", nlohmann::json::array()), line);
    diag.wsp = optional_doubles(d->value("wsp", nlohmann::json::array()), line);
    if (d->contains("possibility_1983")) diag.possibility_1983 = optional_doubles(d->at("possibility_1983"), line);
    if (d->contains("possibility_1993")) diag.possibility_1993 = optional_doubles(d->at("possibility_1993"), line);
    r.diagnostics = std::move(diag);
  }
  return r;
}

}  // namespace detail

/// Line 1 is the header object, then one record object per line. Returns the
/// number of bytes written.
inline std::uint64_t write_jsonl(const std::vector<IpfSynsetRecord>& records, const OutputHeader& header,
                                 std::ostream& out) {
  std::uint64_t bytes = detail::put(out, detail::header_json(header).dump() + '\n');
  std::string line;
  for (const auto& r : records) {
    line = detail::record_json(r, header).dump();
    line += '\n';
    bytes += detail::put(out, line);
  }
  out.flush();
  if (!out) fail(Errc::io_failure, "stream flush failed");
  return bytes;
}

struct JsonlDocument {
  OutputHeader header;
  std::vector<IpfSynsetRecord> records;
  friend bool operator==(const JsonlDocument&, const JsonlDocument&) = default;
};

inline JsonlDocument read_jsonl(std::istream& in) {
  JsonlDocument doc;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (text::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      fail(Errc::malformed_line, "not a JSON object", line_no);
    }
    if (!have_header) {
      if (line_no != 1) fail(Errc::malformed_line, "header must be on line 1", line_no);
      doc.header = detail::parse_header(j);
      have_header = true;
      continue;
    }
    doc.records.push_back(detail::parse_record(j, doc.header, line_no));
  }
  if (!have_header) fail(Errc::malformed_line, "missing header", 1);
  return doc;
}

/// `#`-prefixed header lines, then TAB-separated rows with 6-decimal numbers
/// and `NA` for absent values.
inline std::uint64_t write_tsv(const std::vector<IpfSynsetRecord>& records, const OutputHeader& header,
                               std::ostream& out) {
  std::string head;
  auto kv = [&](std::string_view k, const std::string& v) {
    head += "# ";
    head += k;
    head += '\t';
    head += v;
    head += '\n';
  };
  kv("format_version", header.format_version);
  kv("alpha", format_number(header.alpha));
  kv("footprint_mode", std::string(to_string(header.footprint_mode)));
  std::string variants;
  for (auto v : header.variants) variants += (variants.empty() ? "" : ",") + std::string(to_string(v));
  kv("variants", variants);
  kv("min_count", std::to_string(header.min_count));
  kv("n_categories", std::to_string(header.n_categories()));
  std::string cats;
  for (const auto& c : header.categories) cats += (cats.empty() ? "" : "\t") + c;
  kv("categories", cats);
  kv("inventory_fingerprint", header.inventory_fingerprint);
  kv("corpus_fingerprint", header.corpus_fingerprint);
  head += "#synset_id\tsense_key\tstatus\tlow_1983\tup_1983\tlow_1993\tup_1993\tfootprint_size\n";
  std::uint64_t bytes = detail::put(out, head);

  auto fixed6 = [](const std::optional<double>& v) -> std::string {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
  };
  std::string row;
  for (const auto& r : records) {
    const auto& a = r.v1983;
    const auto& b = r.v1993;
    row = r.synset_id.to_string();
    row += '\t' + r.sense_key + '\t' + std::string(to_string(r.status));
    row += '\t' + fixed6(a ? std::optional(a->low) : std::nullopt);
    row += '\t' + fixed6(a ? std::optional(a->up) : std::nullopt);
    row += '\t' + fixed6(b ? std::optional(b->low) : std::nullopt);
    row += '\t' + fixed6(b ? std::optional(b->up) : std::nullopt);
    row += '\t' + (r.status == RecordStatus::ok ? std::to_string(r.footprint.size()) : std::string("NA"));
    row += '\n';
    bytes += detail::put(out, row);
  }
  out.flush();
  if (!out) fail(Errc::io_failure, "stream flush failed");
  return bytes;
}

inline std::string format_stats(const StatsReport& r) {
  std::ostringstream os;
  os << "records ok=" << r.ok << " no_data=" << r.no_data << '\n';
  for (auto v : {Variant::v1983, Variant::v1993}) {
    const auto& s = v == Variant::v1983 ? r.v1983 : r.v1993;
    os << "variant " << to_string(v) << " intervals=" << s.intervals << " degenerate=" << s.degenerate
       << " mean_low=" << format_number(s.mean_low) << " mean_up=" << format_number(s.mean_up)
       << " mean_width=" << format_number(s.mean_width) << '\n';
    os << "  width_histogram";
    for (std::size_t b = 0; b < VariantStats::bins; ++b) os << ' ' << s.width_histogram[b];
    os << '\n';
  }
  os << "footprint_sizes";
  for (const auto& [size, count] : r.footprint_sizes) os << ' ' << size << ':' << count;
  os << '\n';
  return os.str();
}

}  // namespace ipf
