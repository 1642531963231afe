#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ipf/error.hpp"
#include "ipf/fingerprint.hpp"
#include "ipf/text.hpp"

namespace ipf {

/// WordNet part-of-speech letter for an ss_type. Satellites keep `s`.
constexpr char pos_from_ss_type(int ss_type) {
  switch (ss_type) {
    case 1: return 'n';
    case 2: return 'v';
    case 3: return 'a';
    case 4: return 'r';
    case 5: return 's';
    default: return '?';
  }
}

constexpr bool is_pos_letter(char c) { return c == 'n' || c == 'v' || c == 'a' || c == 'r' || c == 's'; }

/// A parsed WordNet sense key, `lemma%ss_type:lex_filenum:lex_id:head_word:head_id`.
struct SenseKey {
  std::string lemma;
  int ss_type = 0;
  int lex_filenum = 0;
  int lex_id = 0;
  std::optional<std::string> head_word;  // present iff ss_type == 5
  std::optional<int> head_id;            // present iff ss_type == 5
  std::string raw;

  char pos() const { return pos_from_ss_type(ss_type); }

  /// Canonical text from the parsed fields; equals `raw` for every key that
  /// parse_sense_key accepted.
  std::string to_string() const {
    auto two = [](int v) {
      std::string s = std::to_string(v);
      return s.size() < 2 ? std::string(2 - s.size(), '0') + s : s;
    };
    std::string out = lemma;
    out += '%';
    out += std::to_string(ss_type);
    out += ':';
    out += two(lex_filenum);
    out += ':';
    out += two(lex_id);
    out += ':';
    if (head_word) out += *head_word;
    out += ':';
    if (head_id) out += two(*head_id);
    return out;
  }

  friend bool operator==(const SenseKey&, const SenseKey&) = default;
};

inline SenseKey parse_sense_key(std::string_view raw) {
  auto bad = [&](const char* why) -> SenseKey {
    fail(Errc::malformed_sense_key, "'" + std::string(raw) + "': " + why);
  };
  if (raw.empty()) return bad("empty key");
  const auto pct = raw.find('%');
  if (pct == std::string_view::npos) return bad("missing '%'");
  if (raw.find('%', pct + 1) != std::string_view::npos) return bad("more than one '%'");

  SenseKey key;
  const auto lemma = raw.substr(0, pct);
  if (lemma.empty()) return bad("empty lemma");
  for (char c : lemma)
    if (text::is_space(c) || c == ':') return bad("lemma contains whitespace or ':'");

  const auto fields = text::split(raw.substr(pct + 1), ':');
  if (fields.size() != 5) return bad("expected 4 ':' separators after '%'");

  if (fields[0].size() != 1 || !text::all_digits(fields[0])) return bad("ss_type is not a single digit");
  key.ss_type = fields[0][0] - '0';
  if (key.ss_type < 1 || key.ss_type > 5) return bad("ss_type outside 1-5");

  auto two_digits = [&](std::string_view f, const char* name) {
    if (f.size() != 2 || !text::all_digits(f)) bad(name);
    return (f[0] - '0') * 10 + (f[1] - '0');
  };
  key.lex_filenum = two_digits(fields[1], "lex_filenum is not two digits");
  key.lex_id = two_digits(fields[2], "lex_id is not two digits");

  if (key.ss_type == 5) {
    if (fields[3].empty()) return bad("satellite key without head_word");
    key.head_word = std::string(fields[3]);
    key.head_id = two_digits(fields[4], "head_id is not two digits");
  } else if (!fields[3].empty() || !fields[4].empty()) {
    return bad("head fields are only allowed for ss_type 5");
  }

  key.lemma = std::string(lemma);
  key.raw = std::string(raw);
  ensure(key.to_string() == key.raw, "sense key does not round-trip: " + key.raw);
  return key;
}

/// Synset identity: 8-digit offset plus part of speech, written `OFFSET-POS`.
struct SynsetId {
  std::string offset;
  char pos = 'n';

  std::string to_string() const { return offset + '-' + pos; }

  friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
  friend bool operator==(const SynsetId&, const SynsetId&) = default;
};

inline std::optional<SynsetId> try_parse_synset_id(std::string_view s) {
  const auto dash = s.rfind('-');
  if (dash == std::string_view::npos || dash + 2 != s.size()) return std::nullopt;
  const auto off = s.substr(0, dash);
  if (off.size() != 8 || !text::all_digits(off) || !is_pos_letter(s.back())) return std::nullopt;
  return SynsetId{std::string(off), s.back()};
}

inline SynsetId parse_synset_id(std::string_view s) {
  auto id = try_parse_synset_id(s);
  if (!id) fail(Errc::unknown_synset, "malformed synset id '" + std::string(s) + "' (expected OFFSET-POS)");
  return *id;
}

/// Where a sense key lives inside an inventory.
struct SenseLocation {
  std::size_t synset = 0;   // index into synsets()
  std::size_t sense = 0;    // j, position within the synset
  std::size_t ordinal = 0;  // flat position across the whole inventory
};

namespace detail {
struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};
}  // namespace detail

/// Immutable sense-key -> synset map with a fixed sense order per synset.
/// Synsets are kept sorted by SynsetId.
class SynsetInventory {
 public:
  struct Synset {
    SynsetId id;
    std::vector<SenseKey> senses;
    friend bool operator==(const Synset&, const Synset&) = default;
  };

  SynsetInventory() { rebuild_index(); }

  /// Validates and indexes. Sense order inside each synset is taken as given.
  explicit SynsetInventory(std::vector<Synset> synsets) : synsets_(std::move(synsets)) {
    std::sort(synsets_.begin(), synsets_.end(), [](const Synset& a, const Synset& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < synsets_.size(); ++i)
      if (synsets_[i].id == synsets_[i + 1].id)
        fail(Errc::malformed_document, "duplicate synset " + synsets_[i].id.to_string());
    for (const auto& s : synsets_)
      if (s.senses.empty()) fail(Errc::empty_synset, "synset " + s.id.to_string() + " has no senses");
    rebuild_index();
  }

  std::span<const Synset> synsets() const { return synsets_; }
  std::size_t synset_count() const { return synsets_.size(); }
  std::size_t sense_count() const { return sense_count_; }

  const Synset& synset(std::size_t index) const { return synsets_.at(index); }

  std::optional<std::size_t> index_of(const SynsetId& id) const {
    auto it = std::lower_bound(synsets_.begin(), synsets_.end(), id,
                               [](const Synset& s, const SynsetId& v) { return s.id < v; });
    if (it == synsets_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - synsets_.begin());
  }

  std::optional<SenseLocation> locate(std::string_view raw_key) const {
    auto it = reverse_.find(raw_key);
    if (it == reverse_.end()) return std::nullopt;
    return it->second;
  }

  /// Flat ordinal of sense 0 of the given synset.
  std::size_t first_ordinal(std::size_t synset_index) const { return offsets_.at(synset_index); }

  const std::string& fingerprint() const { return fingerprint_; }

  friend bool operator==(const SynsetInventory& a, const SynsetInventory& b) { return a.synsets_ == b.synsets_; }

 private:
  void rebuild_index() {
    reverse_.clear();
    offsets_.clear();
    sense_count_ = 0;
    Fingerprinter fp;
    fp.field("ipf-inventory").number(synsets_.size());
    for (std::size_t i = 0; i < synsets_.size(); ++i) {
      const auto& s = synsets_[i];
      offsets_.push_back(sense_count_);
      fp.field(s.id.to_string()).number(s.senses.size());
      for (std::size_t j = 0; j < s.senses.size(); ++j) {
        const auto& key = s.senses[j];
        if (key.pos() != s.id.pos)
          fail(Errc::malformed_document,
               "sense " + key.raw + " has pos '" + key.pos() + "' but synset " + s.id.to_string() + " does not");
        auto [it, inserted] = reverse_.emplace(key.raw, SenseLocation{i, j, sense_count_});
        if (!inserted) fail(Errc::duplicate_sense_key, key.raw);
        fp.field(key.raw);
        ++sense_count_;
      }
    }
    fingerprint_ = fp.hex();
  }

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, SenseLocation, detail::StringHash, std::equal_to<>> reverse_;
  std::vector<std::size_t> offsets_;
  std::size_t sense_count_ = 0;
  std::string fingerprint_;
};

inline std::span<const SenseKey> senses_of(const SynsetInventory& inv, const SynsetId& id) {
  auto idx = inv.index_of(id);
  if (!idx) fail(Errc::unknown_synset, id.to_string());
  return inv.synset(*idx).senses;
}

/// Reads WordNet `index.sense`: `sense_key synset_offset sense_number tag_cnt`.
/// Senses are ordered by sense_number, ties by raw key.
inline SynsetInventory load_index_sense(std::istream& in) {
  struct Entry {
    long sense_number;
    SenseKey key;
  };
  std::map<SynsetId, std::vector<Entry>> grouped;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (text::getline(in, line)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    const auto f = text::split_ws(line);
    if (f.size() != 4) fail(Errc::malformed_line, "expected 4 fields, got " + std::to_string(f.size()), line_no);
    SenseKey key;
    try {
      key = parse_sense_key(f[0]);
    } catch (const Error& e) {
      fail(Errc::malformed_line, e.what(), line_no);
    }
    if (f[1].size() > 8 || !text::all_digits(f[1])) fail(Errc::malformed_line, "bad synset offset", line_no);
    const auto sense_number = text::parse_int<long>(f[2]);
    if (!sense_number || *sense_number < 0 || !text::parse_int<long>(f[3]))
      fail(Errc::malformed_line, "bad sense_number or tag_cnt", line_no);
    if (!seen.insert(key.raw).second) fail(Errc::duplicate_sense_key, key.raw, line_no);

    SynsetId id{std::string(8 - f[1].size(), '0') + std::string(f[1]), key.pos()};
    grouped[std::move(id)].push_back({*sense_number, std::move(key)});
  }

  std::vector<SynsetInventory::Synset> synsets;
  synsets.reserve(grouped.size());
  for (auto& [id, entries] : grouped) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.sense_number != b.sense_number ? a.sense_number < b.sense_number : a.key.raw < b.key.raw;
    });
    SynsetInventory::Synset s{id, {}};
    s.senses.reserve(entries.size());
    for (auto& e : entries) s.senses.push_back(std::move(e.key));
    synsets.push_back(std::move(s));
  }
  return SynsetInventory(std::move(synsets));
}

/// Reads `[{"synset_id": "OFFSET-POS", "senses": ["key", ...]}, ...]`.
/// Sense order is array order; other fields are ignored.
inline SynsetInventory load_json_inventory(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::malformed_document, e.what());
  }
  if (!doc.is_array()) fail(Errc::malformed_document, "top level must be an array");

  std::vector<SynsetInventory::Synset> synsets;
  synsets.reserve(doc.size());
  for (std::size_t n = 0; n < doc.size(); ++n) {
    const auto& obj = doc[n];
    const std::string where = "entry " + std::to_string(n);
    if (!obj.is_object()) fail(Errc::malformed_document, where + " is not an object");
    auto sid = obj.find("synset_id");
    auto senses = obj.find("senses");
    if (sid == obj.end() || !sid->is_string()) fail(Errc::malformed_document, where + ": missing string synset_id");
    if (senses == obj.end() || !senses->is_array()) fail(Errc::malformed_document, where + ": missing array senses");
    auto id = try_parse_synset_id(sid->get<std::string>());
    if (!id) fail(Errc::malformed_document, where + ": bad synset_id '" + sid->get<std::string>() + "'");
    if (senses->empty()) fail(Errc::empty_synset, id->to_string());

    SynsetInventory::Synset s{*id, {}};
    for (const auto& k : *senses) {
      if (!k.is_string()) fail(Errc::malformed_document, where + ": sense keys must be strings");
      try {
        s.senses.push_back(parse_sense_key(k.get<std::string>()));
      } catch (const Error& e) {
        fail(Errc::malformed_document, where + ": " + e.what());
      }
    }
    synsets.push_back(std::move(s));
  }
  return SynsetInventory(std::move(synsets));
}

inline void write_json_inventory(const SynsetInventory& inv, std::ostream& out) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& s : inv.synsets()) {
    nlohmann::ordered_json obj;
    obj["synset_id"] = s.id.to_string();
    auto& keys = obj["senses"] = nlohmann::ordered_json::array();
    for (const auto& k : s.senses) keys.push_back(k.raw);
    doc.push_back(std::move(obj));
  }
  out << doc.dump(1) << '\n';
}

}  // namespace ipf
