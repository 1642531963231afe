#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ipf/corpus.hpp"
#include "ipf/inventory.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline std::string offset_of(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08zu", i);
  return buf;
}

/// Noun sense key with a lemma unique to (synset, sense).
inline std::string synthetic_key(std::size_t i, std::size_t j) {
  return "s" + std::to_string(i) + "w" + std::to_string(j) + "%1:00:00::";
}

/// Synset i gets sizes[i] senses; offsets are i + 1.
inline ipf::SynsetInventory synthetic_inventory(const std::vector<std::size_t>& sizes) {
  std::vector<ipf::SynsetInventory::Synset> synsets;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    ipf::SynsetInventory::Synset s{ipf::SynsetId{offset_of(i + 1), 'n'}, {}};
    for (std::size_t j = 0; j < sizes[i]; ++j) s.senses.push_back(ipf::parse_sense_key(synthetic_key(i, j)));
    synsets.push_back(std::move(s));
  }
  return ipf::SynsetInventory(std::move(synsets));
}

inline std::vector<ipf::CategoryId> categories(std::size_t n) {
  std::vector<ipf::CategoryId> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back({"c" + std::to_string(k + 1)});
  return out;
}

/// WSF table from a dense [k][i][j] count cube over a synthetic inventory.
inline ipf::WsfTable table_from(const ipf::SynsetInventory& inv,
                                const std::vector<std::vector<std::vector<std::uint64_t>>>& wsf) {
  ipf::WsfTable t(categories(wsf.size()), inv.fingerprint(), inv.sense_count());
  for (std::size_t k = 0; k < wsf.size(); ++k)
    for (std::size_t i = 0; i < wsf[k].size(); ++i)
      for (std::size_t j = 0; j < wsf[k][i].size(); ++j) t.add(k, inv.first_ordinal(i) + j, wsf[k][i][j]);
  return t;
}

/// Two categories, synset S = {x, y}; c1: x=4, y=1; c2: x=1, y=1.
struct Worked {
  ipf::SynsetInventory inv;
  ipf::WsfTable wsf;
};

inline Worked worked_example() {
  std::vector<ipf::SynsetInventory::Synset> synsets{
      {ipf::SynsetId{"00000001", 'n'}, {ipf::parse_sense_key("x%1:00:00::"), ipf::parse_sense_key("y%1:00:00::")}}};
  ipf::SynsetInventory inv(std::move(synsets));
  ipf::WsfTable wsf({{"c1"}, {"c2"}}, inv.fingerprint(), inv.sense_count());
  wsf.add(0, 0, 4);
  wsf.add(0, 1, 1);
  wsf.add(1, 0, 1);
  wsf.add(1, 1, 1);
  return {std::move(inv), std::move(wsf)};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("ipf-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << content;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline void write_index_sense(const fs::path& p, const ipf::SynsetInventory& inv) {
  std::ofstream f(p, std::ios::binary);
  for (const auto& s : inv.synsets())
    for (std::size_t j = 0; j < s.senses.size(); ++j)
      f << s.senses[j].raw << ' ' << s.id.offset << ' ' << (j + 1) << " 0\n";
}

inline const std::vector<std::string>& oanc_categories() {
  static const std::vector<std::string> names{"face-to-face", "fiction", "journal",        "letters",
                                              "non-fiction",  "technical", "telephone", "travel_guides"};
  return names;
}

struct SyntheticCorpus {
  std::size_t synsets = 0;
  std::size_t senses = 0;
  std::size_t annotations = 0;
  std::size_t unknown = 0;
};

/// Writes `root/index.sense` and `root/corpus/<category>/part-N.tsv` for an
/// inventory of `synsets` synsets (1-4 senses each) and `annotations` token
/// lines spread over the eight categories with a skewed sense distribution.
/// About 0.1% of lines carry keys outside the inventory.
inline SyntheticCorpus write_synthetic_corpus(const fs::path& root, std::size_t synsets, std::size_t annotations,
                                              std::uint32_t seed, std::size_t files_per_category = 3) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> sizes(synsets);
  std::uniform_int_distribution<std::size_t> size_dist(1, 4);
  for (auto& s : sizes) s = size_dist(rng);
  const auto inv = synthetic_inventory(sizes);
  fs::create_directories(root);
  write_index_sense(root / "index.sense", inv);

  const auto& cats = oanc_categories();
  std::vector<std::ofstream> files;
  for (const auto& c : cats)
    for (std::size_t f = 0; f < files_per_category; ++f) {
      fs::create_directories(root / "corpus" / c);
      files.emplace_back(root / "corpus" / c / ("part-" + std::to_string(f) + ".tsv"), std::ios::binary);
      files.back() << "# synthetic WSD output\n";
    }

  SyntheticCorpus info{synsets, inv.sense_count(), annotations, 0};
  // Synset popularity ~ 1/(rank+1); sense choice biased toward low j and by
  // category so that PMV rows differ between categories.
  std::vector<double> weights(synsets);
  for (std::size_t i = 0; i < synsets; ++i) weights[i] = 1.0 / static_cast<double>(i % 5000 + 1);
  std::discrete_distribution<std::size_t> pick_synset(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> pick_cat(0, cats.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_file(0, files_per_category - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t a = 0; a < annotations; ++a) {
    const std::size_t k = pick_cat(rng);
    auto& out = files[k * files_per_category + pick_file(rng)];
    if (u(rng) < 0.001) {
      out << "tok\tlemma\tghost" << a % 97 << "%1:00:00::\n";
      ++info.unknown;
      continue;
    }
    const std::size_t i = pick_synset(rng);
    std::size_t j = 0;
    const double bias = 0.35 + 0.05 * static_cast<double>(k);
    while (j + 1 < sizes[i] && u(rng) > bias) ++j;
    out << "tok\tlemma\t" << synthetic_key(i, j) << '\n';
  }
  return info;
}

}  // namespace fixtures
