#pragma once

// Straight transcription of the IPF construction with explicit loops, NaN for
// missing data and an exhaustive prefix search for the footprint. Shares no
// code with the library so the two can be compared.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct NaiveRecord {
  bool ok = false;
  std::vector<int> footprint;
  double low_1983 = kNaN, up_1983 = kNaN, low_1993 = kNaN, up_1993 = kNaN;
};

/// wsf[k][i][j]: count of sense j of synset i in category k.
using Wsf = std::vector<std::vector<std::vector<std::uint64_t>>>;

inline double naive_1983(const std::vector<double>& p, int j) {
  double s = 0;
  for (std::size_t m = 0; m < p.size(); ++m) s += (p[j] < p[m] ? p[j] : p[m]);
  return s;
}

inline double naive_1993(const std::vector<double>& p, int j) {
  double s = 0;
  for (std::size_t m = 0; m < p.size(); ++m)
    if (p[m] <= p[j]) s += p[m];
  return s;
}

/// Positions of the nonzero entries, most probable first, lower index first
/// among equals (selection sort).
inline std::vector<int> ranked(const std::vector<double>& w) {
  std::vector<int> left;
  for (int k = 0; k < static_cast<int>(w.size()); ++k)
    if (w[k] > 0) left.push_back(k);
  std::vector<int> out;
  while (!left.empty()) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < left.size(); ++t)
      if (w[left[t]] > w[left[best]]) best = t;
    out.push_back(left[best]);
    left.erase(left.begin() + static_cast<long>(best));
  }
  return out;
}

inline double prefix_mass(const std::vector<double>& w, const std::vector<int>& order, std::size_t len) {
  double s = 0;
  for (std::size_t t = 0; t < len; ++t) s += w[order[t]];
  return s;
}

/// Every prefix length is tried; inclusive picks the shortest with mass > alpha
/// (all occurring categories if none does), exclusive the longest with
/// mass <= alpha and at least one.
inline std::vector<int> naive_footprint(const std::vector<double>& w, double alpha, bool inclusive) {
  const auto order = ranked(w);
  std::size_t chosen = 0;
  if (inclusive) {
    chosen = order.size();
    for (std::size_t len = order.size(); len >= 1; --len)
      if (prefix_mass(w, order, len) > alpha) chosen = len;
  } else {
    chosen = 1;
    for (std::size_t len = 1; len <= order.size(); ++len) {
      bool all_fit = true;
      for (std::size_t t = 1; t <= len; ++t)
        if (!(prefix_mass(w, order, t) <= alpha)) all_fit = false;
      if (all_fit) chosen = len;
    }
  }
  return std::vector<int>(order.begin(), order.begin() + static_cast<long>(chosen));
}

/// Records per synset i and sense j.
inline std::vector<std::vector<NaiveRecord>> naive_ipf(const Wsf& wsf, double alpha, bool inclusive) {
  const std::size_t n = wsf.size();
  const std::size_t synsets = n ? wsf[0].size() : 0;
  std::vector<std::vector<NaiveRecord>> out(synsets);
  for (std::size_t i = 0; i < synsets; ++i) {
    const std::size_t size = wsf[0][i].size();
    // PMV[k][j]
    std::vector<std::vector<double>> pmv(n, std::vector<double>(size));
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t total = 0;
      for (std::size_t j = 0; j < size; ++j) total += wsf[k][i][j];
      for (std::size_t j = 0; j < size; ++j)
        pmv[k][j] = total != 0 ? static_cast<double>(wsf[k][i][j]) / static_cast<double>(total) : kNaN;
    }
    out[i].resize(size);
    for (std::size_t j = 0; j < size; ++j) {
      std::uint64_t total = 0;
      for (std::size_t k = 0; k < n; ++k) total += wsf[k][i][j];
      NaiveRecord& rec = out[i][j];
      if (total == 0) continue;
      std::vector<double> wsp(n);
      for (std::size_t k = 0; k < n; ++k) wsp[k] = static_cast<double>(wsf[k][i][j]) / static_cast<double>(total);
      rec.ok = true;
      rec.footprint = naive_footprint(wsp, alpha, inclusive);
      rec.low_1983 = rec.low_1993 = std::numeric_limits<double>::infinity();
      rec.up_1983 = rec.up_1993 = -std::numeric_limits<double>::infinity();
      for (int k : rec.footprint) {
        const double a = naive_1983(pmv[k], static_cast<int>(j));
        const double b = naive_1993(pmv[k], static_cast<int>(j));
        rec.low_1983 = std::fmin(rec.low_1983, a);
        rec.up_1983 = std::fmax(rec.up_1983, a);
        rec.low_1993 = std::fmin(rec.low_1993, b);
        rec.up_1993 = std::fmax(rec.up_1993, b);
      }
    }
  }
  return out;
}

}  // namespace oracle
