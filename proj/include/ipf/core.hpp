#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ipf/error.hpp"

namespace ipf {

/// Probability-to-possibility transformation.
///   v1983: pi(j) = sum_m min(p_j, p_m)
///   v1993: pi(j) = sum over m with p_m <= p_j of p_m
enum class Variant { v1983, v1993 };

/// inclusive: shortest prefix of the sorted WSP whose mass exceeds alpha.
/// exclusive: longest prefix whose mass stays <= alpha, at least one category.
enum class FootprintMode { inclusive, exclusive };

constexpr std::string_view to_string(Variant v) { return v == Variant::v1983 ? "1983" : "1993"; }
constexpr std::string_view to_string(FootprintMode m) {
  return m == FootprintMode::inclusive ? "inclusive" : "exclusive";
}

/// A normalized row: either every entry is numeric and the row sums to 1, or
/// the whole row is NoData (zero total). NoData is never stored as 0.
template <typename Tag>
class NormalizedRow {
 public:
  NormalizedRow() = default;

  static NormalizedRow from_counts(std::span<const std::uint64_t> counts) {
    NormalizedRow row;
    row.size_ = counts.size();
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return row;
    row.values_.reserve(counts.size());
    const auto t = static_cast<double>(total);
    for (auto c : counts) row.values_.push_back(static_cast<double>(c) / t);
    return row;
  }

  /// Takes an already-normalized distribution (used by property tests and
  /// callers that carry probabilities rather than counts).
  static NormalizedRow from_probabilities(std::vector<double> probs) {
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) fail(Errc::invalid_config, "probability outside [0,1]");
      sum += p;
    }
    if (probs.empty() || std::abs(sum - 1.0) > 1e-9) fail(Errc::invalid_config, "probabilities do not sum to 1");
    NormalizedRow row;
    row.size_ = probs.size();
    row.values_ = std::move(probs);
    return row;
  }

  static NormalizedRow no_data(std::size_t size) {
    NormalizedRow row;
    row.size_ = size;
    return row;
  }

  std::size_t size() const { return size_; }
  bool is_no_data() const { return values_.empty(); }

  std::optional<double> at(std::size_t i) const {
    if (i >= size_) fail(Errc::invariant_violation, "row index out of range");
    if (is_no_data()) return std::nullopt;
    return values_[i];
  }

  std::span<const double> values() const {
    if (is_no_data()) fail(Errc::no_data_row, "row has no data");
    return values_;
  }

  friend bool operator==(const NormalizedRow&, const NormalizedRow&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

/// Distribution of a synset's occurrences over its senses within one category.
using PmvRow = NormalizedRow<struct PmvTag>;
/// Distribution of one sense's occurrences over the categories.
using WspRow = NormalizedRow<struct WspTag>;

inline PmvRow compute_pmv(std::span<const std::uint64_t> sense_counts) { return PmvRow::from_counts(sense_counts); }
inline WspRow compute_wsp(std::span<const std::uint64_t> category_counts) {
  return WspRow::from_counts(category_counts);
}

/// Possibility of every sense of one PMV row. Sums run over m in ascending
/// order; the result is capped at 1 so that a rounded total of 1+ulp never
/// leaves [0,1].
inline std::vector<double> possibility_profile(const PmvRow& pmv, Variant variant) {
  const auto p = pmv.values();
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 0.0;
    if (variant == Variant::v1983) {
      for (std::size_t m = 0; m < p.size(); ++m) s += std::min(p[j], p[m]);
    } else {
      for (std::size_t m = 0; m < p.size(); ++m) s += p[m] <= p[j] ? p[m] : 0.0;
    }
    out[j] = std::min(s, 1.0);
  }
  return out;
}

struct AlphaFootprint {
  std::vector<std::size_t> categories;  // selection order
  double cumulative_prob = 0.0;
  FootprintMode mode = FootprintMode::inclusive;
  friend bool operator==(const AlphaFootprint&, const AlphaFootprint&) = default;
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(Errc::invalid_config, "alpha must be in (0,1]");
}

/// Category indices by descending probability, ties by ascending index.
/// Zero-probability categories are never part of a footprint.
inline AlphaFootprint alpha_footprint(const WspRow& wsp, double alpha, FootprintMode mode) {
  check_alpha(alpha);
  if (wsp.is_no_data()) fail(Errc::all_no_data, "sense never occurs in any category");
  const auto p = wsp.values();

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] > 0.0) order.push_back(k);
  ensure(!order.empty(), "numeric WSP row without a nonzero entry");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });

  AlphaFootprint fp;
  fp.mode = mode;
  double cumulative = 0.0;
  for (std::size_t k : order) {
    const double next = cumulative + p[k];
    if (mode == FootprintMode::exclusive) {
      if (next <= alpha) {
        fp.categories.push_back(k);
        cumulative = next;
        continue;
      }
      if (fp.categories.empty()) {
        fp.categories.push_back(k);
        cumulative = next;
      }
      break;
    }
    fp.categories.push_back(k);
    cumulative = next;
    if (cumulative > alpha) break;
  }
  // Inclusive mode with a total that never exceeds alpha (alpha = 1) ends up
  // holding every occurring category, which is the intended limit.
  fp.cumulative_prob = cumulative;
  return fp;
}

/// Possibility of one (synset, sense) in every category, NoData where the
/// synset does not occur in that category.
struct PossibilityProfile {
  Variant variant = Variant::v1983;
  std::vector<std::optional<double>> values;
  friend bool operator==(const PossibilityProfile&, const PossibilityProfile&) = default;
};

struct IntervalMembership {
  double low = 0.0;
  double up = 0.0;
  Variant variant = Variant::v1983;
  std::size_t footprint_size = 0;
  friend bool operator==(const IntervalMembership&, const IntervalMembership&) = default;
};

inline IntervalMembership interval_from_footprint(const PossibilityProfile& profile, const AlphaFootprint& fp) {
  if (fp.categories.empty()) fail(Errc::empty_footprint, "footprint has no categories");
  IntervalMembership iv{1.0, 0.0, profile.variant, fp.categories.size()};
  for (std::size_t k : fp.categories) {
    ensure(k < profile.values.size(), "footprint category outside profile");
    const auto& v = profile.values[k];
    ensure(v.has_value(), "footprint category has no possibility value");
    iv.low = std::min(iv.low, *v);
    iv.up = std::max(iv.up, *v);
  }
  ensure(0.0 <= iv.low && iv.low <= iv.up && iv.up <= 1.0, "interval outside 0 <= low <= up <= 1");
  return iv;
}

struct MembershipPair {
  std::size_t category = 0;
  double membership = 0.0;
  double probability = 0.0;
  friend bool operator==(const MembershipPair&, const MembershipPair&) = default;
};

/// The random-variable membership of one sense: a <membership, probability>
/// pair per category where both are known.
struct ProbabilisticFuzzyMembership {
  Variant variant = Variant::v1983;
  std::vector<MembershipPair> pairs;
  friend bool operator==(const ProbabilisticFuzzyMembership&, const ProbabilisticFuzzyMembership&) = default;
};

inline ProbabilisticFuzzyMembership pfs_membership(const PossibilityProfile& profile, const WspRow& wsp) {
  if (profile.values.size() != wsp.size()) fail(Errc::invariant_violation, "profile and WSP sizes differ");
  ProbabilisticFuzzyMembership out{profile.variant, {}};
  for (std::size_t k = 0; k < wsp.size(); ++k) {
    const auto pk = wsp.at(k);
    if (profile.values[k] && pk) out.pairs.push_back({k, *profile.values[k], *pk});
  }
  if (out.pairs.empty()) fail(Errc::all_no_data, "no category has both a membership and a probability");
  return out;
}

using Rational = boost::multiprecision::cpp_rational;

/// The exact value of a finite double.
inline Rational exact_rational(double x) {
  ensure(std::isfinite(x), "non-finite value has no rational form");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  Rational r(scaled);
  const int shift = exp - 53;
  boost::multiprecision::cpp_int pow2 = 1;
  pow2 <<= std::abs(shift);
  return shift >= 0 ? Rational(r * pow2) : Rational(r / pow2);
}

/// Uniform density on [low, up] inside the unit membership domain: height is
/// |[0,1]| / |[low, up]|, held exactly so that height * width == 1.
class UniformIntervalDensity {
 public:
  UniformIntervalDensity(double low, double up) : low_(low), up_(up) {
    if (!(0.0 <= low && low <= up && up <= 1.0)) fail(Errc::invariant_violation, "interval outside [0,1]");
    if (!(up > low)) fail(Errc::degenerate_interval, "zero-width interval is a point mass");
    width_ = exact_rational(up) - exact_rational(low);
    height_ = Rational(1) / width_;
  }

  double low() const { return low_; }
  double up() const { return up_; }
  const Rational& width() const { return width_; }
  const Rational& height() const { return height_; }
  double height_value() const { return static_cast<double>(height_); }

  double operator()(double x) const { return (x >= low_ && x <= up_) ? height_value() : 0.0; }

  /// Integral over [0,1]; exactly 1 by construction.
  Rational mass() const { return height_ * width_; }

 private:
  double low_;
  double up_;
  Rational width_;
  Rational height_;
};

inline UniformIntervalDensity footprint_density(const IntervalMembership& iv) {
  return UniformIntervalDensity(iv.low, iv.up);
}

}  // namespace ipf
