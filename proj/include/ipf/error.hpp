#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipf {

enum class Errc {
  malformed_sense_key,
  malformed_line,
  duplicate_sense_key,
  malformed_document,
  empty_synset,
  unknown_synset,
  unknown_sense,
  unknown_category,
  negative_count,
  fingerprint_mismatch,
  category_mismatch,
  no_data_row,
  all_no_data,
  empty_footprint,
  degenerate_interval,
  unsupported_version,
  invalid_config,
  io_failure,
  invariant_violation,
};

constexpr std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::malformed_sense_key: return "MalformedSenseKey";
    case Errc::malformed_line: return "MalformedLine";
    case Errc::duplicate_sense_key: return "DuplicateSenseKey";
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::empty_synset: return "EmptySynset";
    case Errc::unknown_synset: return "UnknownSynset";
    case Errc::unknown_sense: return "UnknownSense";
    case Errc::unknown_category: return "UnknownCategory";
    case Errc::negative_count: return "NegativeCount";
    case Errc::fingerprint_mismatch: return "FingerprintMismatch";
    case Errc::category_mismatch: return "CategoryMismatch";
    case Errc::no_data_row: return "NoDataRow";
    case Errc::all_no_data: return "AllNoData";
    case Errc::empty_footprint: return "EmptyFootprint";
    case Errc::degenerate_interval: return "DegenerateInterval";
    case Errc::unsupported_version: return "UnsupportedVersion";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_failure: return "IoFailure";
    case Errc::invariant_violation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the condition;
/// `line()` is the 1-based input line for line-oriented errors, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        line_(line) {}

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

  /// Internal invariant violations map to exit code 2 in the CLI; everything
  /// else is an input problem.
  bool is_internal() const noexcept { return code_ == Errc::invariant_violation; }

 private:
  Errc code_;
  std::size_t line_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what, std::size_t line = 0) {
  throw Error(code, what, line);
}

inline void ensure(bool cond, const std::string& what) {
  if (!cond) fail(Errc::invariant_violation, what);
}

}  // namespace ipf
