#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "ipf/error.hpp"

namespace ipf {

/// Incremental SHA-256 used to fingerprint inventories and
/// aggregated corpora. Values are fed as length-prefixed fields so that
/// ("ab","c") and ("a","bc") hash differently.
class Fingerprinter {
 public:
  Fingerprinter() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      fail(Errc::invariant_violation, "cannot initialise SHA-256 context");
  }

  Fingerprinter& field(std::string_view s) {
    number(s.size());
    raw(s.data(), s.size());
    return *this;
  }

  Fingerprinter& number(std::uint64_t v) {
    std::array<unsigned char, 8> buf{};
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    raw(buf.data(), buf.size());
    return *this;
  }

  /// Lowercase hex digest prefixed with the algorithm name.
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1)
      fail(Errc::invariant_violation, "SHA-256 finalisation failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(digits[md[i] >> 4]);
      out.push_back(digits[md[i] & 0xf]);
    }
    return out;
  }

 private:
  void raw(const void* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), p, n) != 1)
      fail(Errc::invariant_violation, "SHA-256 update failed");
  }

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace ipf
