#pragma once

#include <gtest/gtest.h>

#include "ipf/error.hpp"

namespace fixtures {

/// Code of the ipf::Error thrown by `f`; records a failure when nothing is thrown.
template <typename F>
ipf::Errc code_of(F&& f) {
  try {
    f();
  } catch (const ipf::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ipf::Error thrown";
  return ipf::Errc::invariant_violation;
}

}  // namespace fixtures
