#pragma once

#include <stdexcept>
#include <string>

namespace mcg {

// A computation was declined because it exceeds the configured size bounds.
struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// An identity the implementation relies on failed to hold at runtime.
struct VerificationError : std::logic_error {
  explicit VerificationError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace mcg
