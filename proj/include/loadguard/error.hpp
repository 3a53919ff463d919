#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loadguard {

// Root of every exception the library throws. Callers that only need to
// distinguish "our error" from a programming bug can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An error carrying a module-specific kind enum, so tests and the CLI can
// branch on the failure without parsing messages.
template <typename Kind>
class TypedError : public Error {
 public:
  TypedError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace loadguard
