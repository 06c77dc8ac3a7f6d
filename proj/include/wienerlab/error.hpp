#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

enum class ErrorCode {
  invalid_argument = 1,
  grid_mismatch,
  domain,
  unsupported,
  no_malliavin,
  non_finite,
  degenerate,
  config,
  io,
  contract_failed,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; the C API maps
// `code()` onto its integer status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace wlab
