// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The pac_lab Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pac_lab {

enum class ErrorKind {
  invalid_input,
  degenerate_phase,
  empty_result,
  aliasing,
  signal_too_short,
  out_of_band,
  unreliable_estimate,
  degenerate_distribution,
  invalid_method,
  io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::degenerate_phase: return "degenerate-phase";
    case ErrorKind::empty_result: return "empty-result";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::signal_too_short: return "signal-too-short";
    case ErrorKind::out_of_band: return "out-of-band";
    case ErrorKind::unreliable_estimate: return "unreliable-estimate";
    case ErrorKind::degenerate_distribution: return "degenerate-distribution";
    case ErrorKind::invalid_method: return "invalid-method";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit code.
class PacError : public std::runtime_error {
 public:
  PacError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw PacError(kind, what);
}

}  // namespace pac_lab
