#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace detent {

enum class ErrorCode {
  invalid_argument,
  degenerate_geometry,
  non_monotonic,
  no_open_path,
  path_too_short,
  svg_parse,
  out_of_range,
  feasibility,
  solver,
  layout,
  undefined_fit,
  no_overlap,
  schema,
  version_mismatch,
  not_found,
  io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace detent
