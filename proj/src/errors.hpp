#pragma once

#include <stdexcept>
#include <string>

namespace leadwarn {

enum class ErrorCode {
  // config / input validation
  invalid_config,
  missing_column,
  empty_after_filtering,
  malformed_numeric,
  empty_log,
  empty_grid,
  empty_candidates,
  too_few_rows,
  too_few_windows,
  series_too_short,
  horizon_exceeds_frames,
  unknown_variant,
  invalid_argument,
  // runtime
  no_events,
  empty_window,
  empty_matrix,
  empty_sequence,
  curvature_mismatch,
  dimension_mismatch,
  shape_mismatch,
  non_finite_gradient,
  no_positives,
  one_class_only,
  degenerate_split,
  io_failure,
};

const char* error_code_name(ErrorCode c);

// True for errors caused by bad user input (config, files, arguments);
// these map to exit code 1, everything else to exit code 2.
bool is_validation_error(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}

  ErrorCode code() const { return code_; }
  bool validation() const { return is_validation_error(code_); }

 private:
  ErrorCode code_;
};

}  // namespace leadwarn
