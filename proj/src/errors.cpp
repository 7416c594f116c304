#include "errors.hpp"

namespace leadwarn {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::missing_column: return "MissingColumn";
    case ErrorCode::empty_after_filtering: return "EmptyAfterFiltering";
    case ErrorCode::malformed_numeric: return "MalformedNumeric";
    case ErrorCode::empty_log: return "EmptyLog";
    case ErrorCode::empty_grid: return "EmptyGrid";
    case ErrorCode::empty_candidates: return "EmptyCandidates";
    case ErrorCode::too_few_rows: return "TooFewRows";
    case ErrorCode::too_few_windows: return "TooFewWindows";
    case ErrorCode::series_too_short: return "SeriesTooShort";
    case ErrorCode::horizon_exceeds_frames: return "HorizonExceedsFrames";
    case ErrorCode::unknown_variant: return "UnknownVariant";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::no_events: return "NoEvents";
    case ErrorCode::empty_window: return "EmptyWindow";
    case ErrorCode::empty_matrix: return "EmptyMatrix";
    case ErrorCode::empty_sequence: return "EmptySequence";
    case ErrorCode::curvature_mismatch: return "CurvatureMismatch";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::non_finite_gradient: return "NonFiniteGradient";
    case ErrorCode::no_positives: return "NoPositives";
    case ErrorCode::one_class_only: return "OneClassOnly";
    case ErrorCode::degenerate_split: return "DegenerateSplit";
    case ErrorCode::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

bool is_validation_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_config:
    case ErrorCode::missing_column:
    case ErrorCode::empty_after_filtering:
    case ErrorCode::malformed_numeric:
    case ErrorCode::empty_log:
    case ErrorCode::empty_grid:
    case ErrorCode::empty_candidates:
    case ErrorCode::too_few_rows:
    case ErrorCode::too_few_windows:
    case ErrorCode::series_too_short:
    case ErrorCode::horizon_exceeds_frames:
    case ErrorCode::unknown_variant:
    case ErrorCode::invalid_argument:
      return true;
    default:
      return false;
  }
}

}  // namespace leadwarn
