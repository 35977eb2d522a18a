#pragma once

#include <stdexcept>
#include <string>

namespace arb {

// Base of all library errors. The CLI maps the three branches below onto
// exit codes: ConfigError -> 2, DataError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

// market_data
struct MissingColumnError : DataError { using DataError::DataError; };
struct NonMonotonicTimestampsError : DataError { using DataError::DataError; };
struct GapExceedsLimitError : DataError { using DataError::DataError; };
struct UnparseableValueError : DataError { using DataError::DataError; };
struct LengthNotDivisibleError : DataError { using DataError::DataError; };
struct NonFiniteInputError : DataError { using DataError::DataError; };
struct SpanTooShortError : DataError { using DataError::DataError; };
struct BoundaryOutOfRangeError : DataError { using DataError::DataError; };
struct UnknownZoneError : DataError { using DataError::DataError; };

// numerics / forecaster
struct ShapeMismatchError : NumericError { using NumericError::NumericError; };
struct EvalBeforeAnyTrainingError : NumericError { using NumericError::NumericError; };
struct NonFiniteGradientError : NumericError { using NumericError::NumericError; };
struct NonFiniteLossError : NumericError { using NumericError::NumericError; };
struct GeometryMismatchError : NumericError { using NumericError::NumericError; };
struct InsufficientHistoryError : DataError { using DataError::DataError; };
struct DayMismatchError : DataError { using DataError::DataError; };
struct NaiveErrorZeroError : NumericError { using NumericError::NumericError; };

// storage / bidding / settlement
struct PowerLimitViolationError : NumericError { using NumericError::NumericError; };
struct SoCOutOfBoundsError : NumericError { using NumericError::NumericError; };
struct InfeasibleStartError : NumericError { using NumericError::NumericError; };
struct EmptyTrainingSetError : DataError { using DataError::DataError; };
struct AlignmentError : DataError { using DataError::DataError; };
struct EmptyRunError : DataError { using DataError::DataError; };

}  // namespace arb
