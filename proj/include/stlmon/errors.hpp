#pragma once

#include <stdexcept>
#include <string>

namespace stlmon {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// formula parsing / compilation
struct SyntaxError : Error { using Error::Error; };
struct IntervalOrderError : Error { using Error::Error; };
struct UnknownPredicate : Error { using Error::Error; };
struct NegatedTemporalError : Error { using Error::Error; };
struct FragmentError : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// model / scenario configuration
struct ConfigError : Error { using Error::Error; };
struct HorizonError : Error { using Error::Error; };

// runtime
struct OutOfDomain : Error { using Error::Error; };
struct AlreadyConcluded : Error { using Error::Error; };
struct ResourceLimit : Error { using Error::Error; };
struct TrajectoryTooShort : Error { using Error::Error; };

}  // namespace stlmon
