#pragma once
#include <stdexcept>
#include <string>

namespace dentgame {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// geometry kernel
struct DimensionMismatch : Error { using Error::Error; };
struct EmptySetError : Error { using Error::Error; };
struct UnboundedError : Error { using Error::Error; };
struct NotSeparable : Error { using Error::Error; };
struct EmptyInteriorError : Error { using Error::Error; };

// slicing engine
struct PointOutsideSlice : Error { using Error::Error; };
struct SliceNotFound : Error { using Error::Error; };
struct SeparationFailed : Error { using Error::Error; };
struct BlendFailed : Error { using Error::Error; };
struct PeelingBudgetExhausted : Error { using Error::Error; };
struct CutBoundary : Error { using Error::Error; };

// tactic engine
struct EmptySelection : Error { using Error::Error; };
struct BadOrientation : Error { using Error::Error; };

// game harness
struct IllegalMove : Error { using Error::Error; };

// configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace dentgame
