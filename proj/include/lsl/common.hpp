#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace lsl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Global tolerance for comparing lengths on spaces with exact distance oracles.
inline constexpr double kEpsLen = 1e-9;

inline constexpr const char* kVersion = "0.3.0";

enum class ErrorKind {
  kInvalidArgument,
  kMismatchedVariant,
  kUnsupportedVariant,
  kAmbiguousDirection,
  kNonsmoothPoint,
  kCombinatorialBlowup,
  kSystoleUndefined,
  kEmptyInput,
  kNonCovering,
  kNetTooLarge,
  kParse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lsl
