#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace faasbench {

// Virtual time and durations, integer microseconds from the run epoch.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerMilli = 1'000;
inline constexpr Micros kMicrosPerSecond = 1'000'000;

inline constexpr Micros MillisToMicros(double ms) {
  return static_cast<Micros>(ms * 1000.0 + (ms >= 0 ? 0.5 : -0.5));
}

enum class ErrorCode {
  kUnknownBenchmark,
  kInvalidApplication,
  kUnassignedFunction,
  kUnknownPlatform,
  kMissingServiceBinding,
  kMissingNetworkLatency,
  kAdapterFailure,
  kNotDeployed,
  kUnknownEndpoint,
  kNotAsync,
  kNoServiceBinding,
  kMalformedRecord,
  kUnsupportedSchemaVersion,
  kIncompleteTree,
  kUnknownRecipe,
  kInvalidConfig,
  kInvalidProfile,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception. `subject` names the
// offending entity (function, platform, service, ...) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& detail = {});

  ErrorCode code() const { return code_; }
  const std::string& subject() const { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

// 128-bit random identifier rendered as 32 lowercase hex characters.
struct Id128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  std::string ToHex() const;
  static std::optional<Id128> FromHex(std::string_view hex);

  friend auto operator<=>(const Id128&, const Id128&) = default;
};

struct Id128Hash {
  std::size_t operator()(const Id128& id) const noexcept {
    return static_cast<std::size_t>(id.hi ^ (id.lo * 0x9e3779b97f4a7c15ULL));
  }
};

// Seeded generator used for every random draw in a run. The engine is
// mt19937_64, whose output sequence is fixed by the standard; the derived
// variates are computed here so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double StandardNormal();

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a master seed and a stream tag.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream);

}  // namespace faasbench
