#include "faasbench/common.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace faasbench {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::kInvalidApplication: return "InvalidApplication";
    case ErrorCode::kUnassignedFunction: return "UnassignedFunction";
    case ErrorCode::kUnknownPlatform: return "UnknownPlatform";
    case ErrorCode::kMissingServiceBinding: return "MissingServiceBinding";
    case ErrorCode::kMissingNetworkLatency: return "MissingNetworkLatency";
    case ErrorCode::kAdapterFailure: return "AdapterFailure";
    case ErrorCode::kNotDeployed: return "NotDeployed";
    case ErrorCode::kUnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::kNotAsync: return "NotAsync";
    case ErrorCode::kNoServiceBinding: return "NoServiceBinding";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kUnsupportedSchemaVersion: return "UnsupportedSchemaVersion";
    case ErrorCode::kIncompleteTree: return "IncompleteTree";
    case ErrorCode::kUnknownRecipe: return "UnknownRecipe";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

std::string FormatError(ErrorCode code, const std::string& subject, const std::string& detail) {
  std::string msg(ErrorCodeName(code));
  if (!subject.empty()) msg += "(" + subject + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(FormatError(code, subject, detail)), code_(code), subject_(std::move(subject)) {}

std::string Id128::ToHex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(hi >> (4 * i)) & 0xf];
    out[31 - i] = kDigits[(lo >> (4 * i)) & 0xf];
  }
  return out;
}

std::optional<Id128> Id128::FromHex(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  Id128 id;
  for (std::size_t i = 0; i < 32; ++i) {
    const char c = hex[i];
    std::uint64_t v;
    if (c >= '0' && c <= '9') {
      v = static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      return std::nullopt;
    }
    std::uint64_t& word = i < 16 ? id.hi : id.lo;
    word = (word << 4) | v;
  }
  return id;
}

double Rng::StandardNormal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - Uniform01();
  const double u2 = Uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the tag, then a splitmix64 finalizer mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (h | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace faasbench
