#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "faasbench/common.hpp"

namespace faasbench {

// A duration distribution configured in milliseconds and sampled at
// microsecond resolution. Text syntax:
//
//   constant(x)  uniform(a, b)  lognormal(median, sigma)  exponential(mean)
//   mix(p, <dist>, <dist>)      -- first with probability p, else second
//
// Samples are rounded to the nearest microsecond and clamped at zero.
class DurationDistribution {
 public:
  struct Constant {
    double ms = 0;
    friend bool operator==(const Constant&, const Constant&) = default;
  };
  struct Uniform {
    double lo_ms = 0;
    double hi_ms = 0;
    friend bool operator==(const Uniform&, const Uniform&) = default;
  };
  struct LogNormal {
    double median_ms = 0;
    double sigma = 0;
    friend bool operator==(const LogNormal&, const LogNormal&) = default;
  };
  struct Exponential {
    double mean_ms = 0;
    friend bool operator==(const Exponential&, const Exponential&) = default;
  };
  struct Mixture {
    double p = 0;
    std::shared_ptr<const DurationDistribution> first;
    std::shared_ptr<const DurationDistribution> second;
    friend bool operator==(const Mixture& a, const Mixture& b) {
      return a.p == b.p && *a.first == *b.first && *a.second == *b.second;
    }
  };

  DurationDistribution() : shape_(Constant{0}) {}

  static DurationDistribution Fixed(double ms) { return DurationDistribution(Constant{ms}); }
  static DurationDistribution FixedMicros(Micros us) {
    return DurationDistribution(Constant{static_cast<double>(us) / 1000.0});
  }
  static DurationDistribution UniformMs(double lo, double hi);
  static DurationDistribution LogNormalMs(double median, double sigma);
  static DurationDistribution ExponentialMs(double mean);
  static DurationDistribution Mix(double p, DurationDistribution first, DurationDistribution second);

  // Throws Error(kInvalidConfig) on syntax errors or negative support.
  static DurationDistribution Parse(std::string_view text);

  Micros Sample(Rng& rng) const;
  std::string ToString() const;
  bool IsConstant() const { return std::holds_alternative<Constant>(shape_); }

  friend bool operator==(const DurationDistribution&, const DurationDistribution&) = default;

 private:
  using Shape = std::variant<Constant, Uniform, LogNormal, Exponential, Mixture>;
  explicit DurationDistribution(Shape shape) : shape_(std::move(shape)) {}

  Shape shape_;
};

}  // namespace faasbench
