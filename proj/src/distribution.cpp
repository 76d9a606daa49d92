#include "faasbench/distribution.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace faasbench {

namespace {

[[noreturn]] void Fail(std::string_view text, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, std::string(text), "bad distribution: " + why);
}

std::string FormatNumber(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Recursive-descent parser over the distribution grammar.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  DurationDistribution ParseAll() {
    DurationDistribution d = ParseDist();
    SkipSpace();
    if (pos_ != text_.size()) Fail(text_, "trailing characters");
    return d;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  void Expect(char c) {
    SkipSpace();
    if (pos_ >= text_.size() || text_[pos_] != c) Fail(text_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ParseName() {
    SkipSpace();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) Fail(text_, "expected distribution name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double ParseNumber() {
    SkipSpace();
    double v = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) Fail(text_, "expected number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    if (!std::isfinite(v)) Fail(text_, "non-finite number");
    return v;
  }

  std::vector<double> ParseNumberArgs(std::size_t count) {
    std::vector<double> args;
    Expect('(');
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) Expect(',');
      args.push_back(ParseNumber());
    }
    Expect(')');
    return args;
  }

  DurationDistribution ParseDist() {
    const std::string name = ParseName();
    if (name == "constant") {
      auto a = ParseNumberArgs(1);
      if (a[0] < 0) Fail(text_, "negative constant");
      return DurationDistribution::Fixed(a[0]);
    }
    if (name == "uniform") {
      auto a = ParseNumberArgs(2);
      return DurationDistribution::UniformMs(a[0], a[1]);
    }
    if (name == "lognormal") {
      auto a = ParseNumberArgs(2);
      return DurationDistribution::LogNormalMs(a[0], a[1]);
    }
    if (name == "exponential") {
      auto a = ParseNumberArgs(1);
      return DurationDistribution::ExponentialMs(a[0]);
    }
    if (name == "mix") {
      Expect('(');
      const double p = ParseNumber();
      Expect(',');
      DurationDistribution first = ParseDist();
      Expect(',');
      DurationDistribution second = ParseDist();
      Expect(')');
      return DurationDistribution::Mix(p, std::move(first), std::move(second));
    }
    Fail(text_, "unknown distribution '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

DurationDistribution DurationDistribution::UniformMs(double lo, double hi) {
  if (lo < 0 || hi < lo) Fail("uniform", "requires 0 <= a <= b");
  return DurationDistribution(Uniform{lo, hi});
}

DurationDistribution DurationDistribution::LogNormalMs(double median, double sigma) {
  if (median <= 0 || sigma < 0) Fail("lognormal", "requires median > 0 and sigma >= 0");
  return DurationDistribution(LogNormal{median, sigma});
}

DurationDistribution DurationDistribution::ExponentialMs(double mean) {
  if (mean <= 0) Fail("exponential", "requires mean > 0");
  return DurationDistribution(Exponential{mean});
}

DurationDistribution DurationDistribution::Mix(double p, DurationDistribution first,
                                               DurationDistribution second) {
  if (p < 0 || p > 1) Fail("mix", "requires 0 <= p <= 1");
  return DurationDistribution(Mixture{p, std::make_shared<const DurationDistribution>(std::move(first)),
                                      std::make_shared<const DurationDistribution>(std::move(second))});
}

DurationDistribution DurationDistribution::Parse(std::string_view text) { return Parser(text).ParseAll(); }

Micros DurationDistribution::Sample(Rng& rng) const {
  struct Visitor {
    Rng& rng;
    double operator()(const Constant& c) const { return c.ms; }
    double operator()(const Uniform& u) const { return u.lo_ms + (u.hi_ms - u.lo_ms) * rng.Uniform01(); }
    double operator()(const LogNormal& l) const {
      if (l.sigma == 0) return l.median_ms;
      return l.median_ms * std::exp(l.sigma * rng.StandardNormal());
    }
    double operator()(const Exponential& e) const { return -e.mean_ms * std::log(1.0 - rng.Uniform01()); }
    double operator()(const Mixture& m) const {
      const double u = rng.Uniform01();
      const DurationDistribution& pick = u < m.p ? *m.first : *m.second;
      return static_cast<double>(pick.Sample(rng)) / 1000.0;
    }
  };
  const double ms = std::visit(Visitor{rng}, shape_);
  const Micros us = MillisToMicros(ms);
  return us < 0 ? 0 : us;
}

std::string DurationDistribution::ToString() const {
  struct Visitor {
    std::string operator()(const Constant& c) const { return "constant(" + FormatNumber(c.ms) + ")"; }
    std::string operator()(const Uniform& u) const {
      return "uniform(" + FormatNumber(u.lo_ms) + ", " + FormatNumber(u.hi_ms) + ")";
    }
    std::string operator()(const LogNormal& l) const {
      return "lognormal(" + FormatNumber(l.median_ms) + ", " + FormatNumber(l.sigma) + ")";
    }
    std::string operator()(const Exponential& e) const { return "exponential(" + FormatNumber(e.mean_ms) + ")"; }
    std::string operator()(const Mixture& m) const {
      return "mix(" + FormatNumber(m.p) + ", " + m.first->ToString() + ", " + m.second->ToString() + ")";
    }
  };
  return std::visit(Visitor{}, shape_);
}

}  // namespace faasbench
