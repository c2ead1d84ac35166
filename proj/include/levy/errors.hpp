#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace levy {

/// Argument outside the domain of a mathematical function (e.g. nu at the origin).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature gave up before reaching the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what + " (achieved error " + sci(achieved) + ", requested " + sci(requested) + ")"),
        achieved_(achieved),
        requested_(requested) {}

  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

 private:
  static std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  double achieved_;
  double requested_;
};

/// Invalid model, potential, grid or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string pointer = {})
      : std::invalid_argument(pointer.empty() ? what : pointer + ": " + what),
        message_(what),
        pointer_(std::move(pointer)) {}

  /// JSON pointer of the offending field, empty when not applicable.
  const std::string& pointer() const noexcept { return pointer_; }
  /// The description without the pointer prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::string pointer_;
};

/// A numerical procedure could not reach a verdict (e.g. sup did not stabilize).
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace levy
