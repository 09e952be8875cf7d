#pragma once

#include <stdexcept>
#include <string>

namespace paleylab {

// Bad arguments, cap or window violations. Maps to exit status 2.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A coefficient that should vanish does not.
class HypothesisViolation : public InvalidInput {
 public:
  HypothesisViolation(const std::string& what, std::string freq)
      : InvalidInput(what), freq_(std::move(freq)) {}
  const std::string& frequency() const { return freq_; }

 private:
  std::string freq_;
};

}  // namespace paleylab
