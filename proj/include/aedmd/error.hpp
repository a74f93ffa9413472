#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace aedmd {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// A point left the open domain on which the kernel is defined.
class DomainViolation : public Error {
public:
  DomainViolation(const std::string& what, std::size_t sample, double magnitude)
      : Error(what), sample_(sample), magnitude_(magnitude) {}

  std::size_t sample() const noexcept { return sample_; }
  double magnitude() const noexcept { return magnitude_; }

private:
  std::size_t sample_;
  double magnitude_;
};

class SingularMatrix : public Error {
public:
  SingularMatrix(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

private:
  double condition_estimate_;
};

// Trajectory integration produced a non-finite state.
class IntegrationBlowUp : public Error {
public:
  IntegrationBlowUp(const std::string& what, std::optional<std::size_t> sample)
      : Error(what), sample_(sample) {}

  std::optional<std::size_t> sample() const noexcept { return sample_; }

private:
  std::optional<std::size_t> sample_;
};

} // namespace aedmd
