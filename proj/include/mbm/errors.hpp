#pragma once

#include <stdexcept>
#include <string>

namespace mbm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid that does not contain the origin, or a misaligned request.
class GridError : public Error {
  using Error::Error;
};

/// A parameter outside its mathematical domain (e.g. a Hurst index outside (0,1)).
class DomainError : public Error {
  using Error::Error;
};

/// Evaluation requested outside the support of a sampled object.
class SupportError : public Error {
  using Error::Error;
};

/// Exact Gaussian synthesis failed (embedding and fallback both rejected).
class SynthesisError : public Error {
  using Error::Error;
};

/// Finite-difference stencil leaves the admissible range of H.
class StepError : public Error {
  using Error::Error;
};

/// Not enough scales or samples for a regression-based estimator.
class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, int available)
      : Error(what), available_(available) {}
  int available() const noexcept { return available_; }

 private:
  int available_;
};

/// A box size below the sampling resolution.
class ScaleError : public Error {
  using Error::Error;
};

/// Too few Monte Carlo replicates.
class StatisticsError : public Error {
  using Error::Error;
};

/// Operation not applicable to the given Hurst function.
class ApplicabilityError : public Error {
  using Error::Error;
};

/// Invalid experiment configuration; carries the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error(key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Output file could not be written.
class IoError : public Error {
  using Error::Error;
};

}  // namespace mbm
