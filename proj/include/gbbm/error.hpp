#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gbbm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The time integrator produced a non-finite state.
class FlowError : public Error {
 public:
  FlowError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// The Duhamel fixed-point iteration did not contract within the iteration
/// budget. Carries the successive-iterate distances for diagnosis.
class PicardError : public Error {
 public:
  PicardError(const std::string& what, std::vector<double> distances)
      : Error(what), distances_(std::move(distances)) {}
  const std::vector<double>& distances() const { return distances_; }

 private:
  std::vector<double> distances_;
};

/// A numerical self-check (quadrature residual, step resolution) failed.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A configuration file or override could not be parsed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbbm
