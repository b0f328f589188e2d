#pragma once

#include <stdexcept>
#include <string>

namespace mtscore {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Every transformed weight underflowed to zero, i.e. all log-weights are -inf.
class AllWeightsZero : public Error {
public:
  using Error::Error;
};

// Array geometry whose near-field validity interval is empty.
class DegenerateRegion : public Error {
public:
  using Error::Error;
};

// A matrix that the caller promised positive definite is not.
class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

// Score covariance estimate too ill-conditioned to invert.
class SingularGHat : public Error {
public:
  using Error::Error;
};

// Curvature estimate too ill-conditioned to invert.
class SingularFHat : public Error {
public:
  using Error::Error;
};

// Width selection found no grid point with invertible estimates.
class NoAdmissibleWidth : public Error {
public:
  using Error::Error;
};

// Config file is not valid JSON or contains unknown fields.
class ParseError : public Error {
public:
  using Error::Error;
};

// Config parsed but a field fails its range/consistency checks.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Filesystem failures while writing experiment artifacts.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace mtscore
