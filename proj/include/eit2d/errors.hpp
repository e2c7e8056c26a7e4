#pragma once

#include <stdexcept>
#include <string>

namespace eit2d {

// Invalid argument to a numerical routine (negative rate, t < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent physical configuration, e.g. an interaction frame requested
// for an off-resonant drive.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input state violates the density-matrix invariants.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical accuracy pre-condition not met (e.g. time window too short).
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Spectrum file failed its checksum or is malformed.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eit2d
