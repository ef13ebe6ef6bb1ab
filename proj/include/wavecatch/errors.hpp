#pragma once

#include <stdexcept>
#include <string>

namespace wavecatch {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value (bad dt, negative limit, unknown key, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Non-finite values fed into a numeric routine.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

/// Dimension mismatch between containers that must align.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

/// Euler conversion requested at or beyond the pitch singularity.
class DegenerateAnglesError : public Error {
 public:
  explicit DegenerateAnglesError(const std::string& what) : Error(what) {}
};

/// Reference outside the configured flight envelope.
class EnvelopeError : public Error {
 public:
  explicit EnvelopeError(const std::string& what) : Error(what) {}
};

/// Measurement stamps going backwards in a feed.
class TimestampError : public Error {
 public:
  explicit TimestampError(const std::string& what) : Error(what) {}
};

}  // namespace wavecatch
