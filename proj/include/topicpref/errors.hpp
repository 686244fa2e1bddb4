#pragma once

#include <stdexcept>
#include <string>

namespace topicpref {

// Base of every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad rules, patterns or config values, detected before any scanning starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A persisted artifact (model, matrix dump) does not match its declared layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Unknown user or topic id.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A metric was requested over an empty population.
class MetricError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite RMSE.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch) : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

// Cosine of an all-zero vector.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

}  // namespace topicpref
