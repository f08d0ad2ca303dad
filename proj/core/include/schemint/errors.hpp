#pragma once

#include <stdexcept>
#include <string>

namespace schemint {

// Base for every error raised by the library. The CLI maps the subclasses
// onto exit codes (parameter -> 1, data -> 2, state -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input documents (TSV, JSONL, dictionaries) could not be used.
class DataError : public Error {
 public:
  using Error::Error;
};

// A persisted artifact (cluster store, neighbor table, index) is damaged.
class StateCorruption : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace schemint
