#pragma once

#include <stdexcept>
#include <string>

namespace crest {

// Base for every error the library raises on bad input or failed I/O. The CLI
// maps the concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Well-formed bytes that do not satisfy a schema (corpus lines, artifacts).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace crest
