#pragma once

#include <stdexcept>
#include <string>

namespace placeplan {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable identifier used in service responses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Malformed scene/config document. Carries the JSON pointer of the
/// offending field.
class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& message)
      : Error("parse_error", location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message) : Error("validation_error", message) {}
};

/// A documented precondition of an operation was violated by the caller.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& message) : Error("contract_violation", message) {}
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& message) : Error("cap_exceeded", message) {}
};

class UnsupportedGeometry : public Error {
 public:
  explicit UnsupportedGeometry(const std::string& message)
      : Error("unsupported_geometry", message) {}
};

class NoReceptacle : public Error {
 public:
  explicit NoReceptacle(const std::string& message) : Error("no_receptacle", message) {}
};

/// Transport failure talking to the remote reasoner.
class RemoteError : public Error {
 public:
  RemoteError(const std::string& message, int attempts)
      : Error("remote_error", message), attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// The remote completion named no known receptacle.
class CompletionParseError : public Error {
 public:
  CompletionParseError(const std::string& message, std::string raw)
      : Error("completion_parse_error", message), raw_(std::move(raw)) {}

  const std::string& raw_completion() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class NoCandidates : public Error {
 public:
  explicit NoCandidates(const std::string& message) : Error("no_candidates", message) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error("not_found", message) {}
};

class AlreadyPlaced : public Error {
 public:
  explicit AlreadyPlaced(const std::string& message) : Error("already_placed", message) {}
};

}  // namespace placeplan
