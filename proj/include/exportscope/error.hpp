#pragma once

#include <stdexcept>
#include <string>

namespace exportscope {

// Base for every error raised by the library. Callers that only need to
// distinguish "bad input" from "bug" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArchiveFormatError : public Error {
 public:
  using Error::Error;
};

// Raised when an archive contains entries that would escape the extraction
// root. The whole archive is rejected.
class SecurityError : public Error {
 public:
  using Error::Error;
};

class UnknownServiceError : public Error {
 public:
  using Error::Error;
};

class UnsupportedServiceError : public Error {
 public:
  using Error::Error;
};

class WrapperFormatError : public Error {
 public:
  using Error::Error;
};

class FormatVersionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class DegenerateLayoutError : public Error {
 public:
  using Error::Error;
};

class UnknownElementError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class RuleError : public Error {
 public:
  using Error::Error;
};

}  // namespace exportscope
