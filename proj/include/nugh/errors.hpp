#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nugh {

enum class ErrorKind {
  Domain,
  Convergence,
  Range,
  Branch,
  Truncation,
  Alias,
  Bracket,
  Parse,
  InsufficientData,
  NoConvergence,
};

inline const char* errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::Range: return "RangeError";
    case ErrorKind::Branch: return "BranchError";
    case ErrorKind::Truncation: return "TruncationError";
    case ErrorKind::Alias: return "AliasError";
    case ErrorKind::Bracket: return "BracketError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NoConvergence: return "NoConvergence";
  }
  return "Error";
}

/// Base of every error raised by the library. `where()` names the failing
/// module and operation ("gh_core::validateParams").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, const std::string& message)
      : std::runtime_error(std::string(errorKindName(kind)) + " in " + where + ": " + message),
        kind_(kind),
        where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

  /// Bad input rather than a numerical failure.
  bool isValidation() const noexcept {
    return kind_ == ErrorKind::Domain || kind_ == ErrorKind::Parse ||
           kind_ == ErrorKind::InsufficientData;
  }

 private:
  ErrorKind kind_;
  std::string where_;
};

class DomainError : public Error {
 public:
  DomainError(std::string where, const std::string& message)
      : Error(ErrorKind::Domain, std::move(where), message) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(std::string where, const std::string& message)
      : Error(ErrorKind::Convergence, std::move(where), message) {}
};

class RangeError : public Error {
 public:
  RangeError(std::string where, const std::string& message)
      : Error(ErrorKind::Range, std::move(where), message) {}
};

class BranchError : public Error {
 public:
  BranchError(std::string where, const std::string& message)
      : Error(ErrorKind::Branch, std::move(where), message) {}
};

class TruncationError : public Error {
 public:
  TruncationError(std::string where, const std::string& message)
      : Error(ErrorKind::Truncation, std::move(where), message) {}
};

class AliasError : public Error {
 public:
  AliasError(std::string where, const std::string& message)
      : Error(ErrorKind::Alias, std::move(where), message) {}
};

class BracketError : public Error {
 public:
  BracketError(std::string where, const std::string& message)
      : Error(ErrorKind::Bracket, std::move(where), message) {}
};

class ParseError : public Error {
 public:
  ParseError(std::string where, long row, const std::string& reason)
      : Error(ErrorKind::Parse, std::move(where),
              "row " + std::to_string(row) + ": " + reason),
        row_(row) {}
  long row() const noexcept { return row_; }

 private:
  long row_;
};

class InsufficientData : public Error {
 public:
  InsufficientData(std::string where, const std::string& message)
      : Error(ErrorKind::InsufficientData, std::move(where), message) {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(std::string where, const std::string& message)
      : Error(ErrorKind::NoConvergence, std::move(where), message) {}
};

}  // namespace nugh
