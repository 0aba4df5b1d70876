#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fga {

enum class ErrorCode {
  InvalidFrame,
  InvalidStack,
  NonFiniteWeight,
  MalformedLine,
  NegativeValue,
  UnitMismatch,
  NegativeScale,
  NonFiniteScale,
  ZeroNorm,
  OutOfOrderTimestamp,
  IoError,
  EmptySample,
  EmptyBasis,
  InsufficientSamples,
  DegenerateDof,
  SingularCovariance,
  DomainError,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the CLI
// maps them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures remember where they happened.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line_no, const std::string& source, const std::string& detail)
      : Error(code, format(line_no, source, detail)), line_no_(line_no), source_(source) {}

  std::size_t line_no() const noexcept { return line_no_; }
  const std::string& source() const noexcept { return source_; }

 private:
  static std::string format(std::size_t line_no, const std::string& source, const std::string& detail) {
    std::string where = source.empty() ? "<input>" : source;
    return where + ":" + std::to_string(line_no) + ": " + detail;
  }

  std::size_t line_no_;
  std::string source_;
};

}  // namespace fga
