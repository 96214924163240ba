#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tccp {

struct SourcePos {
  std::size_t line = 0;  // 1-based; 0 when unknown
  std::size_t col = 0;
};

/// Base of every error raised by the library. Positioned errors render as
/// "line:col: message".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg, SourcePos pos = {})
      : std::runtime_error(render(msg, pos)), pos_(pos), message_(msg) {}

  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  static std::string render(const std::string& msg, SourcePos pos) {
    if (pos.line == 0) return msg;
    return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg;
  }

  SourcePos pos_;
  std::string message_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, SourcePos pos, std::string expected = {})
      : Error(msg, pos), expected_(std::move(expected)) {}

  /// What the parser was looking for, e.g. "'.'" or "agent"; may be empty.
  const std::string& expected() const { return expected_; }

 private:
  std::string expected_;
};

// Program-level checks.
class ArityError : public Error { using Error::Error; };
class UnknownProcedure : public Error { using Error::Error; };
class UnboundVariable : public Error { using Error::Error; };
class DuplicateDeclaration : public Error { using Error::Error; };

// Linear store.
class UnallocatedDimension : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// Register store.
class DuplicateInScope : public Error { using Error::Error; };
class UnknownSymbol : public Error { using Error::Error; };
class UnboundActual : public Error { using Error::Error; };
class UnknownScope : public Error { using Error::Error; };

using UnresolvableVariable = UnknownSymbol;

}  // namespace tccp
