#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glab {

// Machine-readable error category. The CLI maps these onto exit codes.
enum class ErrorCode {
  invalid_argument,  // bad parameters or config (exit 2)
  capacity,          // a memory/scale guard tripped (exit 3)
  invariant,         // a verified property did not hold (exit 4)
  fit,               // a regression could not be formed
  schema,            // CSV or config schema mismatch
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::invariant: return "invariant";
    case ErrorCode::fit: return "fit";
    case ErrorCode::schema: return "schema";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Process exit status for an error category: 2 invalid input, 3 capacity,
/// 4 invariant violation, 1 anything else.
inline int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::schema: return 2;
    case ErrorCode::capacity: return 3;
    case ErrorCode::invariant: return 4;
    default: return 1;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(ErrorCode::invalid_argument, m) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& m) : Error(ErrorCode::capacity, m) {}
};

struct InvariantError : Error {
  explicit InvariantError(const std::string& m) : Error(ErrorCode::invariant, m) {}
};

struct FitError : Error {
  explicit FitError(const std::string& m) : Error(ErrorCode::fit, m) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error(ErrorCode::schema, m) {}
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorCode::io, m) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace glab
