#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Mirrors the status codes exposed through the C API.
enum class ErrorCode {
  InvalidArgument = 1,
  Unstable = 2,
  Unphysical = 3,
  Quadrature = 4,
  Orthogonality = 5,
  Config = 6,
  Io = 7,
  Internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

class UnphysicalState : public Error {
 public:
  explicit UnphysicalState(const std::string& what) : Error(ErrorCode::Unphysical, what) {}
};

class InternalInconsistency : public Error {
 public:
  explicit InternalInconsistency(const std::string& what) : Error(ErrorCode::Internal, what) {}
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(ErrorCode::Quadrature, what + " (achieved relative error " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(ErrorCode::Config, format(what, line, field)), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "'" + field + "': ";
    return out + what;
  }
  int line_;
  std::string field_;
};

}  // namespace optomech
