#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace twofluid {

enum class ErrorKind {
  NonFinite,
  MaxIterExceeded,
  VacuumCell,
  ZeroDt,
  PositivityLoss,
  GridMismatch,
  TimeGridMismatch,
  VacuumReference,
  EmptySeries,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorKind kind);

/// Base of every error raised by the library. Carries a machine-readable kind
/// and, where it makes sense, the offending cell index and simulation time.
class Error : public std::runtime_error {
 public:
  static constexpr std::ptrdiff_t kNoCell = -1;

  Error(ErrorKind kind, const std::string& what, std::ptrdiff_t cell = kNoCell,
        double time = 0.0)
      : std::runtime_error(what), kind_(kind), cell_(cell), time_(time) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::ptrdiff_t cell() const noexcept { return cell_; }
  double time() const noexcept { return time_; }
  bool has_cell() const noexcept { return cell_ != kNoCell; }

 private:
  ErrorKind kind_;
  std::ptrdiff_t cell_;
  double time_;
};

/// Config problems. line/column are 1-based; 0 when not applicable.
class ConfigError : public Error {
 public:
  ConfigError(ErrorKind kind, const std::string& what, std::string field = {},
              int line = 0, int column = 0)
      : Error(kind, what), field_(std::move(field)), line_(line), column_(column) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::VacuumCell: return "VacuumCell";
    case ErrorKind::ZeroDt: return "ZeroDt";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TimeGridMismatch: return "TimeGridMismatch";
    case ErrorKind::VacuumReference: return "VacuumReference";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace twofluid
