#pragma once

#include <stdexcept>
#include <string>

namespace fgt {

/// Base for every error raised by the library. `kind()` is a stable tag used
/// by the CLI and by the machine-readable report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FGT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

FGT_DEFINE_ERROR(MixedStratum)
FGT_DEFINE_ERROR(EmptyStratum)
FGT_DEFINE_ERROR(BadOptionCount)
FGT_DEFINE_ERROR(DuplicateKey)
FGT_DEFINE_ERROR(KConflict)
FGT_DEFINE_ERROR(Unassigned)
FGT_DEFINE_ERROR(InsufficientRuns)
FGT_DEFINE_ERROR(ShapeMismatch)
FGT_DEFINE_ERROR(ZeroVector)
FGT_DEFINE_ERROR(DegenerateAngle)
FGT_DEFINE_ERROR(ConfigError)
FGT_DEFINE_ERROR(FormatError)

#undef FGT_DEFINE_ERROR

/// Malformed input record; carries the offending line and field.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, std::string field, const std::string& what)
      : Error("SchemaError", "line " + std::to_string(line) + ", field '" + field + "': " + what),
        line_(line),
        field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace fgt
