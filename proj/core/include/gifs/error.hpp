#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gifs {

enum class ErrorKind {
  EmptyMesh,
  DegenerateMesh,
  InvalidMesh,
  InvalidArgument,
  FormatError,
  TruncatedFile,
  CorruptRecord,
  DivergedTraining,
  RefinementDiverged,
  EmptyPointSet,
  UsageError,
  IoError,
};

std::string_view error_kind_name(ErrorKind kind);

/// Base of every exception thrown by the library. The kind names the
/// failure class; the CLI maps it onto exit codes and JSON error lines.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define GIFS_DEFINE_ERROR(Name)                                                     \
  class Name : public Error {                                                        \
   public:                                                                           \
    explicit Name(const std::string& message) : Error(ErrorKind::Name, message) {} \
  }

GIFS_DEFINE_ERROR(EmptyMesh);
GIFS_DEFINE_ERROR(DegenerateMesh);
GIFS_DEFINE_ERROR(InvalidMesh);
GIFS_DEFINE_ERROR(InvalidArgument);
GIFS_DEFINE_ERROR(FormatError);
GIFS_DEFINE_ERROR(TruncatedFile);
GIFS_DEFINE_ERROR(CorruptRecord);
GIFS_DEFINE_ERROR(DivergedTraining);
GIFS_DEFINE_ERROR(RefinementDiverged);
GIFS_DEFINE_ERROR(EmptyPointSet);
GIFS_DEFINE_ERROR(UsageError);
GIFS_DEFINE_ERROR(IoError);

#undef GIFS_DEFINE_ERROR

}  // namespace gifs
