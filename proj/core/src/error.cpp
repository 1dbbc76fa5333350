#include "gifs/error.hpp"

namespace gifs {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMesh: return "EmptyMesh";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::InvalidMesh: return "InvalidMesh";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::CorruptRecord: return "CorruptRecord";
    case ErrorKind::DivergedTraining: return "DivergedTraining";
    case ErrorKind::RefinementDiverged: return "RefinementDiverged";
    case ErrorKind::EmptyPointSet: return "EmptyPointSet";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gifs
