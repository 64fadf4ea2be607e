#include "irisbench/error.hpp"

namespace irisbench {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::MixedKinds: return "MixedKinds";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::MissingAnnotation: return "MissingAnnotation";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorKind::MissingTemplate: return "MissingTemplate";
    case ErrorKind::TooFewSubjects: return "TooFewSubjects";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InsufficientImpostors: return "InsufficientImpostors";
    case ErrorKind::EmptyGenuine: return "EmptyGenuine";
    case ErrorKind::EmptyGallery: return "EmptyGallery";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace irisbench
