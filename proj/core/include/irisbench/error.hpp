#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irisbench {

enum class ErrorKind {
  Parse,
  InvariantViolation,
  DuplicateId,
  MixedKinds,
  Io,
  MissingAnnotation,
  NoOverlap,
  DegenerateGeometry,
  ShapeMismatch,
  DimMismatch,
  LayoutMismatch,
  InsufficientOverlap,
  MissingTemplate,
  TooFewSubjects,
  EmptyPool,
  InvalidSpec,
  InsufficientImpostors,
  EmptyGenuine,
  EmptyGallery,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain error raised by every module. The kind is stable and meant for
/// programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace irisbench
