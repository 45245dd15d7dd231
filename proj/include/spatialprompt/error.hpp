#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spatialprompt {

enum class ErrorCode {
  // sketch_model
  UnknownStroke,
  DuplicateStrokeId,
  DegenerateStroke,
  NonFiniteCoordinate,
  NonPositiveScale,
  InvalidRotation,
  NonPositiveSpacing,
  NonPositiveLength,
  MalformedDocument,
  // constraint_compiler
  NonPositiveEpsilon,
  EmptyPointSet,
  NonFinitePoint,
  EmptySketch,
  MalformedConstraintSet,
  // prompt_assembler
  MissingSemanticPrompt,
  InvalidConstraintSet,
  MalformedRequest,
  // generation_backend
  Timeout,
  BackendRejected,
  NetworkError,
  MalformedAsset,
  EmptyConstraintSet,
  DegenerateMesh,
  ConfigError,
  AssetTooLarge,
  // validator
  MalformedObj,
  EmptyMesh,
  // collab_session
  SessionFull,
  DuplicateParticipantId,
  NotAParticipant,
  GenerationBusy,
  UnknownSession,
  SequenceGap,
  ProtocolError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the engine carries one of the codes above; the
/// session protocol forwards `to_string(code())` verbatim as a rejection reason.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  explicit Error(ErrorCode code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spatialprompt
