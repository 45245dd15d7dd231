#include "spatialprompt/error.hpp"

namespace spatialprompt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownStroke: return "UnknownStroke";
    case ErrorCode::DuplicateStrokeId: return "DuplicateStrokeId";
    case ErrorCode::DegenerateStroke: return "DegenerateStroke";
    case ErrorCode::NonFiniteCoordinate: return "NonFiniteCoordinate";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::InvalidRotation: return "InvalidRotation";
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::EmptyPointSet: return "EmptyPointSet";
    case ErrorCode::NonFinitePoint: return "NonFinitePoint";
    case ErrorCode::EmptySketch: return "EmptySketch";
    case ErrorCode::MalformedConstraintSet: return "MalformedConstraintSet";
    case ErrorCode::MissingSemanticPrompt: return "MissingSemanticPrompt";
    case ErrorCode::InvalidConstraintSet: return "InvalidConstraintSet";
    case ErrorCode::MalformedRequest: return "MalformedRequest";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::BackendRejected: return "BackendRejected";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::MalformedAsset: return "MalformedAsset";
    case ErrorCode::EmptyConstraintSet: return "EmptyConstraintSet";
    case ErrorCode::DegenerateMesh: return "DegenerateMesh";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::AssetTooLarge: return "AssetTooLarge";
    case ErrorCode::MalformedObj: return "MalformedObj";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::SessionFull: return "SessionFull";
    case ErrorCode::DuplicateParticipantId: return "DuplicateParticipantId";
    case ErrorCode::NotAParticipant: return "NotAParticipant";
    case ErrorCode::GenerationBusy: return "GenerationBusy";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::SequenceGap: return "SequenceGap";
    case ErrorCode::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

}  // namespace spatialprompt
