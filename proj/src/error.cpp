#include "trust_atlas/error.hpp"

namespace trust_atlas {

std::string_view code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedProgram: return "MalformedProgram";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::DegenerateTrajectory: return "DegenerateTrajectory";
        case ErrorCode::MismatchedDimensions: return "MismatchedDimensions";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ContradictoryPair: return "ContradictoryPair";
        case ErrorCode::DegeneratePair: return "DegeneratePair";
        case ErrorCode::MissingFeature: return "MissingFeature";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::InvalidSamples: return "InvalidSamples";
        case ErrorCode::ZeroAlpha: return "ZeroAlpha";
        case ErrorCode::StorageFailure: return "StorageFailure";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::UnknownBehavior: return "UnknownBehavior";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownPair: return "UnknownPair";
        case ErrorCode::AlreadyAnswered: return "AlreadyAnswered";
        case ErrorCode::NotAMember: return "NotAMember";
        case ErrorCode::NoData: return "NoData";
        case ErrorCode::DuplicateParticipant: return "DuplicateParticipant";
    }
    return "Unknown";
}

}  // namespace trust_atlas
