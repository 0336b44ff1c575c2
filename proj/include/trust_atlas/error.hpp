#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trust_atlas {

enum class ErrorCode {
    MalformedProgram,
    NonFiniteInput,
    InvalidSpec,
    NonFiniteState,
    DegenerateTrajectory,
    MismatchedDimensions,
    DimensionMismatch,
    ContradictoryPair,
    DegeneratePair,
    MissingFeature,
    OutOfDomain,
    InvalidSamples,
    ZeroAlpha,
    StorageFailure,
    ParseError,
    MissingFile,
    UnknownBehavior,
    UnknownSession,
    UnknownPair,
    AlreadyAnswered,
    NotAMember,
    NoData,
    DuplicateParticipant,
};

std::string_view code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI and the HTTP layer can report {code, message} without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace trust_atlas
