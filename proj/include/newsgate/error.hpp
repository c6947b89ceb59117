#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace newsgate {

enum class ErrorCode {
  EmptyBatch,
  InvalidTransaction,
  ParseError,
  DuplicateId,
  InvalidRoles,
  UnknownParticipant,
  NotAReporter,
  NonPositiveTheta,
  NoHistory,
  AlreadyResolved,
  UnknownArticle,
  InvalidRating,
  EmptyPanel,
  NoValidators,
  InvalidWeights,
  InvalidPanelSpec,
  InsufficientJournalists,
  InsufficientMachineAnalyzers,
  ProviderFailure,
  DegenerateCorpus,
  DimensionMismatch,
  CommitmentMismatch,
  InvalidState,
  OverlappingVocabularies,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Every failure mode the
/// protocol declares maps onto one ErrorCode.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace newsgate
