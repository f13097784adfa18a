#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbounds {

enum class ErrorCode {
  MissingColumn,
  NonBinaryTreatment,
  NonFiniteValue,
  EmptyArm,
  ParseError,
  UnknownCovariate,
  DuplicateTerm,
  SeparationDetected,
  RankDeficientDesign,
  NoConvergence,
  InconsistentRows,
  NumericalBreakdown,
  InfeasiblePolytope,
  TooFewUnits,
  AllReplicatesInfeasible,
  UsageError,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so callers
// (the CLI, the bootstrap loop) can decide what is fatal.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cbounds
