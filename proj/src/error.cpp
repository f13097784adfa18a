#include "causalbounds/error.hpp"

namespace cbounds {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonBinaryTreatment: return "NonBinaryTreatment";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyArm: return "EmptyArm";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCovariate: return "UnknownCovariate";
    case ErrorCode::DuplicateTerm: return "DuplicateTerm";
    case ErrorCode::SeparationDetected: return "SeparationDetected";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InconsistentRows: return "InconsistentRows";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::InfeasiblePolytope: return "InfeasiblePolytope";
    case ErrorCode::TooFewUnits: return "TooFewUnits";
    case ErrorCode::AllReplicatesInfeasible: return "AllReplicatesInfeasible";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace cbounds
