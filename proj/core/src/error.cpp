#include "ctrlk/error.hpp"

namespace ctrlk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::RingMismatch: return "RingMismatch";
    case ErrorKind::InvalidRing: return "InvalidRing";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::NotASubbasis: return "NotASubbasis";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::NoOrderExists: return "NoOrderExists";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::UnknownPoint: return "UnknownPoint";
    case ErrorKind::InvalidSpace: return "InvalidSpace";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::CoefficientOutsideU: return "CoefficientOutsideU";
    case ErrorKind::RadiusExceeded: return "RadiusExceeded";
    case ErrorKind::NotTriangular: return "NotTriangular";
    case ErrorKind::DiagonalNotInvertible: return "DiagonalNotInvertible";
    case ErrorKind::NotAChainMap: return "NotAChainMap";
    case ErrorKind::NoCancellation: return "NoCancellation";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::NotStrictContractible: return "NotStrictContractible";
    case ErrorKind::DegreeLimit: return "DegreeLimit";
    case ErrorKind::ModuleMismatch: return "ModuleMismatch";
    case ErrorKind::TrackMismatch: return "TrackMismatch";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::NotAComplex: return "NotAComplex";
    case ErrorKind::MissingWitness: return "MissingWitness";
    case ErrorKind::NotEpsilonBounded: return "NotEpsilonBounded";
    case ErrorKind::MissingCertificate: return "MissingCertificate";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::DiagonalNotOne: return "DiagonalNotOne";
    case ErrorKind::WrongComplementRank: return "WrongComplementRank";
    case ErrorKind::MalformedDocument: return "MalformedDocument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string witness)
    : std::runtime_error(std::string(to_string(kind)) +
                         (witness.empty() ? "" : ": " + witness)),
      kind_(kind),
      witness_(std::move(witness)) {}

}  // namespace ctrlk
