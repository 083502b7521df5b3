#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctrlk {

enum class ErrorKind {
  NotAUnit,
  Singular,
  RingMismatch,
  InvalidRing,
  DuplicateLabel,
  UnknownLabel,
  NotASubbasis,
  ShapeMismatch,
  CycleDetected,
  NoOrderExists,
  NotNested,
  UnknownPoint,
  InvalidSpace,
  NotDiagonal,
  CoefficientOutsideU,
  RadiusExceeded,
  NotTriangular,
  DiagonalNotInvertible,
  NotAChainMap,
  NoCancellation,
  InvalidDecomposition,
  NotStrictContractible,
  DegreeLimit,
  ModuleMismatch,
  TrackMismatch,
  Disconnected,
  NotAComplex,
  MissingWitness,
  NotEpsilonBounded,
  MissingCertificate,
  InvalidInput,
  NotInvertible,
  DiagonalNotOne,
  WrongComplementRank,
  MalformedDocument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this type; `kind` names
/// the failure class and `witness` carries the offending datum, if any.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string witness);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::string witness_;
};

}  // namespace ctrlk
