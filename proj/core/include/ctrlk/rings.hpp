#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ctrlk/error.hpp"

namespace ctrlk {

using Integer = boost::multiprecision::cpp_int;

/// Ring element stored as a sparse, key-sorted list of (group key, coefficient).
///
/// Every supported ring is a group ring: Z and Z/n use the trivial group
/// (key 0), a finite group ring uses element indices of its multiplication
/// table, and the Laurent ring Z[t, 1/t] uses exponents. Zero is the empty
/// list; no stored coefficient is zero.
class Scalar {
 public:
  using Term = std::pair<std::int64_t, Integer>;

  Scalar() = default;

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  friend class Ring;
  std::vector<Term> terms_;
};

enum class RingKind { Integers, IntegersMod, GroupRing, Laurent };

/// Designated unit subgroup U used by diagonal and triangular morphisms.
enum class UnitKind { One, PlusMinusOne, PlusMinusGroup, AllUnits };

using DenseMatrix = std::vector<std::vector<Scalar>>;

/// Exact coefficient ring. Immutable and cheap to copy.
class Ring {
 public:
  static Ring integers();
  static Ring integers_mod(const Integer& n);
  /// `table[a][b]` is the index of a*b. Validated as a group.
  static Ring group_ring(std::vector<std::vector<int>> table);
  static Ring laurent();

  RingKind kind() const noexcept;
  const Integer& modulus() const noexcept;
  const std::vector<std::vector<int>>& table() const noexcept;
  std::int64_t identity_key() const noexcept;

  Scalar zero() const { return {}; }
  Scalar one() const;
  Scalar from_integer(const Integer& n) const;
  /// coeff * g where g is the group element with the given key.
  Scalar monomial(std::int64_t key, const Integer& coeff) const;

  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar neg(const Scalar& a) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;

  bool is_one(const Scalar& a) const;
  bool is_minus_one(const Scalar& a) const;

  std::optional<Scalar> try_invert(const Scalar& a) const;
  /// Throws NotAUnit.
  Scalar invert_unit(const Scalar& a) const;
  bool in_unit_subgroup(const Scalar& a, UnitKind u) const;

  std::string to_string(const Scalar& a) const;
  std::string describe() const;

  friend bool operator==(const Ring& a, const Ring& b);
  friend bool operator!=(const Ring& a, const Ring& b) { return !(a == b); }

 private:
  struct Impl;
  explicit Ring(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  Scalar normalized(std::vector<Scalar::Term> terms) const;
  std::int64_t combine(std::int64_t a, std::int64_t b) const;
  std::int64_t inverse_key(std::int64_t a) const;

  std::shared_ptr<const Impl> impl_;
};

DenseMatrix identity_matrix(const Ring& ring, std::size_t n);
DenseMatrix multiply(const Ring& ring, const DenseMatrix& a, const DenseMatrix& b);

/// Two-sided inverse for test oracles: rational Gauss-Jordan over Z (the
/// result must be integral) and the adjugate formula over Z/n.
/// Throws Singular; InvalidRing for group and Laurent rings.
DenseMatrix ring_matrix_inverse_oracle(const Ring& ring, const DenseMatrix& m);

}  // namespace ctrlk
