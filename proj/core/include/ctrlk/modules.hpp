#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrlk/posets.hpp"
#include "ctrlk/rings.hpp"

namespace ctrlk {

/// Free module with an ordered list of distinct basis labels and optional
/// locations (label -> point of a control space).
class BasedModule {
 public:
  explicit BasedModule(Ring ring, std::vector<std::string> basis = {},
                       std::map<std::string, std::string> location = {});

  const Ring& ring() const noexcept { return impl_->ring; }
  const std::vector<std::string>& basis() const noexcept { return impl_->basis; }
  std::size_t rank() const noexcept { return impl_->basis.size(); }
  bool contains(const std::string& label) const { return impl_->index.count(label) > 0; }
  /// Throws UnknownLabel.
  std::size_t index(const std::string& label) const;
  bool has_location() const noexcept { return !impl_->location.empty() || rank() == 0; }
  const std::map<std::string, std::string>& locations() const noexcept { return impl_->location; }
  const std::string& location(const std::string& label) const;

  friend bool operator==(const BasedModule& a, const BasedModule& b);
  friend bool operator!=(const BasedModule& a, const BasedModule& b) { return !(a == b); }

 private:
  struct Impl {
    Ring ring;
    std::vector<std::string> basis;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::string> location;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Based submodule on the given labels, kept in C's basis order.
BasedModule submodule(const BasedModule& c, const std::vector<std::string>& labels);
/// Complementary based submodule; NotASubbasis when D is not a subbasis.
BasedModule perp(const BasedModule& c, const std::vector<std::string>& d);
BasedModule perp(const BasedModule& c, const BasedModule& d);
/// Labels of `b` receive `prefix` when any label collides with `a`.
BasedModule direct_sum(const BasedModule& a, const BasedModule& b, const std::string& prefix = "s.");
/// Label a summand label of direct_sum(a, b, prefix) receives.
std::string summand_label(const BasedModule& a, const BasedModule& b, const std::string& label,
                          const std::string& prefix = "s.");

/// Sparse matrix: columns indexed by source basis, rows by target basis.
class Morphism {
 public:
  using Column = std::map<std::size_t, Scalar>;

  Morphism(BasedModule source, BasedModule target);
  static Morphism identity(const BasedModule& m);
  static Morphism from_dense(BasedModule source, BasedModule target, const DenseMatrix& rows);

  const BasedModule& source() const noexcept { return source_; }
  const BasedModule& target() const noexcept { return target_; }
  const Ring& ring() const noexcept { return source_.ring(); }

  const Column& column(std::size_t col) const { return cols_[col]; }
  Scalar at(std::size_t row, std::size_t col) const;
  Scalar entry(const std::string& row, const std::string& col) const;
  void set(std::size_t row, std::size_t col, const Scalar& v);
  void set(const std::string& row, const std::string& col, const Scalar& v);
  void add_to(std::size_t row, std::size_t col, const Scalar& v);

  bool is_zero() const;
  std::size_t nonzeros() const;
  DenseMatrix to_dense() const;

  friend bool operator==(const Morphism& a, const Morphism& b);
  friend bool operator!=(const Morphism& a, const Morphism& b) { return !(a == b); }

 private:
  BasedModule source_;
  BasedModule target_;
  std::vector<Column> cols_;
};

/// g ∘ f. ShapeMismatch unless target(f) == source(g).
Morphism compose(const Morphism& f, const Morphism& g);
Morphism add(const Morphism& f, const Morphism& g);
Morphism sub(const Morphism& f, const Morphism& g);
Morphism neg(const Morphism& f);
Morphism scale(const Scalar& r, const Morphism& f);
/// Block of f between based submodules (or supersets) of its source and target;
/// labels absent from f read as zero.
Morphism block(const Morphism& f, const BasedModule& source, const BasedModule& target);
/// Two-sided inverse by elimination with left row operations. Euclidean
/// reduction over Z and Z/n; unit pivots only over group and Laurent rings.
std::optional<Morphism> try_invert(const Morphism& f);
/// Same matrix on modules of equal ranks, matched by basis position.
Morphism relabel(const Morphism& f, const BasedModule& source, const BasedModule& target);
/// [[a, b], [c, d]]: s1 ⊕ s2 -> t1 ⊕ t2 with direct_sum labels; null blocks are zero.
Morphism block2(const BasedModule& s1, const BasedModule& s2, const BasedModule& t1,
                const BasedModule& t2, const Morphism* a, const Morphism* b, const Morphism* c,
                const Morphism* d);
/// Block of a morphism between direct sums, as a morphism of the summands.
/// `first_source`/`first_target` select the summand on each side.
Morphism summand_block(const Morphism& f, const BasedModule& s1, const BasedModule& s2,
                       const BasedModule& t1, const BasedModule& t2, bool first_source,
                       bool first_target);
std::string describe_entry(const Morphism& f, std::size_t row, std::size_t col);

/// Partial injection source label -> target label.
using BaseFunction = std::map<std::string, std::string>;

/// Base function of a U-diagonal morphism; NotDiagonal or CoefficientOutsideU.
BaseFunction is_U_diagonal(const Morphism& f, UnitKind u);

struct TriangularDecomposition {
  Morphism diagonal;
  Morphism increasing;
  BaseFunction base;
  UnitKind unit = UnitKind::AllUnits;
};

/// The unique h + u splitting of f with respect to the target order. When
/// the source order is supplied (or source == target, using the target
/// order) the base function must also be order preserving. NotTriangular.
TriangularDecomposition decompose_triangular(const Morphism& f, const Poset& target_order,
                                             UnitKind u, const Poset* source_order = nullptr);

/// (h+u)^-1 = Σ (-h^-1 u)^i h^-1. DiagonalNotInvertible.
Morphism invert_triangular(const TriangularDecomposition& d);

struct ElementaryFactorization {
  /// Nonzero increasing endomorphisms of the target, alpha_1 first.
  std::vector<Morphism> alphas;
  /// Layer index (1-based) of each kept alpha.
  std::vector<std::size_t> layers;
  Morphism diagonal;
};

/// f = (1+alpha_n)...(1+alpha_1) diag(f). DiagonalNotInvertible.
ElementaryFactorization factor_elementary(const TriangularDecomposition& d);
/// Multiplies the factors back together.
Morphism reassemble(const ElementaryFactorization& e);

}  // namespace ctrlk
