#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctrlk/modules.hpp"
#include "ctrlk/report.hpp"

namespace ctrlk {

/// Bounded complex with modules in degrees 0..N and boundaries c_n: C^n -> C^{n-1}.
class ChainComplex {
 public:
  static constexpr int kMaxDegree = 64;

  /// DegreeLimit above kMaxDegree. Boundaries start at zero.
  ChainComplex(Ring ring, std::vector<BasedModule> modules);

  const Ring& ring() const noexcept { return ring_; }
  /// N, or -1 for the empty complex.
  int top() const noexcept { return static_cast<int>(modules_.size()) - 1; }
  const std::vector<BasedModule>& modules() const noexcept { return modules_; }
  /// Zero module outside 0..N.
  BasedModule module(int n) const;
  /// C^n -> C^{n-1}; zero outside the stored range.
  Morphism boundary(int n) const;
  void set_boundary(int n, Morphism c);

  friend bool operator==(const ChainComplex& a, const ChainComplex& b);

 private:
  Ring ring_;
  std::vector<BasedModule> modules_;
  std::vector<Morphism> boundary_;
};

/// Degree +1 maps xi_n: C^n -> C^{n+1}.
class Contraction {
 public:
  explicit Contraction(const ChainComplex& c);
  /// Zero outside 0..N.
  Morphism at(int n) const;
  void set(int n, Morphism xi);

  friend bool operator==(const Contraction& a, const Contraction& b);

 private:
  Ring ring_;
  std::vector<BasedModule> modules_;
  std::vector<Morphism> maps_;
};

struct ContractedComplex {
  ChainComplex complex;
  Contraction xi;
};

/// Degree-0 maps f_n: C^n -> D^n.
struct ChainMap {
  ChainComplex source;
  ChainComplex target;
  std::vector<Morphism> maps;

  ChainMap(ChainComplex source, ChainComplex target);
  /// Zero outside the common range.
  Morphism at(int n) const;
  void set(int n, Morphism f);
};

/// Checks c∘c = 0 per degree and, with a contraction, c xi + xi c = 1.
Report validate_complex(const ChainComplex& c, const Contraction* xi = nullptr);
/// Checks target.c ∘ f = f ∘ source.c per degree.
Report validate_chain_map(const ChainMap& f);

/// Shift by j; boundary and contraction pick up (-1)^j. Negative degrees with
/// nonzero modules are dropped with `truncate`, DegreeLimit otherwise.
ChainComplex suspend(const ChainComplex& c, int j, bool truncate = false);
ContractedComplex suspend(const ContractedComplex& c, int j, bool truncate = false);
ChainMap suspend(const ChainMap& f, int j, bool truncate = false);

struct Cone {
  ChainComplex complex;
  std::optional<Contraction> contraction;
};

/// C̄ ⊕ SC with boundary [[c̄, f], [0, -c]]; contraction [[0,0],[f^-1,0]] when
/// every f^n is invertible. NotAChainMap.
Cone mapping_cone(const ChainMap& f);

/// Blockwise sum; RingMismatch.
ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b);
ContractedComplex direct_sum(const ContractedComplex& a, const ContractedComplex& b);

/// C = Ĉ ⊕ D ⊕ D̄ per degree with delta_n: D̄^n -> D^{n+1}.
struct CancellationDecomposition {
  std::vector<BasedModule> kept;
  std::vector<BasedModule> upper;
  std::vector<BasedModule> lower;
  std::vector<Morphism> delta;
};

/// Elements exempt from the order condition (degree, label).
using OrderExemption = std::function<bool(int, const std::string&)>;

/// The unique decomposition showing xi cancels the complement of the based
/// subcomplex spanned by `kept` (one label set per degree). `orders` holds one
/// poset per degree; empty means antichains. delta must be U-triangular,
/// U = {±1} by default. NoCancellation.
CancellationDecomposition find_cancellation(const ContractedComplex& c,
                                            const std::vector<PointSet>& kept,
                                            const std::vector<Poset>& orders = {},
                                            const OrderExemption& exempt = {},
                                            UnitKind unit = UnitKind::PlusMinusOne);

struct Standardization {
  /// Chain isomorphism f_n: C^n -> C^n from the standardized complex.
  std::vector<Morphism> f;
  std::vector<Morphism> f_inverse;
  ContractedComplex standard;
};

/// f = (1-p) + c pi_D xi p, b = f^-1 c f, beta = f^-1 xi f, with the block
/// forms and f b = c f, f beta = xi f verified. InvalidDecomposition.
Standardization standardize_cancellation(const ContractedComplex& c,
                                         const CancellationDecomposition& dec);

/// Degree 0 = evens, degree 1 = odds, boundary c - xi c xi, contraction
/// xi c xi - c xi c. Inputs with N <= 1 are returned unchanged.
/// NotStrictContractible.
ContractedComplex fold_two_degrees(const ContractedComplex& c);

}  // namespace ctrlk
