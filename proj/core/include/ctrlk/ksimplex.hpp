#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrlk/chains.hpp"
#include "ctrlk/control.hpp"
#include "ctrlk/modules.hpp"
#include "ctrlk/posets.hpp"
#include "ctrlk/report.hpp"

namespace ctrlk {

/// Metric data for controlled simplices: module locations are points of `space`.
struct Controlled {
  ControlSpace space;
  double eps = 0;
};

/// Largest distance between the locations of a nonzero entry's row and column.
double located_radius(const Morphism& f, const ControlSpace& x);

/// Vertices C_0..C_n with contractions, chain maps c_{i,j} for i < j, and
/// one order per degree for each vertex.
struct K1Simplex {
  std::vector<ContractedComplex> complexes;
  std::map<std::pair<int, int>, ChainMap> maps;
  std::vector<std::vector<Poset>> orders;
  std::optional<Controlled> controlled;

  int dimension() const { return static_cast<int>(complexes.size()) - 1; }
  /// c_{i,j}; the identity when i == j. MissingCertificate when absent.
  ChainMap map(int i, int j) const;
};

/// j-th face: omits C_j.
K1Simplex face(const K1Simplex& s, int j);
ChainMap identity_map(const ChainComplex& c);

/// Conditions (1)-(4): ±1 triangular injections, image after complement,
/// commuting basis functions, cancellation of image complements. The
/// controlled case adds the radius and boundedness clauses, and elements
/// over Fr^eps X are exempt from the order clauses. MissingCertificate.
Report validate_k1_simplex(const K1Simplex& s);

/// f_{i,j}: A_i -> C_j for i <= j.
struct K1Morphism {
  K1Simplex source;
  K1Simplex target;
  std::map<std::pair<int, int>, ChainMap> maps;

  ChainMap map(int i, int j) const;
};

/// The k-th simplex has vertices A_0..A_k, C_k..C_n.
std::vector<K1Simplex> triangulate(const K1Morphism& f);

struct K1MorphismCheck {
  Report report;
  std::vector<K1Simplex> triangulation;
};
K1MorphismCheck validate_k1_morphism(const K1Morphism& f);

struct CancellationData {
  /// C ⊕ SC with contraction diag(xi, -xi).
  K1Simplex sum;
  /// C ⊕_1 SC with contraction [[0,0],[1,0]].
  K1Simplex cone;
  /// [[1,-xi_j],[0,1]] diag(c_{i,j}, c_{i,j}).
  K1Morphism morphism;
  /// 0 -> cone.
  K1Morphism inclusion;
};

/// Orders on C ⊕ SC come from shuffle_orders (with the image layers added in
/// the uncontrolled case); controlled inputs give 7 eps outputs. InvalidInput.
CancellationData cancellation_data(const K1Simplex& c);

enum class SignMode { One, PlusMinus };

struct VolodinPath {
  Ring ring;
  int k = 0;
  std::vector<DenseMatrix> matrices;
  SignMode mode = SignMode::One;
};

/// Labels e1..ek.
std::vector<std::string> volodin_basis(int k);
VolodinPath face(const VolodinPath& v, int j);

/// Order making every g_j g_i^-1 (j > i) 1-triangular (±1 in plus-minus
/// mode). NotInvertible, DiagonalNotOne, NoOrderExists.
Poset volodin_check(const VolodinPath& v);

/// Complexes R^k -> R^k with boundary g_i and contraction g_i^-1; chain maps
/// 1 in degree 1 and g_j g_i^-1 in degree 0.
K1Simplex volodin_to_k1(const VolodinPath& v);

/// eps_0 = 1, eps_i = diag(g_i g_{i-1}^-1 eps_{i-1}^-1); returns (eps_i g_i)
/// with an identity appended when eps_n != 1. `loop` requires g_0 = g_n = 1.
VolodinPath fix_signs(const VolodinPath& v, bool loop);

/// Given a 1-simplex f: B -> C of two-degree complexes and a based
/// isomorphism phi onto the complement of f(B^1), the 2-simplex
/// B -> B ⊕ 1_{R^l} -> C with f̂ = [f^1, phi], [f^0, c phi]. WrongComplementRank.
K1Simplex stabilize_morphism(const K1Simplex& f, const Morphism& phi);

}  // namespace ctrlk
