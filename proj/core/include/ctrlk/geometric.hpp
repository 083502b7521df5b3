#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ctrlk/control.hpp"
#include "ctrlk/modules.hpp"
#include "ctrlk/posets.hpp"
#include "ctrlk/report.hpp"

namespace ctrlk {

/// Coefficient map p: E -> X. Distances are measured in X.
struct ReferenceMap {
  ControlSpace E;
  ControlSpace X;
  std::map<std::string, std::string> projection;

  /// Validates that the projection is total with values in X.
  ReferenceMap(ControlSpace e, ControlSpace x, std::map<std::string, std::string> projection);
  static ReferenceMap identity(const ControlSpace& x);

  const std::string& project(const std::string& e) const;
  Samples project(const Samples& path) const;
  bool over(const std::string& e, const PointSet& y) const { return y.count(project(e)) > 0; }
  /// p restricted to p^-1(U) -> U, both as subspaces.
  ReferenceMap restrict_to(const PointSet& u) const;
};

/// Located basis elements (module locations are E-points) lying over Y.
BasedModule grestrict(const ReferenceMap& rm, const BasedModule& m, const PointSet& y);

struct GPath {
  Scalar coeff;
  std::string from;
  std::string to;
  Samples via;
};

using PathKey = std::tuple<std::string, std::string, Samples>;
inline PathKey key_of(const GPath& p) { return {p.from, p.to, p.via}; }

/// Formal combination of paths; kept sorted by (from, to, via) with
/// duplicates merged and zero coefficients dropped.
class GMorphism {
 public:
  GMorphism(BasedModule source, BasedModule target, std::vector<GPath> paths = {});
  /// Constant one-sample paths with coefficient 1.
  static GMorphism identity(const BasedModule& m);

  const BasedModule& source() const noexcept { return source_; }
  const BasedModule& target() const noexcept { return target_; }
  const Ring& ring() const noexcept { return source_.ring(); }
  const std::vector<GPath>& paths() const noexcept { return paths_; }
  bool is_zero() const noexcept { return paths_.empty(); }
  /// Paths beginning at the given basis element.
  std::vector<GPath> paths_from(const std::string& x) const;
  /// Induced homomorphism of the free modules.
  Morphism algebraic() const;

  friend bool operator==(const GMorphism& a, const GMorphism& b);
  friend bool operator!=(const GMorphism& a, const GMorphism& b) { return !(a == b); }

 private:
  BasedModule source_;
  BasedModule target_;
  std::vector<GPath> paths_;
};

/// Radius of the X-projection of a path.
double gradius(const ReferenceMap& rm, const Samples& via);
/// Largest path radius; 0 for the empty morphism.
double gradius(const ReferenceMap& rm, const GMorphism& f);
/// g ∘ f: concatenations sharing the middle basis element. ModuleMismatch.
GMorphism gcompose(const GMorphism& f, const GMorphism& g);
GMorphism gadd(const GMorphism& f, const GMorphism& g);
GMorphism gneg(const GMorphism& f);
GMorphism gsub(const GMorphism& f, const GMorphism& g);
/// Paths lying entirely over Y, between the modules restricted to Y.
GMorphism grestrict(const ReferenceMap& rm, const GMorphism& f, const PointSet& y);
/// Free reduction of the sample words: "a b a" becomes "a".
GMorphism reduce_backtracks(const GMorphism& f);
Samples reduce_backtracks(const Samples& via);

/// Per path, the sequence of stages (stage 0 is the path itself), all of the
/// same length with fixed ends.
struct GHomotopy {
  std::map<PathKey, std::vector<Samples>> tracks;
};

/// Largest per-sample excursion in X over all tracks. TrackMismatch.
double gradius(const ReferenceMap& rm, const GHomotopy& h);
/// Same coefficients on the end paths; repeated samples are collapsed except
/// at points of E carrying a self-loop. TrackMismatch unless the tracks
/// cover exactly the paths of f.
GMorphism apply_homotopy(const ReferenceMap& rm, const GMorphism& f, const GHomotopy& h);
/// Tracks run backwards, keyed by their end paths.
GHomotopy reverse(const GHomotopy& h);
/// Constant tracks for every path of f.
GHomotopy constant_homotopy(const GMorphism& f);
/// Homotopy from f to reduce_backtracks(f), one backtrack per stage.
GHomotopy backtrack_homotopy(const GMorphism& f);
/// Tracks of h for paths of `start` that stay over U; constant tracks for
/// paths of `start` whose track leaves U.
GHomotopy grestrict(const ReferenceMap& rm, const GHomotopy& h, const GMorphism& start,
                    const PointSet& u);

/// Data for forgetting control: a spanning tree of E and the group element of
/// each non-tree edge, traversed from its first to its second end. Without a
/// ring, E must have exactly one non-tree edge, which becomes t in Z[t,1/t].
struct FundamentalGroupData {
  std::string basepoint;
  std::vector<Edge> tree;
  std::optional<Ring> ring;
  std::map<std::pair<std::string, std::string>, std::int64_t> labels;
};

/// Matrix over the group ring; a path contributes its coefficient times the
/// product of its non-tree edge labels in reverse traversal order, so that
/// forget(g∘f) = forget(g)·forget(f). Disconnected, InvalidRing.
Morphism forget_control(const GMorphism& f, const ControlSpace& e, const FundamentalGroupData& data);

/// Complex of geometric modules with geometric boundaries c_n: C^n -> C^{n-1}.
class GComplex {
 public:
  GComplex(Ring ring, std::vector<BasedModule> modules);

  const Ring& ring() const noexcept { return ring_; }
  int top() const noexcept { return static_cast<int>(modules_.size()) - 1; }
  const std::vector<BasedModule>& modules() const noexcept { return modules_; }
  BasedModule module(int n) const;
  GMorphism boundary(int n) const;
  void set_boundary(int n, GMorphism c);

 private:
  Ring ring_;
  std::vector<BasedModule> modules_;
  std::vector<GMorphism> boundary_;
};

/// Degree-indexed geometric maps (contractions map C^n -> C^{n+1}, chain
/// maps C^n -> D^n). Missing degrees are zero.
using GMaps = std::map<int, GMorphism>;
/// Witness homotopies by degree.
using GWitnesses = std::map<int, GHomotopy>;

struct SimplicialInput {
  std::map<std::string, std::vector<double>> coords;
  std::vector<std::vector<std::string>> simplices;
};

struct CellularChains {
  ReferenceMap space;
  GComplex complex;
  /// Nullhomotopy of the boundary squared, per degree.
  GWitnesses nullhomotopy;
  Report report;
};

/// Barycentric geometric cellular chains. Simplices are closed under faces;
/// bases are labelled "[v0,v1,...]" with sorted vertices. NotAComplex.
CellularChains cellular_chains(const SimplicialInput& k, double eps);

/// Chain notions up to homotopy, with identities allowed to fail on basis
/// elements near the metric frontier. Missing witnesses are read as constant
/// homotopies; MissingWitness when that reading fails the clause.
Report validate_controlled_complex(const ReferenceMap& rm, const GComplex& c, double eps,
                                   const GWitnesses& square = {});
Report validate_controlled_chain_map(const ReferenceMap& rm, const GComplex& c, const GComplex& d,
                                     const GMaps& f, double eps, const GWitnesses& witnesses = {});
Report validate_controlled_contraction(const ReferenceMap& rm, const GComplex& c, const GMaps& xi,
                                       double eps, const GWitnesses& witnesses = {});
Report validate_controlled_isomorphism(const ReferenceMap& rm, const GMorphism& f,
                                       const GMorphism& f_inverse, double eps,
                                       const GHomotopy* h_source = nullptr,
                                       const GHomotopy* h_target = nullptr);

/// Controlled base function: at most one path per source element, unit
/// coefficients in U, distinct ends, radius < eps, and a path from every
/// source element outside Fr^eps X. NotDiagonal, CoefficientOutsideU, RadiusExceeded.
BaseFunction is_U_diagonal(const ReferenceMap& rm, const GMorphism& f, UnitKind u, double eps);

struct GTriangular {
  GMorphism diagonal;
  GMorphism increasing;
};

/// Diagonal part: the unique path from each source element to the minimum of
/// its targets. NotTriangular.
GTriangular decompose_triangular(const GMorphism& f, const Poset& target_order);

/// d^-1 Σ (-u d^-1)^i. The order must be eps-bounded at the target
/// locations. NotEpsilonBounded, DiagonalNotInvertible, NotTriangular.
GMorphism controlled_triangular_inverse(const ReferenceMap& rm, const GMorphism& f,
                                        const Poset& target_order, double eps);

/// (paths starting over Y, the other paths).
std::pair<GMorphism, GMorphism> split_by_support(const ReferenceMap& rm, const GMorphism& f,
                                                 const PointSet& y);

struct UnipotentFactors {
  GMorphism d1;
  GMorphism d2;
};

/// d = 1 + u = d2 ∘ d1 with d1 = 1 + (paths of u lying over X - Y), so d1 is
/// the identity on basis elements over Y, and d2 = d ∘ d1^-1 is the identity
/// on basis elements outside Y^{3 eps}. NotEpsilonBounded, NotTriangular.
UnipotentFactors factor_unipotent(const ReferenceMap& rm, const GMorphism& d,
                                  const Poset& order, const PointSet& y, double eps);

}  // namespace ctrlk
