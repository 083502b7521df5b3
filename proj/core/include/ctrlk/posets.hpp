#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "ctrlk/control.hpp"

namespace ctrlk {

using Relation = std::pair<std::string, std::string>;

/// Finite partial order stored with its transitive closure.
class Poset {
 public:
  Poset() = default;

  const std::vector<std::string>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool contains(const std::string& e) const { return index_.count(e) > 0; }
  /// Throws UnknownLabel.
  std::size_t index(const std::string& e) const;
  bool less(std::size_t a, std::size_t b) const { return above_[a][b]; }
  bool less(const std::string& a, const std::string& b) const;
  bool comparable(const std::string& a, const std::string& b) const {
    return less(a, b) || less(b, a);
  }
  /// Hasse diagram, in element order.
  std::vector<Relation> covers() const;
  /// Every pair a < b of the closure, in element order.
  std::vector<Relation> relations() const;
  /// Induced order on a subset (kept in this poset's element order).
  Poset restrict_to(const std::vector<std::string>& subset) const;

  friend bool operator==(const Poset& a, const Poset& b);

 private:
  friend Poset close_relations(std::vector<std::string>, const std::vector<Relation>&, ErrorKind);
  std::vector<std::string> elements_;
  std::map<std::string, std::size_t> index_;
  std::vector<boost::dynamic_bitset<>> above_;
};

/// Transitive closure of the covers; CycleDetected with a witness cycle.
Poset validate_poset(std::vector<std::string> elements, const std::vector<Relation>& covers);
Poset antichain(std::vector<std::string> elements);
/// Minimal order satisfying the constraints; NoOrderExists with a witness cycle.
Poset find_common_order(std::vector<std::string> elements, const std::vector<Relation>& constraints);
/// Shared implementation: closure of the relations, `on_cycle` names the error.
Poset close_relations(std::vector<std::string> elements, const std::vector<Relation>& rels,
                      ErrorKind on_cycle);

struct BoundednessReport {
  std::map<std::string, std::size_t> max_chain_length;
  bool epsilon_bounded = true;
  std::optional<std::string> violating_element;
  /// Largest distance from an element to something above it.
  double chain_radius = 0;
};

/// `loc` sends each element to a point of X.
BoundednessReport is_epsilon_bounded(const Poset& p, const std::map<std::string, std::string>& loc,
                                     double eps, const ControlSpace& x);

/// Order with (C_m ⊥ C_{m-1}) < ... < (C_1 ⊥ C_0) < C_0 for a nested chain
/// C_0 ⊂ C_1 ⊂ ... ⊂ C_m. Elements are listed in `order` (default: sorted).
Poset image_partial_order(const std::vector<PointSet>& chain,
                          const std::vector<std::string>& order = {});

/// Placement of basis elements in a control space, for metric clauses.
struct Placement {
  const ControlSpace* space = nullptr;
  std::map<std::string, std::string> loc;
  double eps = 0;
};

/// Image data for one earlier vertex j: im(C_j) inside the C part and
/// im(SC_j) inside the SC part.
struct ImagePair {
  PointSet c_image;
  PointSet sc_image;
};

/// Union of the two orders plus cross pairs t < s (t in SC, s in C) when the
/// image condition holds and, with a placement, d(s, t) < 5 eps.
Poset shuffle_orders(const Poset& pc, const Poset& psc, const std::vector<ImagePair>& images,
                     const std::optional<Placement>& placement = std::nullopt);

}  // namespace ctrlk
