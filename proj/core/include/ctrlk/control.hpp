#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ctrlk/error.hpp"
#include "ctrlk/report.hpp"

namespace ctrlk {

using PointSet = std::set<std::string>;
using Samples = std::vector<std::string>;

/// Ideal point of the completion. `attach` lists the points joined to it by
/// an edge (graph model) together with the edge weight.
struct FrontierPoint {
  std::string id;
  std::map<std::string, double> dist;
  std::map<std::string, double> attach;
};

struct Edge {
  std::string a;
  std::string b;
  double weight = 1.0;
};

/// Finite metric model: either shortest-path distances of a weighted graph
/// or Euclidean coordinates. Subspaces keep the ambient distances.
class ControlSpace {
 public:
  static ControlSpace graph(std::vector<std::string> points, std::vector<Edge> edges,
                            std::vector<FrontierPoint> frontier = {});
  static ControlSpace euclidean(std::vector<std::string> points,
                                std::map<std::string, std::vector<double>> coords,
                                std::vector<FrontierPoint> frontier = {});

  bool is_graph() const noexcept;
  const std::vector<std::string>& points() const noexcept;
  std::size_t size() const noexcept;
  bool contains(const std::string& p) const;
  /// Throws UnknownPoint.
  std::size_t index(const std::string& p) const;
  double distance(std::size_t a, std::size_t b) const;
  double distance(const std::string& a, const std::string& b) const;

  const std::vector<FrontierPoint>& frontier() const noexcept;
  const std::vector<Edge>& edges() const noexcept;
  const std::map<std::string, std::vector<double>>& coords() const noexcept;
  /// Lightest edge joining a and b (graph model).
  std::optional<double> edge_weight(std::size_t a, std::size_t b) const;
  bool has_self_loop(const std::string& p) const;
  const std::vector<std::pair<std::size_t, double>>& neighbors(std::size_t i) const;

  /// Points of X outside U joined by an edge to U (graph model); for the
  /// Euclidean model every point of X outside U.
  PointSet boundary_of(const PointSet& u) const;
  /// U with the restricted metric. Its frontier is the frontier of X
  /// together with the boundary points of U, declared as ideal points.
  ControlSpace subspace(const PointSet& u) const;
  /// Closure of U: U plus its boundary, as a subspace without new frontier.
  ControlSpace closure_space(const PointSet& u) const;

  PointSet all() const { return PointSet(points().begin(), points().end()); }

  struct Impl;

 private:
  explicit ControlSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Diameter of the samples; the graph model also folds in the weights of
/// traversed edges. Consecutive graph samples must be equal or adjacent.
double path_radius(const Samples& samples, const ControlSpace& x);

/// Y^eps: points reached from Y by a sampled path of radius < eps.
PointSet enlarge(const ControlSpace& x, const PointSet& y, double eps);
/// Y^{-eps} = X - (X - Y)^eps.
PointSet reduce(const ControlSpace& x, const PointSet& y, double eps);
/// Fr^eps X: points reached from a declared ideal point.
PointSet frontier_enlargement(const ControlSpace& x, double eps);
/// Compares (X-U)^eps ∩ U (paths in X) with (Ū-U)^eps ∩ U (paths in Ū).
Report check_excision(const ControlSpace& x, const PointSet& u, double eps);

PointSet set_difference(const PointSet& a, const PointSet& b);
PointSet set_intersection(const PointSet& a, const PointSet& b);

}  // namespace ctrlk
