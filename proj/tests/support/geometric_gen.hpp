#pragma once

#include <string>
#include <vector>

#include "ctrlk/geometric.hpp"
#include "generators.hpp"

namespace ctrlk::gen {

/// Path graph p0 - p1 - ... with unit weights; optionally an ideal point
/// "inf" attached to the last vertex.
ControlSpace line(int n, bool frontier_at_end = false);
/// w x h grid with unit weights, points "g<i>_<j>".
ControlSpace grid(int w, int h);

/// Connected weighted graph on points "x0".."x<n-1>": a random spanning tree
/// plus `extra` random edges, integer weights in [1, 3].
ControlSpace random_graph(Rng& rng, int n, int extra);
/// Random subset with each point kept with probability p.
PointSet random_subset(const ControlSpace& x, Rng& rng, double p = 0.5);

/// Shortest walk (by hops) between two points, optionally with one detour
/// "v n v" to a random neighbour.
Samples walk(const ControlSpace& x, const std::string& from, const std::string& to, Rng& rng,
             double detour = 0.0);

/// Homotopy moving one interior sample per stage to a point next to both
/// of its neighbours (graph model).
GHomotopy random_homotopy(const ControlSpace& x, const GMorphism& f, Rng& rng, int stages);
/// One basis element "<prefix><point>" at each point.
BasedModule over_points(const Ring& ring, const std::string& prefix, const ControlSpace& x);

/// Random paths between basis elements at most `hops` apart.
GMorphism gmorphism(const Ring& ring, Rng& rng, const ReferenceMap& rm, const BasedModule& s,
                    const BasedModule& t, int hops, double density = 0.4, double detour = 0.2);

/// eps-isomorphism on a line with a frontier point: diagonal paths of at most
/// one edge with unit coefficients, dropped at random near the frontier.
struct GIsoInstance {
  ReferenceMap rm;
  double eps;
  GMorphism f;
  GMorphism f_inverse;
  GHomotopy h_source;
  GHomotopy h_target;
};
GIsoInstance iso(const Ring& ring, Rng& rng, int n);

/// f = d + u on a line of n points with an order made of blocks of three
/// consecutive target elements (eps-bounded for eps = 2.5).
struct GTriangularInstance {
  ReferenceMap rm;
  double eps;
  Poset order;
  GMorphism f;
};
GTriangularInstance triangular_instance(const Ring& ring, Rng& rng, int n, bool unipotent);
/// Same on any space whose points, taken three at a time in order, are
/// consecutive along edges (line(n), grid(w, 3)).
GTriangularInstance triangular_instance(const Ring& ring, Rng& rng, const ControlSpace& x, bool unipotent);

}  // namespace ctrlk::gen
