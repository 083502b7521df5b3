#include "ctrlk/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace ctrlk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

}  // namespace

struct ControlSpace::Impl {
  bool graph = true;
  std::vector<std::string> points;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<double>> dist;
  std::vector<Edge> edges;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::set<std::string> self_loops;
  std::map<std::string, std::vector<double>> coords;
  std::vector<FrontierPoint> frontier;
};

namespace {

void index_points(ControlSpace::Impl& impl) {
  for (std::size_t i = 0; i < impl.points.size(); ++i) {
    if (!impl.index.emplace(impl.points[i], i).second)
      throw Error(ErrorKind::InvalidSpace, "duplicate point " + impl.points[i]);
  }
}

void check_metric(const ControlSpace::Impl& impl) {
  const std::size_t n = impl.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(impl.dist[i][i]) > kTol)
      throw Error(ErrorKind::InvalidSpace, "d(x,x) != 0 at " + impl.points[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(impl.dist[i][j] - impl.dist[j][i]) > kTol)
        throw Error(ErrorKind::InvalidSpace,
                    "asymmetric distance " + impl.points[i] + "," + impl.points[j]);
      if (i != j && impl.dist[i][j] <= 0)
        throw Error(ErrorKind::InvalidSpace,
                    "distinct points at distance 0: " + impl.points[i] + "," + impl.points[j]);
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (impl.dist[i][j] > impl.dist[i][k] + impl.dist[k][j] + kTol)
          throw Error(ErrorKind::InvalidSpace, "triangle inequality fails at " + impl.points[i] +
                                                   "," + impl.points[k] + "," + impl.points[j]);
}

void check_frontier(const ControlSpace::Impl& impl) {
  std::set<std::string> ids;
  for (const auto& f : impl.frontier) {
    if (impl.index.count(f.id) || !ids.insert(f.id).second)
      throw Error(ErrorKind::InvalidSpace, "frontier id clashes: " + f.id);
    for (const auto& p : impl.points) {
      auto it = f.dist.find(p);
      if (it == f.dist.end() || !(it->second > 0))
        throw Error(ErrorKind::InvalidSpace, "frontier " + f.id + " lacks distance to " + p);
    }
    for (const auto& [p, w] : f.attach) {
      if (!impl.index.count(p)) throw Error(ErrorKind::UnknownPoint, p);
      if (!(w > 0)) throw Error(ErrorKind::InvalidSpace, "nonpositive attach weight at " + f.id);
    }
  }
}

}  // namespace

ControlSpace ControlSpace::graph(std::vector<std::string> points, std::vector<Edge> edges,
                                 std::vector<FrontierPoint> frontier) {
  auto impl = std::make_shared<Impl>();
  impl->graph = true;
  impl->points = std::move(points);
  index_points(*impl);
  const std::size_t n = impl->points.size();
  impl->adj.assign(n, {});
  impl->dist.assign(n, std::vector<double>(n, kInf));
  for (const auto& e : edges) {
    auto ia = impl->index.find(e.a);
    auto ib = impl->index.find(e.b);
    if (ia == impl->index.end()) throw Error(ErrorKind::UnknownPoint, e.a);
    if (ib == impl->index.end()) throw Error(ErrorKind::UnknownPoint, e.b);
    if (!(e.weight > 0) || !std::isfinite(e.weight))
      throw Error(ErrorKind::InvalidSpace, "edge weight must be positive: " + e.a + "-" + e.b);
    if (ia->second == ib->second) {
      impl->self_loops.insert(e.a);
      continue;
    }
    impl->adj[ia->second].emplace_back(ib->second, e.weight);
    impl->adj[ib->second].emplace_back(ia->second, e.weight);
  }
  impl->edges = std::move(edges);
  // Dijkstra from every vertex.
  for (std::size_t s = 0; s < n; ++s) {
    auto& d = impl->dist[s];
    d[s] = 0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > d[v]) continue;
      for (auto [w, len] : impl->adj[v])
        if (dv + len < d[w]) {
          d[w] = dv + len;
          pq.emplace(d[w], w);
        }
    }
    for (std::size_t t = 0; t < n; ++t)
      if (!std::isfinite(d[t]))
        throw Error(ErrorKind::InvalidSpace,
                    "graph is disconnected between " + impl->points[s] + " and " + impl->points[t]);
  }
  impl->frontier = std::move(frontier);
  check_frontier(*impl);
  return ControlSpace(std::move(impl));
}

ControlSpace ControlSpace::euclidean(std::vector<std::string> points,
                                     std::map<std::string, std::vector<double>> coords,
                                     std::vector<FrontierPoint> frontier) {
  auto impl = std::make_shared<Impl>();
  impl->graph = false;
  impl->points = std::move(points);
  index_points(*impl);
  const std::size_t n = impl->points.size();
  std::size_t dim = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = coords.find(impl->points[i]);
    if (it == coords.end())
      throw Error(ErrorKind::InvalidSpace, "missing coordinates for " + impl->points[i]);
    if (i == 0) dim = it->second.size();
    if (it->second.size() != dim)
      throw Error(ErrorKind::InvalidSpace, "coordinate dimension differs at " + impl->points[i]);
  }
  for (const auto& [p, c] : coords)
    if (!impl->index.count(p)) throw Error(ErrorKind::UnknownPoint, p);
  impl->dist.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = coords[impl->points[i]];
      const auto& b = coords[impl->points[j]];
      double s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      impl->dist[i][j] = std::sqrt(s);
    }
  impl->coords = std::move(coords);
  impl->adj.assign(n, {});
  check_metric(*impl);
  impl->frontier = std::move(frontier);
  check_frontier(*impl);
  return ControlSpace(std::move(impl));
}

bool ControlSpace::is_graph() const noexcept { return impl_->graph; }
const std::vector<std::string>& ControlSpace::points() const noexcept { return impl_->points; }
std::size_t ControlSpace::size() const noexcept { return impl_->points.size(); }
bool ControlSpace::contains(const std::string& p) const { return impl_->index.count(p) > 0; }

std::size_t ControlSpace::index(const std::string& p) const {
  auto it = impl_->index.find(p);
  if (it == impl_->index.end()) throw Error(ErrorKind::UnknownPoint, p);
  return it->second;
}

double ControlSpace::distance(std::size_t a, std::size_t b) const { return impl_->dist[a][b]; }
double ControlSpace::distance(const std::string& a, const std::string& b) const {
  return impl_->dist[index(a)][index(b)];
}

const std::vector<FrontierPoint>& ControlSpace::frontier() const noexcept {
  return impl_->frontier;
}
const std::vector<Edge>& ControlSpace::edges() const noexcept { return impl_->edges; }
const std::map<std::string, std::vector<double>>& ControlSpace::coords() const noexcept {
  return impl_->coords;
}

std::optional<double> ControlSpace::edge_weight(std::size_t a, std::size_t b) const {
  std::optional<double> best;
  for (auto [w, len] : impl_->adj[a])
    if (w == b && (!best || len < *best)) best = len;
  return best;
}

bool ControlSpace::has_self_loop(const std::string& p) const {
  return impl_->self_loops.count(p) > 0;
}

const std::vector<std::pair<std::size_t, double>>& ControlSpace::neighbors(std::size_t i) const {
  return impl_->adj[i];
}

PointSet ControlSpace::boundary_of(const PointSet& u) const {
  PointSet out;
  for (const auto& p : u) index(p);
  if (!impl_->graph) {
    for (const auto& p : impl_->points)
      if (!u.count(p)) out.insert(p);
    return out;
  }
  for (const auto& p : u)
    for (auto [w, len] : impl_->adj[index(p)])
      if (!u.count(impl_->points[w])) out.insert(impl_->points[w]);
  return out;
}

namespace {

// Subspace with ambient distances on the listed points.
std::shared_ptr<ControlSpace::Impl> restricted(const ControlSpace::Impl& src, const PointSet& keep) {
  auto impl = std::make_shared<ControlSpace::Impl>();
  impl->graph = src.graph;
  for (const auto& p : src.points)
    if (keep.count(p)) impl->points.push_back(p);
  for (std::size_t i = 0; i < impl->points.size(); ++i) impl->index.emplace(impl->points[i], i);
  const std::size_t n = impl->points.size();
  impl->dist.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      impl->dist[i][j] = src.dist[src.index.at(impl->points[i])][src.index.at(impl->points[j])];
  impl->adj.assign(n, {});
  for (const auto& e : src.edges) {
    if (!keep.count(e.a) || !keep.count(e.b)) continue;
    impl->edges.push_back(e);
    if (e.a == e.b) {
      impl->self_loops.insert(e.a);
      continue;
    }
    const std::size_t a = impl->index.at(e.a);
    const std::size_t b = impl->index.at(e.b);
    impl->adj[a].emplace_back(b, e.weight);
    impl->adj[b].emplace_back(a, e.weight);
  }
  for (const auto& [p, c] : src.coords)
    if (keep.count(p)) impl->coords.emplace(p, c);
  return impl;
}

}  // namespace

ControlSpace ControlSpace::subspace(const PointSet& u) const {
  const PointSet bd = boundary_of(u);
  auto impl = restricted(*impl_, u);
  for (const auto& f : impl_->frontier) {
    FrontierPoint g{f.id, {}, {}};
    for (const auto& p : u) g.dist[p] = f.dist.at(p);
    for (const auto& [p, w] : f.attach)
      if (u.count(p)) g.attach[p] = w;
    impl->frontier.push_back(std::move(g));
  }
  for (const auto& b : bd) {
    FrontierPoint g{b, {}, {}};
    const std::size_t ib = index(b);
    for (const auto& p : u) g.dist[p] = impl_->dist[ib][index(p)];
    if (impl_->graph) {
      for (auto [w, len] : impl_->adj[ib]) {
        const auto& q = impl_->points[w];
        if (!u.count(q)) continue;
        auto it = g.attach.find(q);
        if (it == g.attach.end() || len < it->second) g.attach[q] = len;
      }
    }
    impl->frontier.push_back(std::move(g));
  }
  return ControlSpace(std::move(impl));
}

ControlSpace ControlSpace::closure_space(const PointSet& u) const {
  PointSet keep = u;
  for (const auto& b : boundary_of(u)) keep.insert(b);
  return ControlSpace(restricted(*impl_, keep));
}

double path_radius(const Samples& samples, const ControlSpace& x) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "empty path");
  std::vector<std::size_t> idx;
  idx.reserve(samples.size());
  for (const auto& s : samples) idx.push_back(x.index(s));
  double r = 0;
  std::vector<std::size_t> uniq = idx;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (std::size_t j = i + 1; j < uniq.size(); ++j) r = std::max(r, x.distance(uniq[i], uniq[j]));
  if (x.is_graph()) {
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (idx[k] == idx[k - 1]) continue;
      auto w = x.edge_weight(idx[k - 1], idx[k]);
      if (!w)
        throw Error(ErrorKind::InvalidInput,
                    "consecutive samples not adjacent: " + samples[k - 1] + "," + samples[k]);
      r = std::max(r, *w);
    }
  }
  return r;
}

namespace {

// Search state for graph reachability: a connected set of vertices whose
// pairwise distances (and distances to an optional ideal anchor) stay below
// eps, joined by edges lighter than eps. Any such set is the sample set of a
// walk of radius < eps, and conversely.
class GraphReach {
 public:
  GraphReach(const ControlSpace& x, double eps) : x_(x), eps_(eps), n_(x.size()) {}

  // Vertices reachable from `start` by an admissible walk. `anchor_dist`
  // bounds every visited vertex when a virtual start sample is present.
  std::vector<bool> from_vertex(std::size_t start, const std::vector<double>* anchor_dist) {
    std::vector<bool> reached(n_, false);
    reached[start] = true;
    // Every admissible set containing both start and z lies in the pool of
    // vertices close to both, so each target is decided separately.
    for (std::size_t z = 0; z < n_; ++z) {
      if (reached[z]) continue;
      if (x_.distance(start, z) >= eps_) continue;
      if (anchor_dist && (*anchor_dist)[z] >= eps_) continue;
      if (connect(start, z, anchor_dist, reached)) reached[z] = true;
    }
    return reached;
  }

 private:
  bool compatible(std::size_t v, std::size_t z, std::size_t start,
                  const std::vector<double>* anchor_dist) const {
    if (x_.distance(v, z) >= eps_ || x_.distance(v, start) >= eps_) return false;
    if (anchor_dist && (*anchor_dist)[v] >= eps_) return false;
    return true;
  }

  bool connect(std::size_t start, std::size_t z, const std::vector<double>* anchor_dist,
               std::vector<bool>& reached) {
    std::vector<std::size_t> pool;
    std::vector<int> slot(n_, -1);
    for (std::size_t v = 0; v < n_; ++v)
      if (v == start || v == z || compatible(v, z, start, anchor_dist)) {
        slot[v] = static_cast<int>(pool.size());
        pool.push_back(v);
      }
    const std::size_t m = pool.size();
    using Mask = std::vector<bool>;
    std::set<Mask> seen;
    std::vector<Mask> stack;
    Mask init(m, false);
    init[slot[start]] = true;
    stack.push_back(init);
    seen.insert(init);
    while (!stack.empty()) {
      Mask cur = std::move(stack.back());
      stack.pop_back();
      for (std::size_t a = 0; a < m; ++a) {
        if (!cur[a]) continue;
        for (auto [w, len] : x_.neighbors(pool[a])) {
          if (len >= eps_ || slot[w] < 0 || cur[slot[w]]) continue;
          bool ok = true;
          for (std::size_t b = 0; b < m && ok; ++b)
            if (cur[b] && x_.distance(pool[b], w) >= eps_) ok = false;
          if (!ok) continue;
          if (w == z) {
            for (std::size_t b = 0; b < m; ++b)
              if (cur[b]) reached[pool[b]] = true;
            return true;
          }
          Mask next = cur;
          next[slot[w]] = true;
          if (seen.insert(next).second) stack.push_back(std::move(next));
        }
      }
    }
    return false;
  }

  const ControlSpace& x_;
  double eps_;
  std::size_t n_;
};

}  // namespace

PointSet enlarge(const ControlSpace& x, const PointSet& y, double eps) {
  for (const auto& p : y) x.index(p);
  if (eps <= 0) return y;
  PointSet out = y;
  if (!x.is_graph()) {
    for (const auto& p : x.points())
      for (const auto& q : y)
        if (x.distance(p, q) < eps) {
          out.insert(p);
          break;
        }
    return out;
  }
  GraphReach reach(x, eps);
  for (const auto& q : y) {
    const auto r = reach.from_vertex(x.index(q), nullptr);
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i]) out.insert(x.points()[i]);
  }
  return out;
}

PointSet reduce(const ControlSpace& x, const PointSet& y, double eps) {
  for (const auto& p : y) x.index(p);
  const PointSet complement = set_difference(x.all(), y);
  return set_difference(x.all(), enlarge(x, complement, eps));
}

PointSet frontier_enlargement(const ControlSpace& x, double eps) {
  PointSet out;
  if (eps <= 0) return out;
  GraphReach reach(x, eps);
  for (const auto& f : x.frontier()) {
    std::vector<double> anchor(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) anchor[i] = f.dist.at(x.points()[i]);
    if (!x.is_graph()) {
      for (std::size_t i = 0; i < x.size(); ++i)
        if (anchor[i] < eps) out.insert(x.points()[i]);
      continue;
    }
    // Entry vertices: attached with a light edge, or any close vertex when
    // the ideal point carries no attachment data.
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (anchor[i] >= eps) continue;
      const auto& p = x.points()[i];
      if (!f.attach.empty()) {
        auto it = f.attach.find(p);
        if (it == f.attach.end() || it->second >= eps) continue;
      }
      const auto r = reach.from_vertex(i, &anchor);
      for (std::size_t j = 0; j < r.size(); ++j)
        if (r[j]) out.insert(x.points()[j]);
    }
  }
  return out;
}

Report check_excision(const ControlSpace& x, const PointSet& u, double eps) {
  Report report;
  for (const auto& p : u) x.index(p);
  const PointSet left = set_intersection(enlarge(x, set_difference(x.all(), u), eps), u);
  const ControlSpace closure = x.closure_space(u);
  const PointSet rim = x.boundary_of(u);
  const PointSet right = set_intersection(enlarge(closure, rim, eps), u);
  std::string witness;
  for (const auto& p : left)
    if (!right.count(p)) witness += "left-only " + p + ";";
  for (const auto& p : right)
    if (!left.count(p)) witness += "right-only " + p + ";";
  report.add("excision", left == right, witness);
  report.metrics["left_size"] = static_cast<double>(left.size());
  report.metrics["right_size"] = static_cast<double>(right.size());
  return report;
}

PointSet set_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

PointSet set_intersection(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace ctrlk
