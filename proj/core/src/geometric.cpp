#include "ctrlk/geometric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <numeric>
#include <sstream>

namespace ctrlk {

namespace {

std::string join(const Samples& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + s[i];
  return out;
}

std::string describe(const PathKey& k) {
  return std::get<0>(k) + "->" + std::get<1>(k) + " via [" + join(std::get<2>(k)) + "]";
}

void require_same(const BasedModule& a, const BasedModule& b, const char* what) {
  if (a != b) throw Error(ErrorKind::ModuleMismatch, what);
}

Samples collapse(const Samples& s, const ControlSpace& e) {
  Samples out;
  for (const auto& x : s)
    if (out.empty() || out.back() != x || e.has_self_loop(x)) out.push_back(x);
  return out;
}

// Run-length form of a sample word: (sample, first index, one past last).
std::vector<std::tuple<std::string, std::size_t, std::size_t>> runs(const Samples& s) {
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!out.empty() && std::get<0>(out.back()) == s[i])
      std::get<2>(out.back()) = i + 1;
    else
      out.emplace_back(s[i], i, i + 1);
  }
  return out;
}

std::vector<std::string> over(const ReferenceMap& rm, const BasedModule& m, const PointSet& y) {
  std::vector<std::string> keep;
  for (const auto& b : m.basis())
    if (rm.over(m.location(b), y)) keep.push_back(b);
  return keep;
}

bool lies_over(const ReferenceMap& rm, const Samples& via, const PointSet& y) {
  return std::all_of(via.begin(), via.end(), [&](const std::string& s) { return rm.over(s, y); });
}

// Basis elements of m whose location projects outside the given set.
std::vector<std::string> outside(const ReferenceMap& rm, const BasedModule& m, const PointSet& fr) {
  std::vector<std::string> out;
  for (const auto& b : m.basis())
    if (!rm.over(m.location(b), fr)) out.push_back(b);
  return out;
}

std::string describe_paths(const Ring& r, const std::vector<GPath>& ps) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < ps.size(); ++i)
    os << (i ? ", " : "") << r.to_string(ps[i].coeff) << "*[" << join(ps[i].via) << "]->" << ps[i].to;
  os << "}";
  return os.str();
}

bool same_paths(const std::vector<GPath>& a, const std::vector<GPath>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (key_of(a[i]) != key_of(b[i]) || a[i].coeff != b[i].coeff) return false;
  return true;
}

GMorphism power_sum(const GMorphism& t) {
  // Σ t^i for nilpotent t.
  GMorphism sum = GMorphism::identity(t.source());
  GMorphism pw = sum;
  for (std::size_t i = 0; i <= t.source().rank() + 1; ++i) {
    pw = gcompose(pw, t);
    if (pw.is_zero()) return sum;
    sum = gadd(sum, pw);
  }
  throw Error(ErrorKind::NotTriangular, "increasing part is not nilpotent");
}

}  // namespace

ReferenceMap::ReferenceMap(ControlSpace e, ControlSpace x, std::map<std::string, std::string> proj)
    : E(std::move(e)), X(std::move(x)), projection(std::move(proj)) {
  for (const auto& p : E.points()) {
    auto it = projection.find(p);
    if (it == projection.end()) throw Error(ErrorKind::UnknownPoint, "no projection for " + p);
    if (!X.contains(it->second)) throw Error(ErrorKind::UnknownPoint, it->second);
  }
  for (const auto& [k, v] : projection)
    if (!E.contains(k)) throw Error(ErrorKind::UnknownPoint, k);
}

ReferenceMap ReferenceMap::identity(const ControlSpace& x) {
  std::map<std::string, std::string> p;
  for (const auto& s : x.points()) p[s] = s;
  return ReferenceMap(x, x, std::move(p));
}

const std::string& ReferenceMap::project(const std::string& e) const {
  auto it = projection.find(e);
  if (it == projection.end()) throw Error(ErrorKind::UnknownPoint, e);
  return it->second;
}

Samples ReferenceMap::project(const Samples& path) const {
  Samples out;
  out.reserve(path.size());
  for (const auto& s : path) out.push_back(project(s));
  return out;
}

ReferenceMap ReferenceMap::restrict_to(const PointSet& u) const {
  PointSet eu;
  std::map<std::string, std::string> p;
  for (const auto& [k, v] : projection)
    if (u.count(v)) {
      eu.insert(k);
      p[k] = v;
    }
  return ReferenceMap(E.subspace(eu), X.subspace(u), std::move(p));
}

BasedModule grestrict(const ReferenceMap& rm, const BasedModule& m, const PointSet& y) {
  return submodule(m, over(rm, m, y));
}

GMorphism::GMorphism(BasedModule source, BasedModule target, std::vector<GPath> paths)
    : source_(std::move(source)), target_(std::move(target)) {
  if (source_.ring() != target_.ring()) throw Error(ErrorKind::RingMismatch, "geometric morphism");
  if (!source_.has_location() || !target_.has_location())
    throw Error(ErrorKind::InvalidInput, "geometric modules need locations");
  const Ring& r = source_.ring();
  for (const auto& p : paths) {
    if (p.via.empty()) throw Error(ErrorKind::InvalidInput, "empty path");
    if (!source_.contains(p.from)) throw Error(ErrorKind::UnknownLabel, p.from);
    if (!target_.contains(p.to)) throw Error(ErrorKind::UnknownLabel, p.to);
    if (p.via.front() != source_.location(p.from) || p.via.back() != target_.location(p.to))
      throw Error(ErrorKind::InvalidInput, "path ends off its basis elements: " + describe(key_of(p)));
  }
  std::sort(paths.begin(), paths.end(),
            [](const GPath& a, const GPath& b) { return key_of(a) < key_of(b); });
  for (auto& p : paths) {
    if (!paths_.empty() && key_of(paths_.back()) == key_of(p))
      paths_.back().coeff = r.add(paths_.back().coeff, p.coeff);
    else
      paths_.push_back(std::move(p));
  }
  paths_.erase(std::remove_if(paths_.begin(), paths_.end(),
                              [](const GPath& p) { return p.coeff.is_zero(); }),
               paths_.end());
}

GMorphism GMorphism::identity(const BasedModule& m) {
  std::vector<GPath> ps;
  for (const auto& b : m.basis()) ps.push_back({m.ring().one(), b, b, {m.location(b)}});
  return GMorphism(m, m, std::move(ps));
}

std::vector<GPath> GMorphism::paths_from(const std::string& x) const {
  std::vector<GPath> out;
  for (const auto& p : paths_)
    if (p.from == x) out.push_back(p);
  return out;
}

Morphism GMorphism::algebraic() const {
  Morphism m(source_, target_);
  for (const auto& p : paths_) m.add_to(target_.index(p.to), source_.index(p.from), p.coeff);
  return m;
}

bool operator==(const GMorphism& a, const GMorphism& b) {
  return a.source_ == b.source_ && a.target_ == b.target_ && same_paths(a.paths_, b.paths_);
}

double gradius(const ReferenceMap& rm, const Samples& via) {
  return path_radius(rm.project(via), rm.X);
}

double gradius(const ReferenceMap& rm, const GMorphism& f) {
  double r = 0;
  for (const auto& p : f.paths()) r = std::max(r, gradius(rm, p.via));
  return r;
}

GMorphism gcompose(const GMorphism& f, const GMorphism& g) {
  require_same(f.target(), g.source(), "gcompose: target(f) != source(g)");
  const Ring& r = f.ring();
  std::map<std::string, std::vector<const GPath*>> starts;
  for (const auto& q : g.paths()) starts[q.from].push_back(&q);
  std::vector<GPath> out;
  for (const auto& p : f.paths()) {
    auto it = starts.find(p.to);
    if (it == starts.end()) continue;
    for (const GPath* q : it->second) {
      Samples via = p.via;
      via.insert(via.end(), q->via.begin() + 1, q->via.end());
      out.push_back({r.mul(q->coeff, p.coeff), p.from, q->to, std::move(via)});
    }
  }
  return GMorphism(f.source(), g.target(), std::move(out));
}

GMorphism gadd(const GMorphism& f, const GMorphism& g) {
  require_same(f.source(), g.source(), "gadd: sources differ");
  require_same(f.target(), g.target(), "gadd: targets differ");
  std::vector<GPath> ps = f.paths();
  ps.insert(ps.end(), g.paths().begin(), g.paths().end());
  return GMorphism(f.source(), f.target(), std::move(ps));
}

GMorphism gneg(const GMorphism& f) {
  std::vector<GPath> ps = f.paths();
  for (auto& p : ps) p.coeff = f.ring().neg(p.coeff);
  return GMorphism(f.source(), f.target(), std::move(ps));
}

GMorphism gsub(const GMorphism& f, const GMorphism& g) { return gadd(f, gneg(g)); }

GMorphism grestrict(const ReferenceMap& rm, const GMorphism& f, const PointSet& y) {
  BasedModule s = grestrict(rm, f.source(), y);
  BasedModule t = grestrict(rm, f.target(), y);
  std::vector<GPath> ps;
  for (const auto& p : f.paths())
    if (lies_over(rm, p.via, y)) ps.push_back(p);
  return GMorphism(std::move(s), std::move(t), std::move(ps));
}

Samples reduce_backtracks(const Samples& via) {
  Samples st;
  for (const auto& s : via) {
    if (st.size() >= 2 && st[st.size() - 2] == s && st.back() != s)
      st.pop_back();
    else
      st.push_back(s);
  }
  return st;
}

GMorphism reduce_backtracks(const GMorphism& f) {
  std::vector<GPath> ps = f.paths();
  for (auto& p : ps) p.via = reduce_backtracks(p.via);
  return GMorphism(f.source(), f.target(), std::move(ps));
}

double gradius(const ReferenceMap& rm, const GHomotopy& h) {
  double r = 0;
  for (const auto& [k, stages] : h.tracks) {
    if (stages.empty()) throw Error(ErrorKind::TrackMismatch, "empty track " + describe(k));
    const std::size_t len = stages.front().size();
    for (const auto& s : stages)
      if (s.size() != len) throw Error(ErrorKind::TrackMismatch, "unequal stages " + describe(k));
    for (std::size_t i = 0; i < len; ++i) {
      PointSet pts;
      for (const auto& s : stages) pts.insert(rm.project(s[i]));
      for (auto a = pts.begin(); a != pts.end(); ++a)
        for (auto b = std::next(a); b != pts.end(); ++b) r = std::max(r, rm.X.distance(*a, *b));
    }
  }
  return r;
}

GMorphism apply_homotopy(const ReferenceMap& rm, const GMorphism& f, const GHomotopy& h) {
  if (h.tracks.size() != f.paths().size())
    throw Error(ErrorKind::TrackMismatch, "homotopy has " + std::to_string(h.tracks.size()) +
                                              " tracks for " + std::to_string(f.paths().size()) +
                                              " paths");
  std::vector<GPath> out;
  for (const auto& p : f.paths()) {
    auto it = h.tracks.find(key_of(p));
    if (it == h.tracks.end()) throw Error(ErrorKind::TrackMismatch, "no track for " + describe(key_of(p)));
    const auto& stages = it->second;
    if (stages.empty() || stages.front() != p.via)
      throw Error(ErrorKind::TrackMismatch, "track does not start at " + describe(key_of(p)));
    for (const auto& s : stages)
      if (s.size() != p.via.size() || s.front() != p.via.front() || s.back() != p.via.back())
        throw Error(ErrorKind::TrackMismatch, "stage moves length or ends: " + describe(key_of(p)));
    out.push_back({p.coeff, p.from, p.to, collapse(stages.back(), rm.E)});
  }
  return GMorphism(f.source(), f.target(), std::move(out));
}

GHomotopy reverse(const GHomotopy& h) {
  GHomotopy r;
  for (const auto& [k, stages] : h.tracks) {
    std::vector<Samples> rev(stages.rbegin(), stages.rend());
    r.tracks[{std::get<0>(k), std::get<1>(k), rev.front()}] = std::move(rev);
  }
  return r;
}

GHomotopy constant_homotopy(const GMorphism& f) {
  GHomotopy h;
  for (const auto& p : f.paths()) h.tracks[key_of(p)] = {p.via};
  return h;
}

GHomotopy backtrack_homotopy(const GMorphism& f) {
  GHomotopy h;
  for (const auto& p : f.paths()) {
    std::vector<Samples> stages{p.via};
    Samples cur = p.via;
    for (;;) {
      auto rs = runs(cur);
      bool moved = false;
      for (std::size_t k = 1; k + 1 < rs.size(); ++k) {
        if (std::get<0>(rs[k - 1]) != std::get<0>(rs[k + 1])) continue;
        for (std::size_t i = std::get<1>(rs[k]); i < std::get<2>(rs[k]); ++i)
          cur[i] = std::get<0>(rs[k - 1]);
        stages.push_back(cur);
        moved = true;
        break;
      }
      if (!moved) break;
    }
    h.tracks[key_of(p)] = std::move(stages);
  }
  return h;
}

GHomotopy grestrict(const ReferenceMap& rm, const GHomotopy& h, const GMorphism& start,
                    const PointSet& u) {
  GHomotopy out;
  for (const auto& p : start.paths()) {
    auto it = h.tracks.find(key_of(p));
    bool inside = it != h.tracks.end();
    if (inside)
      for (const auto& s : it->second)
        if (!lies_over(rm, s, u)) {
          inside = false;
          break;
        }
    out.tracks[key_of(p)] = inside ? it->second : std::vector<Samples>{p.via};
  }
  return out;
}

Morphism forget_control(const GMorphism& f, const ControlSpace& e, const FundamentalGroupData& data) {
  if (f.ring().kind() != RingKind::Integers)
    throw Error(ErrorKind::InvalidRing, "forget_control needs integer coefficients");
  if (!e.is_graph()) throw Error(ErrorKind::InvalidSpace, "forget_control needs a graph model");
  if (!e.contains(data.basepoint)) throw Error(ErrorKind::UnknownPoint, data.basepoint);

  auto unordered = [](const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  std::map<std::pair<std::string, std::string>, int> available;
  for (const auto& ed : e.edges()) ++available[unordered(ed.a, ed.b)];
  std::set<std::pair<std::string, std::string>> tree;
  std::vector<std::size_t> parent(e.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    return parent[v] == v ? v : parent[v] = find(parent[v]);
  };
  for (const auto& ed : data.tree) {
    auto key = unordered(ed.a, ed.b);
    if (available[key]-- <= 0)
      throw Error(ErrorKind::InvalidInput, "tree edge not in E: " + ed.a + "-" + ed.b);
    const std::size_t a = find(e.index(ed.a)), b = find(e.index(ed.b));
    if (a == b) throw Error(ErrorKind::Disconnected, "tree has a cycle through " + ed.a + "-" + ed.b);
    parent[a] = b;
    tree.insert(key);
  }
  for (const auto& p : e.points())
    if (find(e.index(p)) != find(e.index(data.basepoint)))
      throw Error(ErrorKind::Disconnected, "tree misses " + p);

  std::vector<std::pair<std::string, std::string>> loose;
  for (const auto& ed : e.edges()) {
    auto key = unordered(ed.a, ed.b);
    if (available[key] > 0 && !tree.count(key)) {
      --available[key];
      loose.emplace_back(ed.a, ed.b);
    }
  }

  Ring ring = data.ring ? *data.ring : Ring::laurent();
  std::map<std::pair<std::string, std::string>, Scalar> label;
  auto set_label = [&](const std::string& a, const std::string& b, const Scalar& g) {
    label[{a, b}] = g;
    if (a != b) label[{b, a}] = ring.invert_unit(g);
  };
  if (data.ring) {
    for (const auto& [a, b] : loose) {
      if (auto it = data.labels.find({a, b}); it != data.labels.end())
        set_label(a, b, ring.monomial(it->second, 1));
      else if (auto jt = data.labels.find({b, a}); jt != data.labels.end())
        set_label(b, a, ring.monomial(jt->second, 1));
      else
        throw Error(ErrorKind::InvalidInput, "no group element for edge " + a + "-" + b);
    }
  } else {
    if (loose.size() > 1)
      throw Error(ErrorKind::InvalidInput, "several non-tree edges need a group ring and labels");
    for (const auto& [a, b] : loose) set_label(a, b, ring.monomial(1, 1));
  }

  BasedModule s(ring, f.source().basis());
  BasedModule t(ring, f.target().basis());
  Morphism out(s, t);
  for (const auto& p : f.paths()) {
    Scalar g = ring.one();
    for (std::size_t i = 1; i < p.via.size(); ++i) {
      const auto& a = p.via[i - 1];
      const auto& b = p.via[i];
      if (a != b && tree.count(unordered(a, b))) continue;
      if (auto it = label.find({a, b}); it != label.end()) {
        g = ring.mul(it->second, g);
        continue;
      }
      if (a == b) continue;
      throw Error(ErrorKind::InvalidInput, "path leaves E at " + a + "-" + b);
    }
    Integer c = p.coeff.terms().front().second;
    out.add_to(t.index(p.to), s.index(p.from), ring.mul(ring.from_integer(c), g));
  }
  return out;
}

GComplex::GComplex(Ring ring, std::vector<BasedModule> modules)
    : ring_(std::move(ring)), modules_(std::move(modules)) {
  if (top() > 64) throw Error(ErrorKind::DegreeLimit, "degree " + std::to_string(top()));
  for (const auto& m : modules_)
    if (m.ring() != ring_) throw Error(ErrorKind::RingMismatch, "GComplex module");
  for (int n = 1; n <= top(); ++n) boundary_.emplace_back(modules_[n], modules_[n - 1]);
}

BasedModule GComplex::module(int n) const {
  if (n < 0 || n > top()) return BasedModule(ring_);
  return modules_[n];
}

GMorphism GComplex::boundary(int n) const {
  if (n < 1 || n > top()) return GMorphism(module(n), module(n - 1));
  return boundary_[n - 1];
}

void GComplex::set_boundary(int n, GMorphism c) {
  if (n < 1 || n > top()) throw Error(ErrorKind::ShapeMismatch, "boundary degree " + std::to_string(n));
  require_same(c.source(), modules_[n], "boundary source");
  require_same(c.target(), modules_[n - 1], "boundary target");
  boundary_[n - 1] = std::move(c);
}

CellularChains cellular_chains(const SimplicialInput& k, double eps) {
  const std::size_t dim = k.coords.empty() ? 0 : k.coords.begin()->second.size();
  for (const auto& [v, c] : k.coords)
    if (c.size() != dim || dim == 0) throw Error(ErrorKind::NotAComplex, "coordinates of " + v);

  std::set<std::vector<std::string>> cells;
  for (auto s : k.simplices) {
    if (s.empty()) throw Error(ErrorKind::NotAComplex, "empty simplex");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorKind::NotAComplex, "repeated vertex " + *std::adjacent_find(s.begin(), s.end()));
    for (const auto& v : s)
      if (!k.coords.count(v)) throw Error(ErrorKind::NotAComplex, "unknown vertex " + v);
    if (s.size() > 65) throw Error(ErrorKind::DegreeLimit, "simplex too large");
    const std::size_t n = s.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<std::string> face;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) face.push_back(s[i]);
      cells.insert(std::move(face));
    }
  }
  auto name = [](const std::vector<std::string>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i];
    return out + "]";
  };

  std::vector<std::string> pts;
  std::map<std::string, std::vector<double>> bary;
  std::vector<std::vector<std::vector<std::string>>> by_dim;
  Report report;
  double mesh = 0;
  std::string widest;
  for (const auto& s : cells) {
    std::vector<double> b(dim, 0.0);
    for (const auto& v : s)
      for (std::size_t i = 0; i < dim; ++i) b[i] += k.coords.at(v)[i] / s.size();
    pts.push_back(name(s));
    bary[name(s)] = std::move(b);
    if (by_dim.size() < s.size()) by_dim.resize(s.size());
    by_dim[s.size() - 1].push_back(s);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        double d = 0;
        for (std::size_t c = 0; c < dim; ++c) {
          const double t = k.coords.at(s[i])[c] - k.coords.at(s[j])[c];
          d += t * t;
        }
        d = std::sqrt(d);
        if (d > mesh) {
          mesh = d;
          widest = name(s);
        }
      }
  }
  std::optional<ControlSpace> space;
  try {
    space = ControlSpace::euclidean(pts, bary);
  } catch (const Error& err) {
    throw Error(ErrorKind::NotAComplex, "degenerate simplices: " + err.witness());
  }
  ReferenceMap rm = ReferenceMap::identity(*space);

  Ring z = Ring::integers();
  std::vector<BasedModule> mods;
  for (const auto& cs : by_dim) {
    std::vector<std::string> labels;
    std::map<std::string, std::string> loc;
    for (const auto& s : cs) {
      labels.push_back(name(s));
      loc[name(s)] = name(s);
    }
    mods.emplace_back(z, labels, loc);
  }
  GComplex cx(z, mods);
  for (int n = 1; n <= cx.top(); ++n) {
    std::vector<GPath> ps;
    for (const auto& s : by_dim[n]) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        std::vector<std::string> face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        ps.push_back({z.from_integer(i % 2 ? -1 : 1), name(s), name(face), {name(s), name(face)}});
      }
    }
    cx.set_boundary(n, GMorphism(mods[n], mods[n - 1], std::move(ps)));
  }

  double boundary_radius = 0, pairing_radius = 0;
  bool paired = true;
  std::string unpaired;
  GWitnesses null;
  for (int n = 1; n <= cx.top(); ++n) boundary_radius = std::max(boundary_radius, gradius(rm, cx.boundary(n)));
  for (int n = 2; n <= cx.top(); ++n) {
    GMorphism sq = gcompose(cx.boundary(n), cx.boundary(n - 1));
    std::map<std::pair<std::string, std::string>, std::vector<GPath>> groups;
    for (const auto& p : sq.paths()) groups[{p.from, p.to}].push_back(p);
    GHomotopy h;
    for (const auto& [ends, g] : groups) {
      if (g.size() != 2 || z.add(g[0].coeff, g[1].coeff) != z.zero()) {
        paired = false;
        if (unpaired.empty()) unpaired = ends.first + "->" + ends.second;
        for (const auto& p : g) h.tracks[key_of(p)] = {p.via};
        continue;
      }
      h.tracks[key_of(g[0])] = {g[0].via, g[1].via};
      h.tracks[key_of(g[1])] = {g[1].via};
      Samples both = g[0].via;
      both.insert(both.end(), g[1].via.begin(), g[1].via.end());
      PointSet uniq(both.begin(), both.end());
      for (auto a = uniq.begin(); a != uniq.end(); ++a)
        for (auto b = std::next(a); b != uniq.end(); ++b)
          pairing_radius = std::max(pairing_radius, space->distance(*a, *b));
    }
    null[n] = std::move(h);
  }
  double null_radius = 0;
  for (const auto& [n, h] : null) null_radius = std::max(null_radius, gradius(rm, h));

  report.add("mesh < eps", mesh < eps, mesh < eps ? "" : widest);
  report.add("boundary radius < eps", boundary_radius < eps);
  report.add("composite boundary paths pair off", paired, unpaired);
  report.add("pairing radius < 2 eps", pairing_radius < 2 * eps);
  report.metrics["mesh"] = mesh;
  report.metrics["boundary_radius"] = boundary_radius;
  report.metrics["pairing_radius"] = pairing_radius;
  report.metrics["nullhomotopy_radius"] = null_radius;
  report.metrics["cells"] = static_cast<double>(cells.size());
  return {rm, cx, null, report};
}

namespace {

// Applies the witness (constant when absent) and returns the end morphism.
// Throws MissingWitness if no witness is given and `holds` rejects f.
template <class Holds>
GMorphism witnessed(const ReferenceMap& rm, const GMorphism& f, const GWitnesses& w, int n,
                    double eps, Report& report, const std::string& what, Holds holds) {
  auto it = w.find(n);
  if (it == w.end()) {
    if (!holds(f).empty())
      throw Error(ErrorKind::MissingWitness, what + " in degree " + std::to_string(n));
    return f;
  }
  const double r = gradius(rm, it->second);
  report.add("witness radius < eps for " + what + " in degree " + std::to_string(n), r < eps,
             std::to_string(r));
  return apply_homotopy(rm, f, it->second);
}

std::function<std::string(const GMorphism&)> trivial_on(const ReferenceMap& rm, const PointSet& fr) {
  return [&rm, fr](const GMorphism& g) -> std::string {
    for (const auto& x : outside(rm, g.source(), fr)) {
      auto ps = g.paths_from(x);
      if (!ps.empty()) return x + " -> " + describe_paths(g.ring(), ps);
    }
    return {};
  };
}

std::function<std::string(const GMorphism&)> identity_on(const ReferenceMap& rm, const PointSet& fr) {
  return [&rm, fr](const GMorphism& g) -> std::string {
    for (const auto& x : outside(rm, g.source(), fr)) {
      auto ps = g.paths_from(x);
      std::vector<GPath> want{{g.ring().one(), x, x, {g.source().location(x)}}};
      if (!same_paths(ps, want)) return x + " -> " + describe_paths(g.ring(), ps);
    }
    return {};
  };
}

std::function<std::string(const GMorphism&)> agrees_with(const ReferenceMap& rm, const GMorphism& h,
                                                       const PointSet& fr) {
  return [&rm, h, fr](const GMorphism& g) -> std::string {
    for (const auto& x : outside(rm, g.source(), fr)) {
      auto a = g.paths_from(x);
      auto b = h.paths_from(x);
      if (!same_paths(a, b))
        return x + ": " + describe_paths(g.ring(), a) + " vs " + describe_paths(g.ring(), b);
    }
    return {};
  };
}

void radius_check(Report& r, const ReferenceMap& rm, const GMorphism& f, double eps,
                  const std::string& what) {
  const double x = gradius(rm, f);
  r.add("radius of " + what + " < eps", x < eps, std::to_string(x));
  auto& m = r.metrics["max_radius"];
  m = std::max(m, x);
}

GMorphism map_at(const GMaps& maps, int n, const BasedModule& s, const BasedModule& t) {
  auto it = maps.find(n);
  if (it == maps.end()) return GMorphism(s, t);
  require_same(it->second.source(), s, "map source");
  require_same(it->second.target(), t, "map target");
  return it->second;
}

}  // namespace

Report validate_controlled_complex(const ReferenceMap& rm, const GComplex& c, double eps,
                                   const GWitnesses& square) {
  Report r;
  r.metrics["max_radius"] = 0;
  for (int n = 1; n <= c.top(); ++n) radius_check(r, rm, c.boundary(n), eps, "c in degree " + std::to_string(n));
  const PointSet fr3 = frontier_enlargement(rm.X, 3 * eps);
  for (int n = 2; n <= c.top(); ++n) {
    auto holds = trivial_on(rm, fr3);
    GMorphism end = witnessed(rm, gcompose(c.boundary(n), c.boundary(n - 1)), square, n, eps, r,
                              "c^2", holds);
    const std::string bad = holds(end);
    r.add("c^2 trivial outside Fr^3eps in degree " + std::to_string(n), bad.empty(), bad);
  }
  return r;
}

Report validate_controlled_chain_map(const ReferenceMap& rm, const GComplex& c, const GComplex& d,
                                     const GMaps& f, double eps, const GWitnesses& witnesses) {
  Report r;
  r.metrics["max_radius"] = 0;
  const int top = std::max(c.top(), d.top());
  for (int n = 0; n <= top; ++n) {
    GMorphism fn = map_at(f, n, c.module(n), d.module(n));
    radius_check(r, rm, fn, eps, "f in degree " + std::to_string(n));
  }
  const PointSet fr1 = frontier_enlargement(rm.X, eps);
  for (int n = 1; n <= top; ++n) {
    GMorphism lhs = gcompose(map_at(f, n, c.module(n), d.module(n)), d.boundary(n));
    GMorphism rhs = gcompose(c.boundary(n), map_at(f, n - 1, c.module(n - 1), d.module(n - 1)));
    auto holds = agrees_with(rm, rhs, fr1);
    GMorphism end = witnessed(rm, lhs, witnesses, n, eps, r, "d f ~ f c", holds);
    const std::string bad = holds(end);
    r.add("d f agrees with f c outside Fr^eps in degree " + std::to_string(n), bad.empty(), bad);
  }
  return r;
}

Report validate_controlled_contraction(const ReferenceMap& rm, const GComplex& c, const GMaps& xi,
                                       double eps, const GWitnesses& witnesses) {
  Report r;
  r.metrics["max_radius"] = 0;
  for (int n = 0; n < c.top(); ++n)
    radius_check(r, rm, map_at(xi, n, c.module(n), c.module(n + 1)), eps,
                 "xi in degree " + std::to_string(n));
  const PointSet fr3 = frontier_enlargement(rm.X, 3 * eps);
  for (int n = 0; n <= c.top(); ++n) {
    GMorphism up = map_at(xi, n, c.module(n), c.module(n + 1));
    GMorphism down = map_at(xi, n - 1, c.module(n - 1), c.module(n));
    GMorphism s = gadd(gcompose(up, c.boundary(n + 1)), gcompose(c.boundary(n), down));
    auto holds = identity_on(rm, fr3);
    GMorphism end = witnessed(rm, s, witnesses, n, eps, r, "c xi + xi c", holds);
    const std::string bad = holds(end);
    r.add("c xi + xi c = 1 outside Fr^3eps in degree " + std::to_string(n), bad.empty(), bad);
  }
  return r;
}

Report validate_controlled_isomorphism(const ReferenceMap& rm, const GMorphism& f,
                                       const GMorphism& f_inverse, double eps,
                                       const GHomotopy* h_source, const GHomotopy* h_target) {
  Report r;
  r.metrics["max_radius"] = 0;
  radius_check(r, rm, f, eps, "f");
  radius_check(r, rm, f_inverse, eps, "f^-1");
  const PointSet fr3 = frontier_enlargement(rm.X, 3 * eps);
  auto side = [&](const GMorphism& s, const GHomotopy* h, int n, const std::string& what) {
    GWitnesses w;
    if (h) w[n] = *h;
    auto holds = identity_on(rm, fr3);
    GMorphism end = witnessed(rm, s, w, n, eps, r, what, holds);
    const std::string bad = holds(end);
    r.add(what + " = 1 outside Fr^3eps", bad.empty(), bad);
  };
  side(gcompose(f, f_inverse), h_source, 0, "f^-1 f");
  side(gcompose(f_inverse, f), h_target, 1, "f f^-1");
  return r;
}

BaseFunction is_U_diagonal(const ReferenceMap& rm, const GMorphism& f, UnitKind u, double eps) {
  BaseFunction base;
  std::set<std::string> hit;
  for (const auto& p : f.paths()) {
    if (base.count(p.from)) throw Error(ErrorKind::NotDiagonal, "two paths from " + p.from);
    if (!f.ring().in_unit_subgroup(p.coeff, u))
      throw Error(ErrorKind::CoefficientOutsideU, p.from + "->" + p.to + ": " + f.ring().to_string(p.coeff));
    if (!hit.insert(p.to).second) throw Error(ErrorKind::NotDiagonal, "two paths end at " + p.to);
    const double r = gradius(rm, p.via);
    if (!(r < eps)) throw Error(ErrorKind::RadiusExceeded, describe(key_of(p)) + " radius " + std::to_string(r));
    base[p.from] = p.to;
  }
  const PointSet fr = frontier_enlargement(rm.X, eps);
  for (const auto& x : outside(rm, f.source(), fr))
    if (!base.count(x)) throw Error(ErrorKind::NotDiagonal, "no path from " + x);
  return base;
}

GTriangular decompose_triangular(const GMorphism& f, const Poset& order) {
  std::vector<GPath> diag, inc;
  for (const auto& b : f.target().basis())
    if (!order.contains(b)) throw Error(ErrorKind::MissingCertificate, "order lacks " + b);
  for (const auto& x : f.source().basis()) {
    auto ps = f.paths_from(x);
    if (ps.empty()) continue;
    std::set<std::string> targets;
    for (const auto& p : ps) targets.insert(p.to);
    std::optional<std::string> least;
    for (const auto& t : targets) {
      bool below_all = true;
      for (const auto& o : targets)
        if (o != t && !order.less(t, o)) below_all = false;
      if (below_all) least = t;
    }
    if (!least) throw Error(ErrorKind::NotTriangular, "no least target for " + x);
    std::size_t on_diag = 0;
    for (auto& p : ps) {
      if (p.to == *least) {
        ++on_diag;
        diag.push_back(p);
      } else {
        inc.push_back(p);
      }
    }
    if (on_diag != 1) throw Error(ErrorKind::NotTriangular, "several diagonal paths from " + x);
  }
  return {GMorphism(f.source(), f.target(), std::move(diag)),
          GMorphism(f.source(), f.target(), std::move(inc))};
}

GMorphism controlled_triangular_inverse(const ReferenceMap& rm, const GMorphism& f,
                                        const Poset& order, double eps) {
  std::map<std::string, std::string> loc;
  for (const auto& b : f.target().basis()) loc[b] = rm.project(f.target().location(b));
  const Poset on_target = order.restrict_to(f.target().basis());
  if (on_target.size() != f.target().rank())
    throw Error(ErrorKind::MissingCertificate, "order does not cover the target basis");
  auto bounded = is_epsilon_bounded(on_target, loc, eps, rm.X);
  if (!bounded.epsilon_bounded)
    throw Error(ErrorKind::NotEpsilonBounded, bounded.violating_element.value_or(""));

  GTriangular t = decompose_triangular(f, on_target);
  if (t.diagonal.paths().size() != f.source().rank() || f.source().rank() != f.target().rank())
    throw Error(ErrorKind::DiagonalNotInvertible, "diagonal is not a bijection of bases");
  std::vector<GPath> rev;
  std::set<std::string> hit;
  for (const auto& p : t.diagonal.paths()) {
    if (!hit.insert(p.to).second) throw Error(ErrorKind::DiagonalNotInvertible, "two diagonal paths end at " + p.to);
    auto inv = f.ring().try_invert(p.coeff);
    if (!inv) throw Error(ErrorKind::DiagonalNotInvertible, p.from + "->" + p.to + ": " + f.ring().to_string(p.coeff));
    rev.push_back({*inv, p.to, p.from, Samples(p.via.rbegin(), p.via.rend())});
  }
  GMorphism dinv(f.target(), f.source(), std::move(rev));
  GMorphism step = gneg(gcompose(dinv, t.increasing));
  return gcompose(power_sum(step), dinv);
}

std::pair<GMorphism, GMorphism> split_by_support(const ReferenceMap& rm, const GMorphism& f,
                                                 const PointSet& y) {
  std::vector<GPath> in, out;
  for (const auto& p : f.paths()) (rm.over(p.via.front(), y) ? in : out).push_back(p);
  return {GMorphism(f.source(), f.target(), std::move(in)),
          GMorphism(f.source(), f.target(), std::move(out))};
}

UnipotentFactors factor_unipotent(const ReferenceMap& rm, const GMorphism& d, const Poset& order,
                                  const PointSet& y, double eps) {
  require_same(d.source(), d.target(), "factor_unipotent needs an endomorphism");
  std::map<std::string, std::string> loc;
  for (const auto& b : d.source().basis()) loc[b] = rm.project(d.source().location(b));
  const Poset on = order.restrict_to(d.source().basis());
  if (on.size() != d.source().rank())
    throw Error(ErrorKind::MissingCertificate, "order does not cover the basis");
  auto bounded = is_epsilon_bounded(on, loc, eps, rm.X);
  if (!bounded.epsilon_bounded)
    throw Error(ErrorKind::NotEpsilonBounded, bounded.violating_element.value_or(""));
  GTriangular t = decompose_triangular(d, on);
  if (t.diagonal != GMorphism::identity(d.source()))
    throw Error(ErrorKind::DiagonalNotOne, "factor_unipotent needs d = 1 + u");

  const PointSet rest = set_difference(rm.X.all(), y);
  std::vector<GPath> away;
  for (const auto& p : t.increasing.paths())
    if (lies_over(rm, p.via, rest)) away.push_back(p);
  GMorphism u1(d.source(), d.source(), std::move(away));
  GMorphism d1 = gadd(GMorphism::identity(d.source()), u1);
  GMorphism d1inv = power_sum(gneg(u1));
  return {d1, gcompose(d1inv, d)};
}

}  // namespace ctrlk
