#include "ctrlk/ksimplex.hpp"

#include <algorithm>
#include <functional>

namespace ctrlk {

namespace {

std::string pair_name(const char* c, int i, int j) {
  return std::string(c) + "_{" + std::to_string(i) + "," + std::to_string(j) + "}";
}

std::string deg(int n) { return " in degree " + std::to_string(n); }

Poset rename(const Poset& p, const std::function<std::string(const std::string&)>& f) {
  std::vector<std::string> el;
  for (const auto& e : p.elements()) el.push_back(f(e));
  std::vector<Relation> rel;
  for (const auto& [a, b] : p.covers()) rel.emplace_back(f(a), f(b));
  return validate_poset(std::move(el), rel);
}

const Poset& order_at(const std::vector<Poset>& orders, int n) {
  static const Poset empty;
  return n >= 0 && n < static_cast<int>(orders.size()) ? orders[n] : empty;
}

void check_certificates(const std::vector<ContractedComplex>& cx,
                        const std::vector<std::vector<Poset>>& orders) {
  if (orders.size() != cx.size())
    throw Error(ErrorKind::MissingCertificate, "one order list per vertex is required");
  for (std::size_t i = 0; i < cx.size(); ++i) {
    const auto& c = cx[i].complex;
    if (static_cast<int>(orders[i].size()) != c.top() + 1)
      throw Error(ErrorKind::MissingCertificate, "vertex " + std::to_string(i) + " needs one order per degree");
    for (int n = 0; n <= c.top(); ++n)
      for (const auto& l : c.module(n).basis())
        if (!orders[i][n].contains(l))
          throw Error(ErrorKind::MissingCertificate,
                      "vertex " + std::to_string(i) + deg(n) + " order lacks " + l);
  }
}

using Bases = std::vector<std::optional<BaseFunction>>;

int span(const ChainMap& f) { return std::max(f.source.top(), f.target.top()); }

// Per-degree base functions of a ±1 triangular injection; nullopt where it fails.
Bases triangular_bases(const ChainMap& f, const std::vector<Poset>& so, const std::vector<Poset>& to,
                       Report* r, const std::string& name) {
  Bases out;
  for (int n = 0; n <= span(f); ++n) {
    const Morphism m = f.at(n);
    std::string why;
    try {
      if (m.source().rank() == 0) {
        out.emplace_back(BaseFunction{});
        continue;
      }
      const Poset& s = order_at(so, n);
      const Poset& t = order_at(to, n);
      auto d = decompose_triangular(m, t, UnitKind::PlusMinusOne, &s);
      if (d.base.size() == m.source().rank()) {
        out.emplace_back(d.base);
        if (r) r->add("(1) " + name + " is a ±1 triangular injection" + deg(n), true);
        continue;
      }
      for (const auto& x : m.source().basis())
        if (!d.base.count(x)) {
          why = "not injective at " + x;
          break;
        }
    } catch (const Error& e) {
      why = e.what();
    }
    out.emplace_back(std::nullopt);
    if (r) r->add("(1) " + name + " is a ±1 triangular injection" + deg(n), false, why);
  }
  return out;
}

PointSet image_of(const BaseFunction& b) {
  PointSet out;
  for (const auto& [x, y] : b) out.insert(y);
  return out;
}

PointSet frontier_of(const std::optional<Controlled>& ctl) {
  return ctl ? frontier_enlargement(ctl->space, ctl->eps) : PointSet{};
}

void image_order(Report& r, const std::string& name, const BasedModule& m, const PointSet& image,
                 const Poset& order, const std::optional<Controlled>& ctl, const PointSet& fr, int n) {
  std::string bad;
  for (const auto& c : m.basis()) {
    if (image.count(c)) continue;
    if (ctl && fr.count(m.location(c))) continue;
    for (const auto& y : image) {
      const bool fails = ctl ? order.less(y, c) : !order.less(c, y);
      if (fails) {
        bad = ctl ? y + " < " + c : c + " !< " + y;
        break;
      }
    }
    if (!bad.empty()) break;
  }
  r.add("(2) image of " + name + " follows its complement" + deg(n), bad.empty(), bad);
}

void cancellation(Report& r, const std::string& name, const ContractedComplex& target,
                  const std::vector<PointSet>& images, const std::vector<Poset>& orders,
                  const std::optional<Controlled>& ctl, const PointSet& fr) {
  OrderExemption exempt;
  if (ctl)
    exempt = [&](int n, const std::string& l) {
      return fr.count(target.complex.module(n).location(l)) > 0;
    };
  std::vector<PointSet> kept(images.begin(),
                             images.begin() + std::min<std::ptrdiff_t>(images.size(), target.complex.top() + 1));
  try {
    find_cancellation(target, kept, orders, exempt);
    r.add("(4) contraction cancels the complement of " + name, true);
  } catch (const Error& e) {
    r.add("(4) contraction cancels the complement of " + name, false, e.what());
  }
}

std::optional<BaseFunction> after(const std::optional<BaseFunction>& g, const std::optional<BaseFunction>& f) {
  if (!g || !f) return std::nullopt;
  BaseFunction out;
  for (const auto& [x, y] : *f)
    if (auto it = g->find(y); it != g->end()) out[x] = it->second;
  return out;
}

// Empty when the functions agree (everywhere, or on common elements when `partial`).
std::string compare_bases(const BaseFunction& a, const BaseFunction& b, bool partial) {
  for (const auto& [x, y] : a) {
    auto it = b.find(x);
    if (it == b.end()) {
      if (!partial) return x + " only in one";
      continue;
    }
    if (it->second != y) return x + ": " + y + " vs " + it->second;
  }
  if (!partial)
    for (const auto& [x, y] : b)
      if (!a.count(x)) return x + " only in one";
  return {};
}

std::optional<BaseFunction> at(const Bases& b, int n) {
  if (n < static_cast<int>(b.size())) return b[n];
  return BaseFunction{};
}

void controlled_vertex(Report& r, const ContractedComplex& c, const std::vector<Poset>& orders,
                       const Controlled& ctl, int i) {
  const std::string v = "C_" + std::to_string(i);
  double rc = 0, rx = 0;
  for (int n = 1; n <= c.complex.top(); ++n) rc = std::max(rc, located_radius(c.complex.boundary(n), ctl.space));
  for (int n = 0; n < c.complex.top(); ++n) {
    Morphism p = c.xi.at(n);
    for (int m = n + 1; !p.is_zero(); ++m) {
      rx = std::max(rx, located_radius(p, ctl.space));
      if (m >= c.complex.top()) break;
      p = compose(p, c.xi.at(m));
    }
  }
  r.add(v + " boundary radius < eps", rc < ctl.eps, std::to_string(rc));
  r.add(v + " contraction powers radius < eps", rx < ctl.eps, std::to_string(rx));
  for (int n = 0; n <= c.complex.top(); ++n) {
    auto b = is_epsilon_bounded(orders[n], c.complex.module(n).locations(), ctl.eps, ctl.space);
    r.add(v + " order eps-bounded" + deg(n), b.epsilon_bounded, b.violating_element.value_or(""));
  }
}

void map_radius(Report& r, const ChainMap& f, const Controlled& ctl, const std::string& name) {
  double x = 0;
  for (int n = 0; n <= span(f); ++n) x = std::max(x, located_radius(f.at(n), ctl.space));
  r.add("radius of " + name + " < eps", x < ctl.eps, std::to_string(x));
}

// Shared checks for one structure map between two vertices.
Bases check_map(Report& r, const std::string& name, const ChainMap& f, const ContractedComplex& s,
                const std::vector<Poset>& so, const ContractedComplex& t, const std::vector<Poset>& to,
                const std::optional<Controlled>& ctl, const PointSet& fr) {
  const bool ends = f.source == s.complex && f.target == t.complex;
  r.add(name + " joins its vertices", ends);
  if (!ends) return {};
  r.merge(validate_chain_map(f), name + ": ");
  if (ctl) map_radius(r, f, *ctl, name);
  Bases b = triangular_bases(f, so, to, &r, name);
  std::vector<PointSet> images;
  bool all = true;
  for (int n = 0; n <= t.complex.top(); ++n) {
    auto bn = at(b, n);
    if (!bn) {
      all = false;
      break;
    }
    images.push_back(image_of(*bn));
    image_order(r, name, t.complex.module(n), images.back(), to[n], ctl, fr, n);
  }
  if (all) cancellation(r, name, t, images, to, ctl, fr);
  return b;
}

void compatible(Report& r, const std::string& what, const Bases& lhs, const Bases& rhs, int top,
                bool partial) {
  for (int n = 0; n <= top; ++n) {
    auto a = at(lhs, n), b = at(rhs, n);
    if (!a || !b) continue;
    const std::string bad = compare_bases(*a, *b, partial);
    r.add("(3) " + what + deg(n), bad.empty(), bad);
  }
}

Bases compose_bases(const Bases& g, const Bases& f) {
  Bases out;
  for (std::size_t n = 0; n < std::max(g.size(), f.size()); ++n)
    out.push_back(after(at(g, static_cast<int>(n)), at(f, static_cast<int>(n))));
  return out;
}

ChainMap block_diagonal(const ChainMap& f, const ChainComplex& s, const ChainComplex& t) {
  ChainMap out(s, t);
  for (int n = 0; n <= std::max(s.top(), t.top()); ++n) {
    const Morphism a = f.at(n), d = f.at(n - 1);
    out.set(n, block2(f.source.module(n), f.source.module(n - 1), f.target.module(n),
                      f.target.module(n - 1), &a, nullptr, nullptr, &d));
  }
  return out;
}

ContractedComplex zero_complex(const Ring& ring) {
  ChainComplex z(ring, {});
  return {z, Contraction(z)};
}

}  // namespace

double located_radius(const Morphism& f, const ControlSpace& x) {
  double r = 0;
  for (std::size_t c = 0; c < f.source().rank(); ++c)
    for (const auto& [row, v] : f.column(c))
      r = std::max(r, x.distance(f.source().location(f.source().basis()[c]),
                                 f.target().location(f.target().basis()[row])));
  return r;
}

ChainMap identity_map(const ChainComplex& c) {
  ChainMap out(c, c);
  for (int n = 0; n <= c.top(); ++n) out.set(n, Morphism::identity(c.module(n)));
  return out;
}

ChainMap K1Simplex::map(int i, int j) const {
  if (i == j) return identity_map(complexes.at(i).complex);
  auto it = maps.find({i, j});
  if (it == maps.end()) throw Error(ErrorKind::MissingCertificate, pair_name("c", i, j) + " missing");
  return it->second;
}

ChainMap K1Morphism::map(int i, int j) const {
  auto it = maps.find({i, j});
  if (it == maps.end()) throw Error(ErrorKind::MissingCertificate, pair_name("f", i, j) + " missing");
  return it->second;
}

K1Simplex face(const K1Simplex& s, int j) {
  const int n = s.dimension();
  if (j < 0 || j > n) throw Error(ErrorKind::InvalidInput, "face index " + std::to_string(j));
  K1Simplex out;
  out.controlled = s.controlled;
  auto old = [j](int a) { return a < j ? a : a + 1; };
  for (int a = 0; a < n; ++a) {
    out.complexes.push_back(s.complexes[old(a)]);
    if (!s.orders.empty()) out.orders.push_back(s.orders[old(a)]);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out.maps.emplace(std::make_pair(a, b), s.map(old(a), old(b)));
  return out;
}

Report validate_k1_simplex(const K1Simplex& s) {
  check_certificates(s.complexes, s.orders);
  Report r;
  const int n = s.dimension();
  const PointSet fr = frontier_of(s.controlled);
  for (int i = 0; i <= n; ++i) {
    const auto& c = s.complexes[i];
    r.merge(validate_complex(c.complex, &c.xi), "C_" + std::to_string(i) + ": ");
    if (s.controlled) controlled_vertex(r, c, s.orders[i], *s.controlled, i);
  }
  std::map<std::pair<int, int>, Bases> bases;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      bases[{i, j}] = check_map(r, pair_name("c", i, j), s.map(i, j), s.complexes[i], s.orders[i],
                                s.complexes[j], s.orders[j], s.controlled, fr);
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k)
        compatible(r, "base " + pair_name("c", i, k) + " = base " + pair_name("c", j, k) + pair_name("c", i, j),
                   bases[{i, k}], compose_bases(bases[{j, k}], bases[{i, j}]),
                   s.complexes[k].complex.top(), s.controlled.has_value());
  return r;
}

std::vector<K1Simplex> triangulate(const K1Morphism& f) {
  const int n = f.source.dimension();
  if (f.target.dimension() != n) throw Error(ErrorKind::InvalidInput, "morphism between simplices of different dimension");
  std::vector<K1Simplex> out;
  for (int k = 0; k <= n; ++k) {
    K1Simplex s;
    s.controlled = f.target.controlled;
    for (int p = 0; p <= n + 1; ++p) {
      const bool a = p <= k;
      s.complexes.push_back(a ? f.source.complexes[p] : f.target.complexes[p - 1]);
      s.orders.push_back(a ? f.source.orders.at(p) : f.target.orders.at(p - 1));
    }
    for (int p = 0; p <= n + 1; ++p)
      for (int q = p + 1; q <= n + 1; ++q) {
        ChainMap m = q <= k ? f.source.map(p, q) : p > k ? f.target.map(p - 1, q - 1) : f.map(p, q - 1);
        s.maps.emplace(std::make_pair(p, q), std::move(m));
      }
    out.push_back(std::move(s));
  }
  return out;
}

K1MorphismCheck validate_k1_morphism(const K1Morphism& f) {
  K1MorphismCheck out;
  Report& r = out.report;
  r.merge(validate_k1_simplex(f.source), "source: ");
  r.merge(validate_k1_simplex(f.target), "target: ");
  const int n = f.source.dimension();
  if (f.target.dimension() != n) throw Error(ErrorKind::InvalidInput, "morphism between simplices of different dimension");
  const auto& ctl = f.target.controlled;
  const PointSet fr = frontier_of(ctl);
  std::map<std::pair<int, int>, Bases> fb, ab, cb;
  for (int i = 0; i <= n; ++i)
    for (int j = i; j <= n; ++j) {
      fb[{i, j}] = check_map(r, pair_name("f", i, j), f.map(i, j), f.source.complexes[i], f.source.orders[i],
                             f.target.complexes[j], f.target.orders[j], ctl, fr);
      ab[{i, j}] = triangular_bases(f.source.map(i, j), f.source.orders[i], f.source.orders[j], nullptr, "");
      cb[{i, j}] = triangular_bases(f.target.map(i, j), f.target.orders[i], f.target.orders[j], nullptr, "");
    }
  for (int i = 0; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      for (int k = j; k <= n; ++k) {
        if (i == j && j == k) continue;
        const int top = f.target.complexes[k].complex.top();
        const std::string fik = "base " + pair_name("f", i, k);
        compatible(r, fik + " = base " + pair_name("c", j, k) + pair_name("f", i, j), fb[{i, k}],
                   compose_bases(cb[{j, k}], fb[{i, j}]), top, ctl.has_value());
        compatible(r, fik + " = base " + pair_name("f", j, k) + pair_name("a", i, j), fb[{i, k}],
                   compose_bases(fb[{j, k}], ab[{i, j}]), top, ctl.has_value());
      }
  out.triangulation = triangulate(f);
  for (std::size_t k = 0; k < out.triangulation.size(); ++k)
    r.merge(validate_k1_simplex(out.triangulation[k]), "triangle " + std::to_string(k) + ": ");
  return out;
}

CancellationData cancellation_data(const K1Simplex& c) {
  const Report check = validate_k1_simplex(c);
  if (!check.ok()) {
    const auto* bad = check.first_failure();
    throw Error(ErrorKind::InvalidInput, "not a K1 simplex: " + bad->name + " " + bad->witness);
  }
  const int n = c.dimension();
  if (n < 0) throw Error(ErrorKind::InvalidInput, "empty simplex");
  const Ring& ring = c.complexes[0].complex.ring();

  CancellationData out;
  std::optional<Controlled> ctl;
  if (c.controlled) ctl = Controlled{c.controlled->space, 7 * c.controlled->eps};
  out.sum.controlled = out.cone.controlled = ctl;

  std::map<std::pair<int, int>, Bases> bases;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      bases[{i, j}] = triangular_bases(c.map(i, j), c.orders[i], c.orders[j], nullptr, "");

  std::vector<ChainComplex> plain;
  for (int j = 0; j <= n; ++j) {
    const ContractedComplex& cj = c.complexes[j];
    out.sum.complexes.push_back(direct_sum(cj, suspend(cj, 1)));
    Cone cone = mapping_cone(identity_map(cj.complex));
    out.cone.complexes.push_back({cone.complex, *cone.contraction});

    const ChainComplex& cx = cj.complex;
    std::vector<Poset> orders;
    for (int d = 0; d <= cx.top() + 1; ++d) {
      const BasedModule top_part = cx.module(d), low_part = cx.module(d - 1);
      auto sc = [&](const std::string& l) { return summand_label(top_part, low_part, l); };
      const Poset pc = d <= cx.top() ? c.orders[j][d] : antichain({});
      const Poset psc = d >= 1 ? rename(c.orders[j][d - 1], sc) : antichain({});
      std::vector<ImagePair> images;
      std::map<std::string, int> layer;
      for (const auto& l : pc.elements()) layer[l] = j;
      for (const auto& l : psc.elements()) layer[l] = j;
      for (int i = j - 1; i >= 0; --i) {
        ImagePair ip;
        if (auto b = at(bases[{i, j}], d)) ip.c_image = image_of(*b);
        if (d >= 1)
          if (auto b = at(bases[{i, j}], d - 1))
            for (const auto& l : image_of(*b)) ip.sc_image.insert(sc(l));
        for (const auto& l : ip.c_image) layer[l] = i;
        for (const auto& l : ip.sc_image) layer[l] = i;
        images.push_back(std::move(ip));
      }
      std::optional<Placement> place;
      const BasedModule& sm = out.sum.complexes.back().complex.module(d);
      if (c.controlled) place = Placement{&c.controlled->space, sm.locations(), c.controlled->eps};
      Poset p = shuffle_orders(pc, psc, images, place);
      if (!c.controlled) {
        std::vector<Relation> rel = p.relations();
        PointSet in_sc(psc.elements().begin(), psc.elements().end());
        for (const auto& x : p.elements())
          for (const auto& y : p.elements())
            if (layer[x] > layer[y] || (layer[x] == layer[y] && in_sc.count(x) && !in_sc.count(y)))
              rel.emplace_back(x, y);
        p = close_relations(p.elements(), rel, ErrorKind::CycleDetected);
      }
      orders.push_back(std::move(p));
    }
    out.sum.orders.push_back(orders);
    out.cone.orders.push_back(std::move(orders));
  }

  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const ChainMap cij = c.map(i, j);
      out.sum.maps.emplace(std::make_pair(i, j),
                           block_diagonal(cij, out.sum.complexes[i].complex, out.sum.complexes[j].complex));
      out.cone.maps.emplace(std::make_pair(i, j),
                            block_diagonal(cij, out.cone.complexes[i].complex, out.cone.complexes[j].complex));
    }

  out.morphism.source = out.sum;
  out.morphism.target = out.cone;
  out.inclusion.target = out.cone;
  out.inclusion.source.controlled = ctl;
  for (int j = 0; j <= n; ++j) {
    out.inclusion.source.complexes.push_back(zero_complex(ring));
    out.inclusion.source.orders.emplace_back();
  }
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      out.inclusion.source.maps.emplace(std::make_pair(i, j),
                                        ChainMap(out.inclusion.source.complexes[i].complex,
                                                 out.inclusion.source.complexes[j].complex));
  for (int j = 0; j <= n; ++j) {
    const ContractedComplex& cj = c.complexes[j];
    const ChainComplex& target = out.cone.complexes[j].complex;
    ChainMap u(out.sum.complexes[j].complex, target);
    for (int d = 0; d <= target.top(); ++d) {
      const Morphism one = Morphism::identity(cj.complex.module(d));
      const Morphism low = Morphism::identity(cj.complex.module(d - 1));
      const Morphism mx = neg(cj.xi.at(d - 1));
      u.set(d, block2(cj.complex.module(d), cj.complex.module(d - 1), cj.complex.module(d),
                      cj.complex.module(d - 1), &one, &mx, nullptr, &low));
    }
    for (int i = 0; i <= j; ++i) {
      const ChainMap diag = i == j ? identity_map(out.sum.complexes[j].complex)
                                   : out.sum.maps.at({i, j});
      ChainMap fij(out.sum.complexes[i].complex, target);
      for (int d = 0; d <= target.top(); ++d) fij.set(d, compose(diag.at(d), u.at(d)));
      out.morphism.maps.emplace(std::make_pair(i, j), std::move(fij));
      out.inclusion.maps.emplace(std::make_pair(i, j),
                                 ChainMap(out.inclusion.source.complexes[i].complex, target));
    }
  }
  return out;
}

std::vector<std::string> volodin_basis(int k) {
  std::vector<std::string> out;
  for (int i = 1; i <= k; ++i) out.push_back("e" + std::to_string(i));
  return out;
}

VolodinPath face(const VolodinPath& v, int j) {
  if (j < 0 || j >= static_cast<int>(v.matrices.size()))
    throw Error(ErrorKind::InvalidInput, "face index " + std::to_string(j));
  VolodinPath out = v;
  out.matrices.erase(out.matrices.begin() + j);
  return out;
}

namespace {

struct VolodinData {
  BasedModule module;
  std::vector<Morphism> g;
  std::vector<Morphism> inverse;
};

VolodinData load(const VolodinPath& v) {
  if (v.k < 0) throw Error(ErrorKind::InvalidInput, "negative rank");
  BasedModule m(v.ring, volodin_basis(v.k));
  VolodinData d{m, {}, {}};
  for (std::size_t i = 0; i < v.matrices.size(); ++i) {
    const auto& a = v.matrices[i];
    if (static_cast<int>(a.size()) != v.k)
      throw Error(ErrorKind::ShapeMismatch, "g_" + std::to_string(i) + " is not k x k");
    for (const auto& row : a)
      if (static_cast<int>(row.size()) != v.k)
        throw Error(ErrorKind::ShapeMismatch, "g_" + std::to_string(i) + " is not k x k");
    d.g.push_back(Morphism::from_dense(m, m, a));
    auto inv = try_invert(d.g.back());
    if (!inv) throw Error(ErrorKind::NotInvertible, "g_" + std::to_string(i));
    d.inverse.push_back(*inv);
  }
  return d;
}

}  // namespace

Poset volodin_check(const VolodinPath& v) {
  VolodinData d = load(v);
  const auto& basis = d.module.basis();
  std::vector<Relation> constraints;
  for (std::size_t i = 0; i < d.g.size(); ++i)
    for (std::size_t j = i + 1; j < d.g.size(); ++j) {
      const Morphism p = compose(d.inverse[i], d.g[j]);
      const std::string name = "g_" + std::to_string(j) + " g_" + std::to_string(i) + "^-1";
      for (std::size_t x = 0; x < basis.size(); ++x) {
        const Scalar diag = p.at(x, x);
        if (diag.is_zero())
          throw Error(ErrorKind::NoOrderExists, name + " has diagonal entry 0 at " + basis[x]);
        const bool ok = v.ring.is_one(diag) || (v.mode == SignMode::PlusMinus && v.ring.is_minus_one(diag));
        if (!ok)
          throw Error(ErrorKind::DiagonalNotOne, name + " at " + basis[x] + ": " + v.ring.to_string(diag));
        for (const auto& [y, val] : p.column(x))
          if (y != x) constraints.emplace_back(basis[x], basis[y]);
      }
    }
  return find_common_order(basis, constraints);
}

K1Simplex volodin_to_k1(const VolodinPath& v) {
  const Poset order = volodin_check(v);
  VolodinData d = load(v);
  K1Simplex s;
  for (std::size_t i = 0; i < d.g.size(); ++i) {
    ChainComplex c(v.ring, {d.module, d.module});
    c.set_boundary(1, d.g[i]);
    Contraction xi(c);
    xi.set(0, d.inverse[i]);
    s.complexes.push_back({c, xi});
    s.orders.push_back({order, order});
  }
  for (std::size_t i = 0; i < d.g.size(); ++i)
    for (std::size_t j = i + 1; j < d.g.size(); ++j) {
      ChainMap f(s.complexes[i].complex, s.complexes[j].complex);
      f.set(1, Morphism::identity(d.module));
      f.set(0, compose(d.inverse[i], d.g[j]));
      s.maps.emplace(std::make_pair(static_cast<int>(i), static_cast<int>(j)), std::move(f));
    }
  return s;
}

VolodinPath fix_signs(const VolodinPath& v, bool loop) {
  if (v.mode == SignMode::One) return v;
  volodin_check(v);
  VolodinData d = load(v);
  const Morphism one = Morphism::identity(d.module);
  if (loop && !d.g.empty() && (d.g.front() != one || d.g.back() != one))
    throw Error(ErrorKind::InvalidInput, "a loop must start and end at the identity");
  VolodinPath out = v;
  out.mode = SignMode::One;
  out.matrices.clear();
  Morphism eps = one;
  for (std::size_t i = 0; i < d.g.size(); ++i) {
    if (i > 0) {
      // eps_i = diag(g_i g_{i-1}^-1 eps_{i-1}^-1); eps is its own inverse.
      const Morphism p = compose(compose(eps, d.inverse[i - 1]), d.g[i]);
      Morphism next(d.module, d.module);
      for (std::size_t x = 0; x < d.module.rank(); ++x) next.set(x, x, p.at(x, x));
      eps = next;
    }
    out.matrices.push_back(compose(d.g[i], eps).to_dense());
  }
  if (eps != one) out.matrices.push_back(one.to_dense());
  return out;
}

K1Simplex stabilize_morphism(const K1Simplex& f, const Morphism& phi) {
  if (f.dimension() != 1) throw Error(ErrorKind::InvalidInput, "stabilize_morphism needs a 1-simplex");
  check_certificates(f.complexes, f.orders);
  const ContractedComplex& b = f.complexes[0];
  const ContractedComplex& c = f.complexes[1];
  if (b.complex.top() > 1 || c.complex.top() > 1)
    throw Error(ErrorKind::InvalidInput, "complexes must be concentrated in degrees 0 and 1");
  const ChainMap fm = f.map(0, 1);
  const Ring& ring = c.complex.ring();
  const BasedModule b0 = b.complex.module(0), b1 = b.complex.module(1);
  const BasedModule c0 = c.complex.module(0), c1 = c.complex.module(1);

  Bases base = triangular_bases(fm, f.orders[0], f.orders[1], nullptr, "");
  auto base1 = at(base, 1);
  if (!base1) throw Error(ErrorKind::InvalidInput, "f is not triangular in degree 1");
  const PointSet image = image_of(*base1);
  std::vector<std::string> complement;
  for (const auto& l : c1.basis())
    if (!image.count(l)) complement.push_back(l);
  if (phi.target() != c1) throw Error(ErrorKind::ModuleMismatch, "phi must land in C^1");
  if (phi.source().rank() != complement.size())
    throw Error(ErrorKind::WrongComplementRank, "rank " + std::to_string(phi.source().rank()) +
                                                    " for a complement of rank " +
                                                    std::to_string(complement.size()));
  BaseFunction pb = is_U_diagonal(phi, UnitKind::PlusMinusOne);
  if (pb.size() != complement.size() || image_of(pb) != PointSet(complement.begin(), complement.end()))
    throw Error(ErrorKind::WrongComplementRank, "phi is not onto the complement of f(B^1)");

  const BasedModule r = phi.source();
  ChainComplex unit(ring, {r, r});
  unit.set_boundary(1, Morphism::identity(r));
  Contraction ux(unit);
  ux.set(0, Morphism::identity(r));
  const ContractedComplex hat = direct_sum(b, ContractedComplex{unit, ux});
  const BasedModule h0 = hat.complex.module(0), h1 = hat.complex.module(1);
  const BasedModule none(ring);

  ChainMap incl(b.complex, hat.complex);
  for (int n = 0; n <= 1; ++n) {
    const Morphism id = Morphism::identity(b.complex.module(n));
    incl.set(n, block2(b.complex.module(n), none, b.complex.module(n), r, &id, nullptr, nullptr, nullptr));
  }
  ChainMap fhat(hat.complex, c.complex);
  const Morphism f1 = fm.at(1), f0 = fm.at(0), cphi = compose(phi, c.complex.boundary(1));
  fhat.set(1, block2(b1, r, c1, none, &f1, &phi, nullptr, nullptr));
  fhat.set(0, block2(b0, r, c0, none, &f0, &cphi, nullptr, nullptr));

  // Degree 1: pull back the order on C^1 along the basis map of f̂^1.
  BaseFunction h;
  for (const auto& [x, y] : *base1) h[x] = y;
  for (const auto& [x, y] : pb) h[summand_label(b1, r, x)] = y;
  std::vector<Relation> rel1;
  for (const auto& x : h1.basis())
    for (const auto& y : h1.basis())
      if (f.orders[1][1].less(h.at(x), h.at(y))) rel1.emplace_back(x, y);
  // Degree 0: R^l precedes B^0.
  std::vector<Relation> rel0 = f.orders[0][0].relations();
  for (const auto& x : r.basis())
    for (const auto& y : b0.basis()) rel0.emplace_back(summand_label(b0, r, x), y);

  K1Simplex out;
  out.controlled = f.controlled;
  out.complexes = {b, hat, c};
  out.orders = {f.orders[0], {close_relations(h0.basis(), rel0, ErrorKind::CycleDetected),
                              close_relations(h1.basis(), rel1, ErrorKind::CycleDetected)},
                f.orders[1]};
  out.maps.emplace(std::make_pair(0, 1), incl);
  out.maps.emplace(std::make_pair(1, 2), fhat);
  out.maps.emplace(std::make_pair(0, 2), fm);
  return out;
}

}  // namespace ctrlk
