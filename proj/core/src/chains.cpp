#include "ctrlk/chains.hpp"

#include <algorithm>
#include <set>

namespace ctrlk {

namespace {

void check_degree(int top) {
  if (top > ChainComplex::kMaxDegree)
    throw Error(ErrorKind::DegreeLimit, "degree " + std::to_string(top) + " exceeds " +
                                            std::to_string(ChainComplex::kMaxDegree));
}

BasedModule module_or_zero(const Ring& ring, const std::vector<BasedModule>& modules, int n) {
  if (n < 0 || n >= static_cast<int>(modules.size())) return BasedModule(ring);
  return modules[n];
}

std::string first_entry(const Morphism& f) {
  for (std::size_t x = 0; x < f.source().rank(); ++x)
    if (!f.column(x).empty()) return describe_entry(f, f.column(x).begin()->first, x);
  return "";
}

Morphism projection(const BasedModule& m, const BasedModule& part) {
  Morphism p(m, m);
  for (const auto& l : part.basis()) p.set(l, l, m.ring().one());
  return p;
}

Morphism minus_one(const Ring& ring, const Morphism& f) { return scale(ring.from_integer(-1), f); }

}  // namespace

ChainComplex::ChainComplex(Ring ring, std::vector<BasedModule> modules)
    : ring_(std::move(ring)), modules_(std::move(modules)) {
  check_degree(top());
  for (const auto& m : modules_)
    if (m.ring() != ring_) throw Error(ErrorKind::RingMismatch, "module over " + m.ring().describe());
  for (int n = 0; n <= top(); ++n) boundary_.emplace_back(module(n), module(n - 1));
}

BasedModule ChainComplex::module(int n) const { return module_or_zero(ring_, modules_, n); }

Morphism ChainComplex::boundary(int n) const {
  if (n >= 0 && n <= top()) return boundary_[n];
  return Morphism(module(n), module(n - 1));
}

void ChainComplex::set_boundary(int n, Morphism c) {
  if (n < 1 || n > top()) throw Error(ErrorKind::ShapeMismatch, "no boundary in degree " + std::to_string(n));
  if (c.source() != module(n) || c.target() != module(n - 1))
    throw Error(ErrorKind::ShapeMismatch, "boundary in degree " + std::to_string(n) + " has wrong modules");
  boundary_[n] = std::move(c);
}

bool operator==(const ChainComplex& a, const ChainComplex& b) {
  return a.ring_ == b.ring_ && a.modules_ == b.modules_ && a.boundary_ == b.boundary_;
}

Contraction::Contraction(const ChainComplex& c) : ring_(c.ring()), modules_(c.modules()) {
  for (int n = 0; n <= c.top(); ++n) maps_.emplace_back(c.module(n), c.module(n + 1));
}

Morphism Contraction::at(int n) const {
  if (n >= 0 && n < static_cast<int>(maps_.size())) return maps_[n];
  return Morphism(module_or_zero(ring_, modules_, n), module_or_zero(ring_, modules_, n + 1));
}

void Contraction::set(int n, Morphism xi) {
  if (n < 0 || n + 1 >= static_cast<int>(maps_.size()))
    throw Error(ErrorKind::ShapeMismatch, "no contraction in degree " + std::to_string(n));
  if (xi.source() != maps_[n].source() || xi.target() != maps_[n].target())
    throw Error(ErrorKind::ShapeMismatch, "contraction in degree " + std::to_string(n) + " has wrong modules");
  maps_[n] = std::move(xi);
}

bool operator==(const Contraction& a, const Contraction& b) {
  return a.ring_ == b.ring_ && a.modules_ == b.modules_ && a.maps_ == b.maps_;
}

ChainMap::ChainMap(ChainComplex s, ChainComplex t) : source(std::move(s)), target(std::move(t)) {
  if (source.ring() != target.ring()) throw Error(ErrorKind::RingMismatch, "chain map between rings");
  const int top = std::max(source.top(), target.top());
  for (int n = 0; n <= top; ++n) maps.emplace_back(source.module(n), target.module(n));
}

Morphism ChainMap::at(int n) const {
  if (n >= 0 && n < static_cast<int>(maps.size())) return maps[n];
  return Morphism(source.module(n), target.module(n));
}

void ChainMap::set(int n, Morphism f) {
  if (n < 0 || n >= static_cast<int>(maps.size()))
    throw Error(ErrorKind::ShapeMismatch, "no chain map in degree " + std::to_string(n));
  if (f.source() != maps[n].source() || f.target() != maps[n].target())
    throw Error(ErrorKind::ShapeMismatch, "chain map in degree " + std::to_string(n) + " has wrong modules");
  maps[n] = std::move(f);
}

Report validate_complex(const ChainComplex& c, const Contraction* xi) {
  Report r;
  for (int n = 2; n <= c.top(); ++n) {
    const Morphism cc = compose(c.boundary(n), c.boundary(n - 1));
    r.add("c^2=0 in degree " + std::to_string(n), cc.is_zero(), first_entry(cc));
  }
  if (xi) {
    for (int n = 0; n <= c.top(); ++n) {
      const Morphism h = add(compose(xi->at(n), c.boundary(n + 1)), compose(c.boundary(n), xi->at(n - 1)));
      const Morphism err = sub(h, Morphism::identity(c.module(n)));
      r.add("c xi + xi c = 1 in degree " + std::to_string(n), err.is_zero(), first_entry(err));
    }
  }
  return r;
}

Report validate_chain_map(const ChainMap& f) {
  Report r;
  const int top = std::max(f.source.top(), f.target.top());
  for (int n = 1; n <= top; ++n) {
    const Morphism err = sub(compose(f.at(n), f.target.boundary(n)), compose(f.source.boundary(n), f.at(n - 1)));
    r.add("chain map square in degree " + std::to_string(n), err.is_zero(), first_entry(err));
  }
  return r;
}

namespace {

int shifted_bottom(const std::vector<BasedModule>& modules, int j, bool truncate) {
  int bottom = 0;
  for (int n = 0; n < static_cast<int>(modules.size()); ++n) {
    if (n + j >= 0) break;
    if (modules[n].rank() > 0 && !truncate)
      throw Error(ErrorKind::DegreeLimit, "degree " + std::to_string(n) + " would move to " +
                                              std::to_string(n + j));
    bottom = n + 1;
  }
  return bottom;
}

std::vector<BasedModule> shifted_modules(const ChainComplex& c, int j, bool truncate) {
  shifted_bottom(c.modules(), j, truncate);
  std::vector<BasedModule> out;
  for (int m = 0; m <= c.top() + j; ++m) out.push_back(c.module(m - j));
  check_degree(static_cast<int>(out.size()) - 1);
  return out;
}

}  // namespace

ChainComplex suspend(const ChainComplex& c, int j, bool truncate) {
  ChainComplex out(c.ring(), shifted_modules(c, j, truncate));
  for (int m = 1; m <= out.top(); ++m) {
    const int n = m - j;
    if (n < 1 || n > c.top()) continue;
    out.set_boundary(m, j % 2 ? minus_one(c.ring(), c.boundary(n)) : c.boundary(n));
  }
  return out;
}

ContractedComplex suspend(const ContractedComplex& c, int j, bool truncate) {
  ChainComplex s = suspend(c.complex, j, truncate);
  Contraction xi(s);
  for (int m = 0; m < s.top(); ++m) {
    const int n = m - j;
    if (n < 0 || n >= c.complex.top()) continue;
    xi.set(m, j % 2 ? minus_one(s.ring(), c.xi.at(n)) : c.xi.at(n));
  }
  return {std::move(s), std::move(xi)};
}

ChainMap suspend(const ChainMap& f, int j, bool truncate) {
  ChainMap out(suspend(f.source, j, truncate), suspend(f.target, j, truncate));
  for (int m = 0; m < static_cast<int>(out.maps.size()); ++m) {
    const int n = m - j;
    if (n >= 0 && n < static_cast<int>(f.maps.size())) out.set(m, f.at(n));
  }
  return out;
}

Cone mapping_cone(const ChainMap& f) {
  const Report check = validate_chain_map(f);
  if (!check.ok()) {
    const auto* bad = check.first_failure();
    throw Error(ErrorKind::NotAChainMap, bad->name + ": " + bad->witness);
  }
  const ChainComplex& c = f.source;
  const ChainComplex& cb = f.target;
  const Ring& ring = c.ring();
  const int top = std::max(cb.top(), c.top() + 1);
  std::vector<BasedModule> modules;
  for (int n = 0; n <= top; ++n) modules.push_back(direct_sum(cb.module(n), c.module(n - 1)));
  ChainComplex cone(ring, modules);
  for (int n = 1; n <= top; ++n) {
    const Morphism a = cb.boundary(n);
    const Morphism b = f.at(n - 1);
    const Morphism d = minus_one(ring, c.boundary(n - 1));
    cone.set_boundary(n, block2(cb.module(n), c.module(n - 1), cb.module(n - 1), c.module(n - 2), &a,
                                &b, nullptr, &d));
  }
  Cone out{cone, std::nullopt};
  Contraction xi(cone);
  for (int n = 0; n <= std::max(cb.top(), c.top()); ++n) {
    auto inv = try_invert(f.at(n));
    if (!inv) return out;
    if (n < top) {
      xi.set(n, block2(cb.module(n), c.module(n - 1), cb.module(n + 1), c.module(n), nullptr, nullptr,
                       &*inv, nullptr));
    }
  }
  out.contraction = std::move(xi);
  return out;
}

ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b) {
  if (a.ring() != b.ring()) throw Error(ErrorKind::RingMismatch, a.ring().describe() + " vs " + b.ring().describe());
  const int top = std::max(a.top(), b.top());
  std::vector<BasedModule> modules;
  for (int n = 0; n <= top; ++n) modules.push_back(direct_sum(a.module(n), b.module(n)));
  ChainComplex out(a.ring(), modules);
  for (int n = 1; n <= top; ++n) {
    const Morphism ca = a.boundary(n);
    const Morphism cb = b.boundary(n);
    out.set_boundary(n, block2(a.module(n), b.module(n), a.module(n - 1), b.module(n - 1), &ca, nullptr,
                               nullptr, &cb));
  }
  return out;
}

ContractedComplex direct_sum(const ContractedComplex& a, const ContractedComplex& b) {
  ChainComplex sum = direct_sum(a.complex, b.complex);
  Contraction xi(sum);
  for (int n = 0; n < sum.top(); ++n) {
    const Morphism xa = a.xi.at(n);
    const Morphism xb = b.xi.at(n);
    xi.set(n, block2(a.complex.module(n), b.complex.module(n), a.complex.module(n + 1),
                     b.complex.module(n + 1), &xa, nullptr, nullptr, &xb));
  }
  return {std::move(sum), std::move(xi)};
}

namespace {

[[noreturn]] void no_cancellation(int n, const std::string& what) {
  throw Error(ErrorKind::NoCancellation, "degree " + std::to_string(n) + ": " + what);
}

// Entries of f with source in `cols` and target outside `rows`.
std::optional<std::string> leaks(const Morphism& f, const PointSet& cols, const PointSet& rows) {
  for (std::size_t x = 0; x < f.source().rank(); ++x) {
    if (!cols.count(f.source().basis()[x])) continue;
    for (const auto& [y, v] : f.column(x))
      if (!rows.count(f.target().basis()[y])) return describe_entry(f, y, x);
  }
  return std::nullopt;
}

PointSet labels(const BasedModule& m) { return PointSet(m.basis().begin(), m.basis().end()); }

PointSet unite(const PointSet& a, const PointSet& b) {
  PointSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

}  // namespace

CancellationDecomposition find_cancellation(const ContractedComplex& cc,
                                            const std::vector<PointSet>& kept,
                                            const std::vector<Poset>& orders,
                                            const OrderExemption& exempt, UnitKind unit) {
  const ChainComplex& c = cc.complex;
  const int top = c.top();
  if (static_cast<int>(kept.size()) > top + 1)
    throw Error(ErrorKind::ShapeMismatch, "kept sets beyond the top degree");
  if (!orders.empty() && static_cast<int>(orders.size()) != top + 1)
    throw Error(ErrorKind::MissingCertificate, "one order per degree is required");
  std::vector<Poset> ord = orders;
  if (ord.empty())
    for (int n = 0; n <= top; ++n) ord.push_back(antichain(c.module(n).basis()));
  for (int n = 0; n <= top; ++n)
    for (const auto& l : c.module(n).basis())
      if (!ord[n].contains(l))
        throw Error(ErrorKind::MissingCertificate, "order in degree " + std::to_string(n) + " lacks " + l);

  CancellationDecomposition dec;
  std::vector<PointSet> hat(top + 2), comp(top + 2), upper(top + 2);
  for (int n = 0; n <= top; ++n) {
    if (n < static_cast<int>(kept.size())) hat[n] = kept[n];
    for (const auto& l : hat[n])
      if (!c.module(n).contains(l)) no_cancellation(n, l + " is not a basis element");
    for (const auto& l : c.module(n).basis())
      if (!hat[n].count(l)) comp[n].insert(l);
  }
  for (int n = 0; n <= top; ++n) {
    if (auto w = n > 0 ? leaks(c.boundary(n), hat[n], hat[n - 1]) : std::nullopt)
      no_cancellation(n, "kept part is not a subcomplex: " + *w);
    const Morphism xi = cc.xi.at(n);
    if (auto w = leaks(xi, hat[n], hat[n + 1])) no_cancellation(n, "contraction leaves the kept part: " + *w);
    for (std::size_t x = 0; x < xi.source().rank(); ++x) {
      if (!comp[n].count(xi.source().basis()[x])) continue;
      for (const auto& [y, v] : xi.column(x))
        if (comp[n + 1].count(xi.target().basis()[y])) upper[n + 1].insert(xi.target().basis()[y]);
    }
  }
  for (int n = 0; n <= top; ++n) {
    for (const auto& x : hat[n])
      for (const auto& y : comp[n]) {
        if (exempt && (exempt(n, x) || exempt(n, y))) continue;
        if (ord[n].less(x, y)) no_cancellation(n, "kept " + x + " precedes complement " + y);
      }
    const BasedModule m = c.module(n);
    dec.kept.push_back(submodule(m, {hat[n].begin(), hat[n].end()}));
    dec.upper.push_back(submodule(m, {upper[n].begin(), upper[n].end()}));
    dec.lower.push_back(perp(perp(m, dec.kept.back()), dec.upper.back()));
  }
  for (int n = 0; n <= top; ++n) {
    const Morphism xi = cc.xi.at(n);
    if (auto w = leaks(xi, labels(dec.upper[n]), hat[n + 1]))
      no_cancellation(n, "contraction does not send D into the kept part: " + *w);
    const BasedModule next_upper = n < top ? dec.upper[n + 1] : BasedModule(c.ring());
    Morphism delta = block(xi, dec.lower[n], next_upper);
    if (dec.lower[n].rank() != next_upper.rank())
      no_cancellation(n, "delta is not square (" + std::to_string(dec.lower[n].rank()) + " -> " +
                             std::to_string(next_upper.rank()) + ")");
    if (delta.source().rank() > 0) {
      try {
        const Poset src = ord[n].restrict_to(dec.lower[n].basis());
        const Poset tgt = ord[n + 1].restrict_to(next_upper.basis());
        const auto d = decompose_triangular(delta, tgt, unit, &src);
        if (d.base.size() != delta.source().rank()) no_cancellation(n, "delta is not an isomorphism");
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoCancellation) throw;
        no_cancellation(n, std::string("delta is not triangular: ") + e.what());
      }
    }
    dec.delta.push_back(std::move(delta));
  }
  return dec;
}

Standardization standardize_cancellation(const ContractedComplex& cc,
                                         const CancellationDecomposition& dec) {
  const ChainComplex& c = cc.complex;
  const Ring& ring = c.ring();
  const int top = c.top();
  if (static_cast<int>(dec.kept.size()) != top + 1)
    throw Error(ErrorKind::InvalidDecomposition, "decomposition does not match the complex");
  auto fail = [](int n, const std::string& what) {
    throw Error(ErrorKind::InvalidDecomposition, "degree " + std::to_string(n) + ": " + what);
  };
  auto lower = [&](int n) { return n >= 0 && n <= top ? dec.lower[n] : BasedModule(ring); };
  auto upper = [&](int n) { return n >= 0 && n <= top ? dec.upper[n] : BasedModule(ring); };
  auto kept = [&](int n) { return n >= 0 && n <= top ? dec.kept[n] : BasedModule(ring); };

  Standardization out{{}, {}, {c, cc.xi}};
  for (int n = 0; n <= top; ++n) {
    const BasedModule m = c.module(n);
    const Morphism p = projection(m, lower(n));
    const Morphism one = Morphism::identity(m);
    const Morphism pd = projection(c.module(n + 1), upper(n + 1));
    // c pi_D xi p, an endomorphism of C^n.
    const Morphism t = compose(compose(compose(p, cc.xi.at(n)), pd), c.boundary(n + 1));
    const Morphism g = compose(t, sub(one, p));
    out.f.push_back(add(sub(one, p), t));
    out.f_inverse.push_back(sub(one, g));
    if (compose(out.f.back(), out.f_inverse.back()) != one || compose(out.f_inverse.back(), out.f.back()) != one)
      fail(n, "f is not inverted by 1 - (1-p) c pi_D xi p");
  }
  auto f = [&](int n) { return n >= 0 && n <= top ? out.f[n] : Morphism::identity(c.module(n)); };
  auto finv = [&](int n) { return n >= 0 && n <= top ? out.f_inverse[n] : Morphism::identity(c.module(n)); };

  ChainComplex b(ring, c.modules());
  for (int n = 1; n <= top; ++n) {
    Morphism bn = compose(compose(f(n), c.boundary(n)), finv(n - 1));
    if (compose(bn, f(n - 1)) != compose(f(n), c.boundary(n))) fail(n, "f b != c f");
    // [[ĉ,0,0],[0,0,0],[0,δ^-1,0]].
    if (block(bn, kept(n), kept(n - 1)) != block(c.boundary(n), kept(n), kept(n - 1)))
      fail(n, "kept block of b differs from the kept boundary");
    const Morphism back = block(bn, upper(n), lower(n - 1));
    Morphism rest = bn;
    for (std::size_t x = 0; x < rest.source().rank(); ++x) {
      const std::string& col = rest.source().basis()[x];
      for (const auto& [y, v] : bn.column(x)) {
        const std::string& row = rest.target().basis()[y];
        if ((kept(n).contains(col) && kept(n - 1).contains(row)) ||
            (upper(n).contains(col) && lower(n - 1).contains(row)))
          rest.set(y, x, Scalar{});
      }
    }
    if (!rest.is_zero()) fail(n, "b is not in block form: " + first_entry(rest));
    if (compose(dec.delta[n - 1], back) != Morphism::identity(lower(n - 1)))
      fail(n, "b restricted to D is not the inverse of delta");
    b.set_boundary(n, std::move(bn));
  }
  Contraction beta(b);
  for (int n = 0; n < top; ++n) {
    Morphism bn = compose(compose(f(n), cc.xi.at(n)), finv(n + 1));
    if (compose(bn, f(n + 1)) != compose(f(n), cc.xi.at(n))) fail(n, "f beta != xi f");
    // [[ξ̂,u,-ĉuδ],[0,0,δ],[0,0,0]].
    const PointSet cd_labels = unite(labels(kept(n)), labels(upper(n)));
    const Morphism xi = cc.xi.at(n);
    for (const auto& col : cd_labels)
      for (const auto& row : c.module(n + 1).basis())
        if (bn.entry(row, col) != xi.entry(row, col)) fail(n, "beta differs from xi on " + col);
    const Morphism u = block(cc.xi.at(n + 1), upper(n + 1), kept(n + 2));
    const Morphism chat = block(c.boundary(n + 2), kept(n + 2), kept(n + 1));
    const Morphism expected_v = minus_one(ring, compose(compose(dec.delta[n], u), chat));
    if (block(bn, lower(n), kept(n + 1)) != expected_v) fail(n, "beta block D̄ -> Ĉ is not -ĉ u δ");
    if (block(bn, lower(n), upper(n + 1)) != dec.delta[n]) fail(n, "beta block D̄ -> D is not δ");
    if (!block(bn, lower(n), lower(n + 1)).is_zero()) fail(n, "beta block D̄ -> D̄ is nonzero");
    beta.set(n, std::move(bn));
  }
  out.standard = {std::move(b), std::move(beta)};
  return out;
}

ContractedComplex fold_two_degrees(const ContractedComplex& cc) {
  const ChainComplex& c = cc.complex;
  const Report strict = validate_complex(c, &cc.xi);
  if (!strict.ok()) {
    const auto* bad = strict.first_failure();
    throw Error(ErrorKind::NotStrictContractible, bad->name + ": " + bad->witness);
  }
  if (c.top() <= 1) return cc;
  const Ring& ring = c.ring();
  const int top = c.top();

  // Labels of the even and odd sums, qualified by degree only on collision.
  auto build = [&](int parity, std::vector<std::map<std::string, std::size_t>>& where) {
    std::set<std::string> seen;
    bool clash = false;
    bool located = true;
    for (int n = parity; n <= top; n += 2) {
      for (const auto& l : c.module(n).basis()) clash |= !seen.insert(l).second;
      located &= c.module(n).rank() == 0 || !c.module(n).locations().empty();
    }
    std::vector<std::string> basis;
    std::map<std::string, std::string> loc;
    for (int n = parity; n <= top; n += 2)
      for (const auto& l : c.module(n).basis()) {
        const std::string q = clash ? l + "@" + std::to_string(n) : l;
        where[n][l] = basis.size();
        basis.push_back(q);
        if (located && !c.module(n).locations().empty()) loc[q] = c.module(n).location(l);
      }
    return BasedModule(ring, basis, located ? loc : std::map<std::string, std::string>{});
  };
  std::vector<std::map<std::string, std::size_t>> where(top + 2);
  const BasedModule even = build(0, where);
  const BasedModule odd = build(1, where);

  auto place = [&](Morphism& big, const Morphism& part, int from, int to) {
    for (std::size_t x = 0; x < part.source().rank(); ++x)
      for (const auto& [y, v] : part.column(x))
        big.add_to(where[to].at(part.target().basis()[y]), where[from].at(part.source().basis()[x]), v);
  };
  auto xcx = [&](int n) { return compose(compose(cc.xi.at(n), c.boundary(n + 1)), cc.xi.at(n)); };
  auto cxc = [&](int n) { return compose(compose(c.boundary(n), cc.xi.at(n - 1)), c.boundary(n)); };

  ChainComplex folded(ring, {even, odd});
  Morphism boundary(odd, even);
  for (int k = 1; k <= top; k += 2) {
    place(boundary, c.boundary(k), k, k - 1);
    if (k + 1 <= top) place(boundary, minus_one(ring, xcx(k)), k, k + 1);
  }
  folded.set_boundary(1, boundary);
  Contraction xi(folded);
  Morphism contraction(even, odd);
  for (int k = 0; k <= top; k += 2) {
    if (k + 1 <= top) place(contraction, xcx(k), k, k + 1);
    if (k >= 1) place(contraction, minus_one(ring, cxc(k)), k, k - 1);
  }
  xi.set(0, contraction);
  return {std::move(folded), std::move(xi)};
}

}  // namespace ctrlk
