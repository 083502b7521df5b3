#include "ctrlk/modules.hpp"

#include <algorithm>
#include <set>

namespace ctrlk {

BasedModule::BasedModule(Ring ring, std::vector<std::string> basis,
                         std::map<std::string, std::string> location) {
  auto impl = std::make_shared<Impl>(Impl{std::move(ring), std::move(basis), {}, std::move(location)});
  for (std::size_t i = 0; i < impl->basis.size(); ++i)
    if (!impl->index.emplace(impl->basis[i], i).second)
      throw Error(ErrorKind::DuplicateLabel, impl->basis[i]);
  if (!impl->location.empty()) {
    for (const auto& b : impl->basis)
      if (!impl->location.count(b)) throw Error(ErrorKind::UnknownPoint, "no location for " + b);
    for (const auto& [label, point] : impl->location)
      if (!impl->index.count(label)) throw Error(ErrorKind::UnknownLabel, label);
  }
  impl_ = std::move(impl);
}

std::size_t BasedModule::index(const std::string& label) const {
  auto it = impl_->index.find(label);
  if (it == impl_->index.end()) throw Error(ErrorKind::UnknownLabel, label);
  return it->second;
}

const std::string& BasedModule::location(const std::string& label) const {
  auto it = impl_->location.find(label);
  if (it == impl_->location.end()) throw Error(ErrorKind::UnknownPoint, "no location for " + label);
  return it->second;
}

bool operator==(const BasedModule& a, const BasedModule& b) {
  if (a.impl_ == b.impl_) return true;
  return a.impl_->ring == b.impl_->ring && a.impl_->basis == b.impl_->basis &&
         a.impl_->location == b.impl_->location;
}

BasedModule submodule(const BasedModule& c, const std::vector<std::string>& labels) {
  std::set<std::string> keep;
  for (const auto& l : labels) {
    if (!c.contains(l)) throw Error(ErrorKind::NotASubbasis, l);
    keep.insert(l);
  }
  std::vector<std::string> basis;
  std::map<std::string, std::string> loc;
  for (const auto& b : c.basis())
    if (keep.count(b)) {
      basis.push_back(b);
      if (!c.locations().empty()) loc[b] = c.location(b);
    }
  return BasedModule(c.ring(), std::move(basis), std::move(loc));
}

BasedModule perp(const BasedModule& c, const std::vector<std::string>& d) {
  std::set<std::string> drop;
  for (const auto& l : d) {
    if (!c.contains(l)) throw Error(ErrorKind::NotASubbasis, l);
    drop.insert(l);
  }
  std::vector<std::string> rest;
  for (const auto& b : c.basis())
    if (!drop.count(b)) rest.push_back(b);
  return submodule(c, rest);
}

BasedModule perp(const BasedModule& c, const BasedModule& d) { return perp(c, d.basis()); }

namespace {

std::string collision_free_prefix(const BasedModule& a, const BasedModule& b,
                                  const std::string& prefix) {
  std::string p;
  for (;;) {
    bool clash = false;
    for (const auto& l : b.basis())
      if (a.contains(p + l)) {
        clash = true;
        break;
      }
    if (!clash) return p;
    p += prefix;
  }
}

}  // namespace

std::string summand_label(const BasedModule& a, const BasedModule& b, const std::string& label,
                          const std::string& prefix) {
  return collision_free_prefix(a, b, prefix) + label;
}

BasedModule direct_sum(const BasedModule& a, const BasedModule& b, const std::string& prefix) {
  if (a.ring() != b.ring()) throw Error(ErrorKind::RingMismatch, a.ring().describe() + " vs " + b.ring().describe());
  const std::string p = collision_free_prefix(a, b, prefix);
  std::vector<std::string> basis = a.basis();
  std::map<std::string, std::string> loc = a.locations();
  const bool located = (a.rank() == 0 || !a.locations().empty()) &&
                       (b.rank() == 0 || !b.locations().empty()) &&
                       (!a.locations().empty() || !b.locations().empty());
  for (const auto& l : b.basis()) {
    basis.push_back(p + l);
    if (located) loc[p + l] = b.location(l);
  }
  if (!located) loc.clear();
  return BasedModule(a.ring(), std::move(basis), std::move(loc));
}

Morphism::Morphism(BasedModule source, BasedModule target)
    : source_(std::move(source)), target_(std::move(target)), cols_(source_.rank()) {
  if (source_.ring() != target_.ring())
    throw Error(ErrorKind::RingMismatch, "source and target rings differ");
}

Morphism Morphism::identity(const BasedModule& m) {
  Morphism f(m, m);
  for (std::size_t i = 0; i < m.rank(); ++i) f.cols_[i].emplace(i, m.ring().one());
  return f;
}

Morphism Morphism::from_dense(BasedModule source, BasedModule target, const DenseMatrix& rows) {
  Morphism f(std::move(source), std::move(target));
  if (rows.size() != f.target_.rank())
    throw Error(ErrorKind::ShapeMismatch, "row count differs from target rank");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != f.source_.rank())
      throw Error(ErrorKind::ShapeMismatch, "column count differs from source rank");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (!rows[r][c].is_zero()) f.cols_[c].emplace(r, rows[r][c]);
  }
  return f;
}

Scalar Morphism::at(std::size_t row, std::size_t col) const {
  auto it = cols_[col].find(row);
  return it == cols_[col].end() ? Scalar{} : it->second;
}

Scalar Morphism::entry(const std::string& row, const std::string& col) const {
  return at(target_.index(row), source_.index(col));
}

void Morphism::set(std::size_t row, std::size_t col, const Scalar& v) {
  if (row >= target_.rank() || col >= source_.rank())
    throw Error(ErrorKind::ShapeMismatch, "entry out of range");
  if (v.is_zero()) {
    cols_[col].erase(row);
  } else {
    cols_[col][row] = v;
  }
}

void Morphism::set(const std::string& row, const std::string& col, const Scalar& v) {
  set(target_.index(row), source_.index(col), v);
}

void Morphism::add_to(std::size_t row, std::size_t col, const Scalar& v) {
  if (v.is_zero()) return;
  set(row, col, ring().add(at(row, col), v));
}

bool Morphism::is_zero() const {
  for (const auto& c : cols_)
    if (!c.empty()) return false;
  return true;
}

std::size_t Morphism::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : cols_) n += c.size();
  return n;
}

DenseMatrix Morphism::to_dense() const {
  DenseMatrix m(target_.rank(), std::vector<Scalar>(source_.rank()));
  for (std::size_t c = 0; c < cols_.size(); ++c)
    for (const auto& [r, v] : cols_[c]) m[r][c] = v;
  return m;
}

bool operator==(const Morphism& a, const Morphism& b) {
  return a.source_ == b.source_ && a.target_ == b.target_ && a.cols_ == b.cols_;
}

std::string describe_entry(const Morphism& f, std::size_t row, std::size_t col) {
  return f.target().basis()[row] + "<-" + f.source().basis()[col] + " = " +
         f.ring().to_string(f.at(row, col));
}

Morphism compose(const Morphism& f, const Morphism& g) {
  if (f.target() != g.source())
    throw Error(ErrorKind::ShapeMismatch, "target of first map differs from source of second");
  const Ring& ring = f.ring();
  Morphism out(f.source(), g.target());
  for (std::size_t x = 0; x < f.source().rank(); ++x)
    for (const auto& [y, a] : f.column(x))
      for (const auto& [z, b] : g.column(y)) out.add_to(z, x, ring.mul(b, a));
  return out;
}

Morphism add(const Morphism& f, const Morphism& g) {
  if (f.source() != g.source() || f.target() != g.target())
    throw Error(ErrorKind::ShapeMismatch, "sum of morphisms with different shapes");
  Morphism out = f;
  for (std::size_t x = 0; x < g.source().rank(); ++x)
    for (const auto& [y, b] : g.column(x)) out.add_to(y, x, b);
  return out;
}

Morphism neg(const Morphism& f) {
  Morphism out(f.source(), f.target());
  for (std::size_t x = 0; x < f.source().rank(); ++x)
    for (const auto& [y, a] : f.column(x)) out.set(y, x, f.ring().neg(a));
  return out;
}

Morphism sub(const Morphism& f, const Morphism& g) { return add(f, neg(g)); }

Morphism scale(const Scalar& r, const Morphism& f) {
  Morphism out(f.source(), f.target());
  for (std::size_t x = 0; x < f.source().rank(); ++x)
    for (const auto& [y, a] : f.column(x)) out.set(y, x, f.ring().mul(r, a));
  return out;
}

Morphism block(const Morphism& f, const BasedModule& source, const BasedModule& target) {
  Morphism out(source, target);
  for (std::size_t c = 0; c < source.rank(); ++c) {
    const auto& label = source.basis()[c];
    if (!f.source().contains(label)) continue;
    for (const auto& [r, v] : f.column(f.source().index(label))) {
      const auto& row = f.target().basis()[r];
      if (target.contains(row)) out.set(target.index(row), c, v);
    }
  }
  return out;
}

Morphism relabel(const Morphism& f, const BasedModule& source, const BasedModule& target) {
  if (source.rank() != f.source().rank() || target.rank() != f.target().rank())
    throw Error(ErrorKind::ShapeMismatch, "relabel with different ranks");
  Morphism out(source, target);
  for (std::size_t x = 0; x < source.rank(); ++x)
    for (const auto& [y, v] : f.column(x)) out.set(y, x, v);
  return out;
}

Morphism block2(const BasedModule& s1, const BasedModule& s2, const BasedModule& t1,
                const BasedModule& t2, const Morphism* a, const Morphism* b, const Morphism* c,
                const Morphism* d) {
  const BasedModule s = direct_sum(s1, s2);
  const BasedModule t = direct_sum(t1, t2);
  Morphism out(s, t);
  auto put = [&](const Morphism* m, const BasedModule& ms, const BasedModule& mt, std::size_t col0,
                 std::size_t row0) {
    if (!m) return;
    if (m->source() != ms || m->target() != mt)
      throw Error(ErrorKind::ShapeMismatch, "block does not match its summands");
    for (std::size_t x = 0; x < ms.rank(); ++x)
      for (const auto& [y, v] : m->column(x)) out.set(row0 + y, col0 + x, v);
  };
  put(a, s1, t1, 0, 0);
  put(b, s2, t1, s1.rank(), 0);
  put(c, s1, t2, 0, t1.rank());
  put(d, s2, t2, s1.rank(), t1.rank());
  return out;
}

Morphism summand_block(const Morphism& f, const BasedModule& s1, const BasedModule& s2,
                       const BasedModule& t1, const BasedModule& t2, bool first_source,
                       bool first_target) {
  if (f.source().rank() != s1.rank() + s2.rank() || f.target().rank() != t1.rank() + t2.rank())
    throw Error(ErrorKind::ShapeMismatch, "morphism is not between the given sums");
  const BasedModule& s = first_source ? s1 : s2;
  const BasedModule& t = first_target ? t1 : t2;
  const std::size_t col0 = first_source ? 0 : s1.rank();
  const std::size_t row0 = first_target ? 0 : t1.rank();
  Morphism out(s, t);
  for (std::size_t x = 0; x < s.rank(); ++x)
    for (const auto& [y, v] : f.column(col0 + x))
      if (y >= row0 && y < row0 + t.rank()) out.set(y - row0, x, v);
  return out;
}

namespace {

// Magnitude used by Euclidean reduction over Z and Z/n.
Integer magnitude(const Scalar& s) {
  if (s.is_zero()) return 0;
  Integer v = s.terms()[0].second;
  return v < 0 ? Integer(-v) : v;
}

using Row = std::vector<Scalar>;

void row_axpy(const Ring& ring, Row& target, const Scalar& a, const Row& source) {
  for (std::size_t j = 0; j < target.size(); ++j)
    if (!source[j].is_zero()) target[j] = ring.sub(target[j], ring.mul(a, source[j]));
}

}  // namespace

std::optional<Morphism> try_invert(const Morphism& f) {
  const Ring& ring = f.ring();
  const std::size_t n = f.source().rank();
  if (f.target().rank() != n) return std::nullopt;
  const bool euclid = ring.kind() == RingKind::Integers || ring.kind() == RingKind::IntegersMod;
  // Augmented rows [A | I], rows indexed by target, columns by source then target.
  std::vector<Row> m(n, Row(2 * n));
  const DenseMatrix dense = f.to_dense();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r][c] = dense[r][c];
    m[r][n + r] = ring.one();
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::optional<std::size_t> pivot;
    for (;;) {
      for (std::size_t r = k; r < n; ++r)
        if (!m[r][k].is_zero() && ring.try_invert(m[r][k])) {
          pivot = r;
          break;
        }
      if (pivot || !euclid) break;
      // Euclidean step: reduce every other row by the smallest nonzero entry.
      std::optional<std::size_t> small;
      for (std::size_t r = k; r < n; ++r)
        if (!m[r][k].is_zero() && (!small || magnitude(m[r][k]) < magnitude(m[*small][k]))) small = r;
      if (!small) return std::nullopt;
      bool changed = false;
      const Integer p = m[*small][k].terms()[0].second;
      for (std::size_t r = k; r < n; ++r) {
        if (r == *small || m[r][k].is_zero()) continue;
        const Integer q = m[r][k].terms()[0].second / p;
        if (q == 0) continue;
        row_axpy(ring, m[r], ring.from_integer(q), m[*small]);
        changed = true;
      }
      if (!changed) return std::nullopt;
    }
    if (!pivot) return std::nullopt;
    std::swap(m[k], m[*pivot]);
    const Scalar inv = ring.invert_unit(m[k][k]);
    for (auto& v : m[k]) v = ring.mul(inv, v);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k || m[r][k].is_zero()) continue;
      const Scalar a = m[r][k];
      row_axpy(ring, m[r], a, m[k]);
    }
  }
  // The right block is the inverse: rows indexed by source, columns by target.
  Morphism inv(f.target(), f.source());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (!m[r][n + c].is_zero()) inv.set(r, c, m[r][n + c]);
  if (compose(f, inv) != Morphism::identity(f.source()) ||
      compose(inv, f) != Morphism::identity(f.target()))
    return std::nullopt;
  return inv;
}

BaseFunction is_U_diagonal(const Morphism& f, UnitKind u) {
  BaseFunction base;
  std::set<std::size_t> used;
  for (std::size_t x = 0; x < f.source().rank(); ++x) {
    const auto& col = f.column(x);
    if (col.empty()) continue;
    if (col.size() > 1)
      throw Error(ErrorKind::NotDiagonal, "column " + f.source().basis()[x] + " has " +
                                              std::to_string(col.size()) + " entries");
    const auto& [y, v] = *col.begin();
    if (!f.ring().in_unit_subgroup(v, u))
      throw Error(ErrorKind::CoefficientOutsideU, describe_entry(f, y, x));
    if (!used.insert(y).second)
      throw Error(ErrorKind::NotDiagonal, "target " + f.target().basis()[y] + " hit twice");
    base[f.source().basis()[x]] = f.target().basis()[y];
  }
  return base;
}

TriangularDecomposition decompose_triangular(const Morphism& f, const Poset& target_order,
                                             UnitKind u, const Poset* source_order) {
  const Ring& ring = f.ring();
  const BasedModule& tgt = f.target();
  std::vector<std::size_t> pos(tgt.rank());
  for (std::size_t i = 0; i < tgt.rank(); ++i) pos[i] = target_order.index(tgt.basis()[i]);
  if (!source_order && f.source() == f.target()) source_order = &target_order;

  TriangularDecomposition d{Morphism(f.source(), f.target()), Morphism(f.source(), f.target()), {}, u};
  std::map<std::size_t, std::size_t> hit;  // target row -> source column
  for (std::size_t x = 0; x < f.source().rank(); ++x) {
    const auto& col = f.column(x);
    if (col.empty()) continue;
    // The diagonal target is the unique minimum of the column support; every
    // other entry must lie strictly above it.
    std::optional<std::size_t> m;
    for (const auto& [y, v] : col) {
      bool minimal = true;
      for (const auto& [z, w] : col)
        if (z != y && !target_order.less(pos[y], pos[z])) {
          minimal = false;
          break;
        }
      if (minimal) {
        m = y;
        break;
      }
    }
    if (!m) {
      // Report an entry that is not above some other entry of the column.
      for (const auto& [y, v] : col)
        for (const auto& [z, w] : col)
          if (z != y && !target_order.less(pos[z], pos[y]) && !target_order.less(pos[y], pos[z]))
            throw Error(ErrorKind::NotTriangular, "incomparable entries " + describe_entry(f, y, x) +
                                                      " and " + describe_entry(f, z, x));
      throw Error(ErrorKind::NotTriangular, "column " + f.source().basis()[x] + " has no minimum");
    }
    const Scalar& c = col.at(*m);
    if (!ring.in_unit_subgroup(c, u))
      throw Error(ErrorKind::NotTriangular,
                  "diagonal coefficient outside U: " + describe_entry(f, *m, x));
    auto [it, fresh] = hit.emplace(*m, x);
    if (!fresh) {
      // Two columns share a diagonal target: the entry of the later column is decreasing.
      throw Error(ErrorKind::NotTriangular,
                  "decreasing entry " + describe_entry(f, *m, x) + " (target already hit by " +
                      f.source().basis()[it->second] + ")");
    }
    d.diagonal.set(*m, x, c);
    for (const auto& [y, v] : col)
      if (y != *m) d.increasing.set(y, x, v);
    d.base[f.source().basis()[x]] = tgt.basis()[*m];
  }
  if (source_order) {
    for (const auto& [a, ha] : d.base)
      for (const auto& [b, hb] : d.base)
        if (source_order->less(a, b) && !target_order.less(ha, hb))
          throw Error(ErrorKind::NotTriangular, "base function reverses " + a + " < " + b + " (" +
                                                    ha + ", " + hb + ")");
  }
  return d;
}

namespace {

// Inverse of an invertible diagonal part, as a morphism target -> source.
Morphism invert_diagonal(const TriangularDecomposition& d) {
  const Morphism& h = d.diagonal;
  if (h.source().rank() != h.target().rank() || d.base.size() != h.source().rank())
    throw Error(ErrorKind::DiagonalNotInvertible,
                "base function is not a bijection (" + std::to_string(d.base.size()) + " of " +
                    std::to_string(h.target().rank()) + " targets hit)");
  Morphism inv(h.target(), h.source());
  for (std::size_t x = 0; x < h.source().rank(); ++x)
    for (const auto& [y, c] : h.column(x)) {
      auto ci = h.ring().try_invert(c);
      if (!ci) throw Error(ErrorKind::DiagonalNotInvertible, "not a unit: " + describe_entry(h, y, x));
      inv.set(x, y, *ci);
    }
  return inv;
}

}  // namespace

Morphism invert_triangular(const TriangularDecomposition& d) {
  const Morphism hinv = invert_diagonal(d);
  // t = -h^-1 u, an endomorphism of the source; nilpotent for a finite order.
  const Morphism t = neg(compose(d.increasing, hinv));
  Morphism power = Morphism::identity(t.source());
  Morphism sum = power;
  for (std::size_t i = 0; i <= t.source().rank(); ++i) {
    power = compose(power, t);
    if (power.is_zero()) return compose(hinv, sum);
    sum = add(sum, power);
  }
  throw Error(ErrorKind::NotTriangular, "increasing part is not nilpotent");
}

ElementaryFactorization factor_elementary(const TriangularDecomposition& d) {
  const Morphism hinv = invert_diagonal(d);
  // f diag^-1 = 1 + u with u an endomorphism of the target.
  const Morphism u = compose(hinv, d.increasing);
  const BasedModule& D = u.source();
  const std::size_t n = D.rank();
  std::vector<std::size_t> layer(n, 0);
  std::size_t placed = 0;
  std::size_t level = 0;
  while (placed < n) {
    ++level;
    std::vector<std::size_t> fresh;
    for (std::size_t x = 0; x < n; ++x) {
      if (layer[x]) continue;
      bool inside = true;
      for (const auto& [y, v] : u.column(x))
        if (!layer[y] || layer[y] >= level) {
          inside = false;
          break;
        }
      if (inside) fresh.push_back(x);
    }
    if (fresh.empty()) throw Error(ErrorKind::NotTriangular, "increasing part is not nilpotent");
    for (std::size_t x : fresh) layer[x] = level;
    placed += fresh.size();
  }
  ElementaryFactorization out{{}, {}, d.diagonal};
  for (std::size_t i = 1; i <= level; ++i) {
    Morphism alpha(D, D);
    for (std::size_t x = 0; x < n; ++x)
      if (layer[x] == i)
        for (const auto& [y, v] : u.column(x)) alpha.set(y, x, v);
    if (alpha.is_zero()) continue;
    out.alphas.push_back(std::move(alpha));
    out.layers.push_back(i);
  }
  return out;
}

Morphism reassemble(const ElementaryFactorization& e) {
  Morphism acc = e.diagonal;
  for (const auto& alpha : e.alphas)
    acc = compose(acc, add(Morphism::identity(alpha.source()), alpha));
  return acc;
}

}  // namespace ctrlk
