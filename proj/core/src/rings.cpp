#include "ctrlk/rings.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ctrlk {

using Rational = boost::multiprecision::cpp_rational;

struct Ring::Impl {
  RingKind kind = RingKind::Integers;
  Integer modulus = 0;
  std::vector<std::vector<int>> table;
  std::int64_t identity = 0;
  std::vector<int> inverse;
};

namespace {

Integer mod_reduce(const Integer& x, const Integer& n) {
  Integer r = x % n;
  if (r < 0) r += n;
  return r;
}

// Extended Euclid; returns g = gcd(a, b) with a*s + b*t = g.
Integer ext_gcd(Integer a, Integer b, Integer& s, Integer& t) {
  Integer s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (b != 0) {
    Integer q = a / b;
    Integer r = a - q * b;
    a = b;
    b = r;
    Integer ns = s0 - q * s1;
    s0 = s1;
    s1 = ns;
    Integer nt = t0 - q * t1;
    t0 = t1;
    t1 = nt;
  }
  s = s0;
  t = t0;
  return a;
}

}  // namespace

Ring Ring::integers() {
  auto impl = std::make_shared<Impl>();
  impl->kind = RingKind::Integers;
  return Ring(std::move(impl));
}

Ring Ring::integers_mod(const Integer& n) {
  if (n < 2) throw Error(ErrorKind::InvalidRing, "modulus must be at least 2");
  auto impl = std::make_shared<Impl>();
  impl->kind = RingKind::IntegersMod;
  impl->modulus = n;
  return Ring(std::move(impl));
}

Ring Ring::group_ring(std::vector<std::vector<int>> table) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw Error(ErrorKind::InvalidRing, "empty multiplication table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorKind::InvalidRing, "multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n) throw Error(ErrorKind::InvalidRing, "table entry out of range");
  }
  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = table[e][a] == a && table[a][e] == a;
    if (ok) identity = e;
  }
  if (identity < 0) throw Error(ErrorKind::InvalidRing, "no identity element");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw Error(ErrorKind::InvalidRing, "table is not associative at (" + std::to_string(a) +
                                                  "," + std::to_string(b) + "," +
                                                  std::to_string(c) + ")");
  std::vector<int> inverse(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table[a][b] == identity && table[b][a] == identity) inverse[a] = b;
  for (int a = 0; a < n; ++a)
    if (inverse[a] < 0)
      throw Error(ErrorKind::InvalidRing, "element " + std::to_string(a) + " has no inverse");
  auto impl = std::make_shared<Impl>();
  impl->kind = RingKind::GroupRing;
  impl->table = std::move(table);
  impl->identity = identity;
  impl->inverse = std::move(inverse);
  return Ring(std::move(impl));
}

Ring Ring::laurent() {
  auto impl = std::make_shared<Impl>();
  impl->kind = RingKind::Laurent;
  return Ring(std::move(impl));
}

RingKind Ring::kind() const noexcept { return impl_->kind; }
const Integer& Ring::modulus() const noexcept { return impl_->modulus; }
const std::vector<std::vector<int>>& Ring::table() const noexcept { return impl_->table; }
std::int64_t Ring::identity_key() const noexcept { return impl_->identity; }

std::int64_t Ring::combine(std::int64_t a, std::int64_t b) const {
  switch (impl_->kind) {
    case RingKind::Integers:
    case RingKind::IntegersMod:
      return 0;
    case RingKind::GroupRing:
      return impl_->table[a][b];
    case RingKind::Laurent:
      return a + b;
  }
  return 0;
}

std::int64_t Ring::inverse_key(std::int64_t a) const {
  switch (impl_->kind) {
    case RingKind::GroupRing:
      return impl_->inverse[a];
    case RingKind::Laurent:
      return -a;
    default:
      return 0;
  }
}

Scalar Ring::normalized(std::vector<Scalar::Term> terms) const {
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  Scalar out;
  for (auto& [key, coeff] : terms) {
    if (!out.terms_.empty() && out.terms_.back().first == key) {
      out.terms_.back().second += coeff;
    } else {
      out.terms_.emplace_back(key, std::move(coeff));
    }
  }
  const bool modular = impl_->kind == RingKind::IntegersMod;
  std::erase_if(out.terms_, [&](auto& term) {
    if (modular) term.second = mod_reduce(term.second, impl_->modulus);
    return term.second == 0;
  });
  return out;
}

Scalar Ring::one() const { return monomial(identity_key(), 1); }

Scalar Ring::from_integer(const Integer& n) const { return monomial(identity_key(), n); }

Scalar Ring::monomial(std::int64_t key, const Integer& coeff) const {
  if (impl_->kind == RingKind::GroupRing &&
      (key < 0 || key >= static_cast<std::int64_t>(impl_->table.size())))
    throw Error(ErrorKind::InvalidRing, "group element " + std::to_string(key) + " out of range");
  if ((impl_->kind == RingKind::Integers || impl_->kind == RingKind::IntegersMod) && key != 0)
    throw Error(ErrorKind::InvalidRing, "nonzero group key in a ring without group");
  return normalized({{key, coeff}});
}

Scalar Ring::add(const Scalar& a, const Scalar& b) const {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  std::vector<Scalar::Term> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return normalized(std::move(terms));
}

Scalar Ring::neg(const Scalar& a) const {
  std::vector<Scalar::Term> terms = a.terms_;
  for (auto& term : terms) term.second = -term.second;
  return normalized(std::move(terms));
}

Scalar Ring::sub(const Scalar& a, const Scalar& b) const { return add(a, neg(b)); }

Scalar Ring::mul(const Scalar& a, const Scalar& b) const {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Scalar::Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) terms.emplace_back(combine(ka, kb), ca * cb);
  return normalized(std::move(terms));
}

bool Ring::is_one(const Scalar& a) const { return a == one(); }

bool Ring::is_minus_one(const Scalar& a) const { return a == neg(one()); }

std::optional<Scalar> Ring::try_invert(const Scalar& a) const {
  if (a.is_zero()) return std::nullopt;
  switch (impl_->kind) {
    case RingKind::Integers:
      if (is_one(a) || is_minus_one(a)) return a;
      return std::nullopt;
    case RingKind::IntegersMod: {
      Integer s, t;
      const Integer g = ext_gcd(a.terms_[0].second, impl_->modulus, s, t);
      if (g != 1) return std::nullopt;
      return from_integer(s);
    }
    case RingKind::Laurent:
      if (a.terms_.size() == 1 && (a.terms_[0].second == 1 || a.terms_[0].second == -1))
        return monomial(-a.terms_[0].first, a.terms_[0].second);
      return std::nullopt;
    case RingKind::GroupRing:
      break;
  }
  if (a.terms_.size() == 1 && (a.terms_[0].second == 1 || a.terms_[0].second == -1))
    return monomial(inverse_key(a.terms_[0].first), a.terms_[0].second);

  // Solve a*s = 1 through the left regular representation over Q.
  const int n = static_cast<int>(impl_->table.size());
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1, Rational(0)));
  for (const auto& [key, coeff] : a.terms_)
    for (int b = 0; b < n; ++b) m[impl_->table[key][b]][b] += Rational(coeff);
  m[impl_->identity][n] = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (m[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) return std::nullopt;
    std::swap(m[col], m[pivot]);
    const Rational p = m[col][col];
    for (auto& v : m[col]) v /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational factor = m[r][col];
      for (int c = col; c <= n; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  std::vector<Scalar::Term> terms;
  for (int b = 0; b < n; ++b) {
    const Rational& v = m[b][n];
    if (boost::multiprecision::denominator(v) != 1) return std::nullopt;
    terms.emplace_back(b, boost::multiprecision::numerator(v));
  }
  Scalar s = normalized(std::move(terms));
  if (!is_one(mul(a, s)) || !is_one(mul(s, a))) return std::nullopt;
  return s;
}

Scalar Ring::invert_unit(const Scalar& a) const {
  auto inv = try_invert(a);
  if (!inv) throw Error(ErrorKind::NotAUnit, to_string(a));
  return *inv;
}

bool Ring::in_unit_subgroup(const Scalar& a, UnitKind u) const {
  switch (u) {
    case UnitKind::One:
      return is_one(a);
    case UnitKind::PlusMinusOne:
      return is_one(a) || is_minus_one(a);
    case UnitKind::PlusMinusGroup:
      return a.terms_.size() == 1 && (a.terms_[0].second == 1 || is_minus_one(monomial(identity_key(), a.terms_[0].second)));
    case UnitKind::AllUnits:
      return try_invert(a).has_value();
  }
  return false;
}

std::string Ring::to_string(const Scalar& a) const {
  if (a.is_zero()) return "0";
  std::ostringstream out;
  const bool plain = impl_->kind == RingKind::Integers || impl_->kind == RingKind::IntegersMod;
  bool first = true;
  for (const auto& [key, coeff] : a.terms_) {
    if (!first) out << " + ";
    first = false;
    if (plain) {
      out << coeff;
    } else if (impl_->kind == RingKind::Laurent) {
      out << coeff << "*t^" << key;
    } else {
      out << coeff << "*g" << key;
    }
  }
  return out.str();
}

std::string Ring::describe() const {
  switch (impl_->kind) {
    case RingKind::Integers: return "Z";
    case RingKind::IntegersMod: return "Z/" + impl_->modulus.str();
    case RingKind::GroupRing: return "Z[G" + std::to_string(impl_->table.size()) + "]";
    case RingKind::Laurent: return "Z[t,1/t]";
  }
  return "?";
}

bool operator==(const Ring& a, const Ring& b) {
  if (a.impl_ == b.impl_) return true;
  return a.impl_->kind == b.impl_->kind && a.impl_->modulus == b.impl_->modulus &&
         a.impl_->table == b.impl_->table;
}

DenseMatrix identity_matrix(const Ring& ring, std::size_t n) {
  DenseMatrix m(n, std::vector<Scalar>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = ring.one();
  return m;
}

DenseMatrix multiply(const Ring& ring, const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t rows = a.size();
  const std::size_t inner = b.size();
  const std::size_t cols = inner == 0 ? 0 : b[0].size();
  DenseMatrix out(rows, std::vector<Scalar>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i].size() != inner) throw Error(ErrorKind::ShapeMismatch, "dense multiply");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j)
        out[i][j] = ring.add(out[i][j], ring.mul(a[i][k], b[k][j]));
    }
  }
  return out;
}

namespace {

Integer plain_value(const Scalar& s) { return s.is_zero() ? Integer(0) : s.terms()[0].second; }

// Fraction-free (Bareiss) determinant of an integer matrix.
Integer bareiss_det(std::vector<std::vector<Integer>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace

DenseMatrix ring_matrix_inverse_oracle(const Ring& ring, const DenseMatrix& m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw Error(ErrorKind::ShapeMismatch, "oracle needs a square matrix");
  if (ring.kind() == RingKind::Integers) {
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational(plain_value(m[i][j]));
      a[i][n + i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && a[pivot][col] == 0) ++pivot;
      if (pivot == n) throw Error(ErrorKind::Singular, "zero column in elimination");
      std::swap(a[col], a[pivot]);
      const Rational p = a[col][col];
      for (auto& v : a[col]) v /= p;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col] == 0) continue;
        const Rational factor = a[r][col];
        for (std::size_t c = 0; c < 2 * n; ++c) a[r][c] -= factor * a[col][c];
      }
    }
    DenseMatrix out(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Rational& v = a[i][n + j];
        if (boost::multiprecision::denominator(v) != 1)
          throw Error(ErrorKind::Singular, "inverse is not integral");
        out[i][j] = ring.from_integer(boost::multiprecision::numerator(v));
      }
    return out;
  }
  if (ring.kind() == RingKind::IntegersMod) {
    std::vector<std::vector<Integer>> lifted(n, std::vector<Integer>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) lifted[i][j] = plain_value(m[i][j]);
    const auto det_inv = ring.try_invert(ring.from_integer(bareiss_det(lifted)));
    if (!det_inv) throw Error(ErrorKind::Singular, "determinant is not a unit");
    DenseMatrix out(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        // adj(m)[i][j] = (-1)^{i+j} det(minor with row j and column i removed)
        std::vector<std::vector<Integer>> minor;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == j) continue;
          std::vector<Integer> row;
          for (std::size_t c = 0; c < n; ++c)
            if (c != i) row.push_back(lifted[r][c]);
          minor.push_back(std::move(row));
        }
        Integer cof = bareiss_det(std::move(minor));
        if ((i + j) % 2 == 1) cof = -cof;
        out[i][j] = ring.mul(*det_inv, ring.from_integer(cof));
      }
    return out;
  }
  throw Error(ErrorKind::InvalidRing, "oracle supports Z and Z/n only");
}

}  // namespace ctrlk
