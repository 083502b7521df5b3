#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "ctrlk/ksimplex.hpp"
#include "geometric_gen.hpp"
#include "ksimplex_gen.hpp"

using namespace ctrlk;

namespace {

Ring Z = Ring::integers();

DenseMatrix dense(const Ring& r, std::vector<std::vector<int>> rows) {
  DenseMatrix out;
  for (const auto& row : rows) {
    out.emplace_back();
    for (int v : row) out.back().push_back(r.from_integer(v));
  }
  return out;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::InvalidInput;
}

std::string failure(const Report& r) {
  const auto* c = r.first_failure();
  return c ? c->name + " [" + c->witness + "]" : "";
}

// Products g_j g_i^-1 for j > i, computed with the dense oracle.
std::vector<DenseMatrix> products(const VolodinPath& v) {
  std::vector<DenseMatrix> out;
  for (std::size_t i = 0; i < v.matrices.size(); ++i) {
    const DenseMatrix inv = ring_matrix_inverse_oracle(v.ring, v.matrices[i]);
    for (std::size_t j = i + 1; j < v.matrices.size(); ++j) out.push_back(multiply(v.ring, v.matrices[j], inv));
  }
  return out;
}

// Does the total order `pos` make every product 1-triangular?
bool total_order_works(const Ring& r, const std::vector<DenseMatrix>& ps, const std::vector<int>& pos) {
  for (const auto& p : ps)
    for (std::size_t y = 0; y < p.size(); ++y)
      for (std::size_t x = 0; x < p.size(); ++x) {
        if (x == y && !r.is_one(p[y][x])) return false;
        if (x != y && !p[y][x].is_zero() && pos[x] > pos[y]) return false;
      }
  return true;
}

bool brute_force(const VolodinPath& v) {
  const auto ps = products(v);
  std::vector<int> pos(v.k);
  std::iota(pos.begin(), pos.end(), 0);
  do {
    if (total_order_works(v.ring, ps, pos)) return true;
  } while (std::next_permutation(pos.begin(), pos.end()));
  return false;
}

bool order_works(const Ring& r, const std::vector<DenseMatrix>& ps, const Poset& order) {
  const auto basis = order.elements();
  for (const auto& p : ps)
    for (std::size_t y = 0; y < p.size(); ++y)
      for (std::size_t x = 0; x < p.size(); ++x) {
        if (x == y && !r.is_one(p[y][x]) && !r.is_minus_one(p[y][x])) return false;
        if (x != y && !p[y][x].is_zero() && !order.less("e" + std::to_string(x + 1), "e" + std::to_string(y + 1)))
          return false;
      }
  return true;
}

K1Simplex two_simplex(const K1Simplex& s) {
  K1Simplex out = s;
  out.complexes.push_back(s.complexes[1]);
  out.orders.push_back(s.orders[1]);
  out.maps.emplace(std::make_pair(1, 2), identity_map(s.complexes[1].complex));
  out.maps.emplace(std::make_pair(0, 2), s.map(0, 1));
  return out;
}

K1Morphism identity_morphism(const K1Simplex& s) {
  K1Morphism f{s, s, {}};
  for (int i = 0; i <= s.dimension(); ++i)
    for (int j = i; j <= s.dimension(); ++j) f.maps.emplace(std::make_pair(i, j), s.map(i, j));
  return f;
}

}  // namespace

TEST(Volodin, TwoStepPathGivesChain) {
  VolodinPath v{Z, 2, {identity_matrix(Z, 2), dense(Z, {{1, 0}, {1, 1}})}};
  const Poset p = volodin_check(v);
  EXPECT_TRUE(p.less("e1", "e2"));
  EXPECT_FALSE(p.less("e2", "e1"));
}

TEST(Volodin, ConflictingStepsHaveNoOrder) {
  VolodinPath v{Z, 2, {identity_matrix(Z, 2), dense(Z, {{1, 1}, {0, 1}}), dense(Z, {{1, 0}, {1, 1}})}};
  EXPECT_EQ(kind_of([&] { volodin_check(v); }), ErrorKind::NoOrderExists);
}

TEST(Volodin, ConstantPathGivesAntichain) {
  const DenseMatrix g = dense(Z, {{2, 1}, {1, 1}});
  VolodinPath v{Z, 2, {g, g, g}};
  EXPECT_TRUE(volodin_check(v).relations().empty());
}

TEST(Volodin, SingularAndBadDiagonal) {
  EXPECT_EQ(kind_of([&] { volodin_check({Z, 2, {dense(Z, {{1, 1}, {1, 1}})}}); }), ErrorKind::NotInvertible);
  VolodinPath minus{Z, 1, {dense(Z, {{1}}), dense(Z, {{-1}})}};
  EXPECT_EQ(kind_of([&] { volodin_check(minus); }), ErrorKind::DiagonalNotOne);
  minus.mode = SignMode::PlusMinus;
  EXPECT_NO_THROW(volodin_check(minus));
  EXPECT_EQ(kind_of([&] { volodin_check({Z, 2, {dense(Z, {{1, 0}})}}); }), ErrorKind::ShapeMismatch);
}

TEST(Volodin, AgreesWithPermutationSearch) {
  gen::Rng rng(gen::seed());
  int found = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Ring r = trial % 3 == 0 ? Ring::integers_mod(7) : Z;
    const VolodinPath v = gen::volodin_noise(r, rng, gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 4));
    bool ok = true;
    try {
      const Poset p = volodin_check(v);
      EXPECT_TRUE(order_works(r, products(v), p));
    } catch (const Error& e) {
      ok = false;
      EXPECT_TRUE(e.kind() == ErrorKind::NoOrderExists || e.kind() == ErrorKind::DiagonalNotOne) << e.what();
    }
    EXPECT_EQ(ok, brute_force(v)) << "trial " << trial;
    found += ok;
  }
  EXPECT_GT(found, 0);
  EXPECT_LT(found, 300);
}

TEST(Volodin, PlantedOrdersAreFound) {
  gen::Rng rng(gen::seed() + 1);
  for (int trial = 0; trial < 40; ++trial) {
    const VolodinPath v = gen::volodin_path(Z, rng, gen::uniform(rng, 1, 5), gen::uniform(rng, 1, 4), SignMode::One);
    const Poset p = volodin_check(v);
    EXPECT_TRUE(order_works(Z, products(v), p));
  }
}

TEST(Volodin, FixSignsExample) {
  VolodinPath v{Z, 2, {identity_matrix(Z, 2), dense(Z, {{-1, 0}, {0, 1}}), identity_matrix(Z, 2)}, SignMode::PlusMinus};
  const VolodinPath f = fix_signs(v, true);
  EXPECT_EQ(f.mode, SignMode::One);
  ASSERT_EQ(f.matrices.size(), 3u);
  for (const auto& m : f.matrices) EXPECT_EQ(m, identity_matrix(Z, 2));
}

TEST(Volodin, FixSignsGivesModeOnePaths) {
  gen::Rng rng(gen::seed() + 2);
  for (int trial = 0; trial < 40; ++trial) {
    const VolodinPath v = gen::volodin_path(Z, rng, gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 4), SignMode::PlusMinus);
    const VolodinPath f = fix_signs(v, false);
    EXPECT_EQ(f.mode, SignMode::One);
    EXPECT_GE(f.matrices.size(), v.matrices.size());
    EXPECT_LE(f.matrices.size(), v.matrices.size() + 1);
    VolodinPath prefix = f;
    prefix.matrices.resize(v.matrices.size());
    EXPECT_NO_THROW(volodin_check(prefix));
    if (f.matrices.size() > v.matrices.size()) EXPECT_EQ(f.matrices.back(), identity_matrix(Z, v.k));
    // Each g_i changes only by row signs.
    for (std::size_t i = 0; i < v.matrices.size(); ++i)
      for (std::size_t row = 0; row < v.matrices[i].size(); ++row) {
        const bool same = f.matrices[i][row] == v.matrices[i][row];
        DenseMatrix neg = dense(Z, {std::vector<int>(v.k, 0)});
        for (int c = 0; c < v.k; ++c) neg[0][c] = Z.neg(v.matrices[i][row][c]);
        EXPECT_TRUE(same || f.matrices[i][row] == neg[0]);
      }
  }
}

TEST(Volodin, FixSignsKeepsPositivePaths) {
  gen::Rng rng(gen::seed() + 3);
  VolodinPath v = gen::volodin_path(Z, rng, 3, 3, SignMode::One);
  v.mode = SignMode::PlusMinus;
  const VolodinPath f = fix_signs(v, false);
  EXPECT_EQ(f.matrices, v.matrices);
  v.mode = SignMode::One;
  EXPECT_EQ(fix_signs(v, false).matrices, v.matrices);
}

TEST(Volodin, FixSignsRejectsOpenLoops) {
  VolodinPath v{Z, 1, {dense(Z, {{1}}), dense(Z, {{-1}})}, SignMode::PlusMinus};
  EXPECT_EQ(kind_of([&] { fix_signs(v, true); }), ErrorKind::InvalidInput);
  EXPECT_EQ(fix_signs(v, false).matrices.size(), 3u);
}

TEST(Volodin, ToK1IsValidAndFaceCompatible) {
  gen::Rng rng(gen::seed() + 4);
  for (int trial = 0; trial < 15; ++trial) {
    const SignMode mode = trial % 2 ? SignMode::PlusMinus : SignMode::One;
    const VolodinPath v = gen::volodin_path(Z, rng, gen::uniform(rng, 1, 4), gen::uniform(rng, 2, 4), mode);
    const K1Simplex s = volodin_to_k1(v);
    const Report r = validate_k1_simplex(s);
    ASSERT_TRUE(r.ok()) << failure(r);
    for (int j = 0; j <= s.dimension(); ++j) {
      const K1Simplex a = face(s, j), b = volodin_to_k1(face(v, j));
      ASSERT_EQ(a.dimension(), b.dimension());
      for (int i = 0; i <= a.dimension(); ++i) EXPECT_EQ(a.complexes[i].complex, b.complexes[i].complex);
      for (const auto& [key, m] : a.maps) {
        EXPECT_EQ(m.at(0), b.map(key.first, key.second).at(0));
        EXPECT_EQ(m.at(1), b.map(key.first, key.second).at(1));
      }
      EXPECT_TRUE(validate_k1_simplex(a).ok());
    }
  }
}

TEST(K1Simplex, InclusionsAreValid) {
  gen::Rng rng(gen::seed() + 5);
  for (int trial = 0; trial < 20; ++trial) {
    const Ring r = trial % 2 ? Ring::integers_mod(5) : Z;
    const K1Simplex s = gen::inclusion_simplex(r, rng, 3, 3);
    const Report rep = validate_k1_simplex(s);
    ASSERT_TRUE(rep.ok()) << failure(rep);
    EXPECT_TRUE(validate_k1_simplex(face(s, 0)).ok());
    EXPECT_TRUE(validate_k1_simplex(face(s, 1)).ok());
    const Report two = validate_k1_simplex(two_simplex(s));
    EXPECT_TRUE(two.ok()) << failure(two);
  }
}

TEST(K1Simplex, BrokenCertificatesFail) {
  gen::Rng rng(gen::seed() + 6);
  K1Simplex s = gen::inclusion_simplex(Z, rng, 2, 2);
  while (s.complexes[0].complex.module(0).rank() == s.complexes[1].complex.module(0).rank() ||
         s.complexes[0].complex.module(0).rank() == 0)
    s = gen::inclusion_simplex(Z, rng, 2, 2);
  K1Simplex flat = s;
  flat.orders[1][0] = antichain(s.complexes[1].complex.module(0).basis());
  const Report r = validate_k1_simplex(flat);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(failure(r).find("(2)"), std::string::npos) << failure(r);

  K1Simplex missing = s;
  missing.orders.pop_back();
  EXPECT_EQ(kind_of([&] { validate_k1_simplex(missing); }), ErrorKind::MissingCertificate);
  K1Simplex nomap = s;
  nomap.maps.clear();
  EXPECT_EQ(kind_of([&] { validate_k1_simplex(nomap); }), ErrorKind::MissingCertificate);

  K1Simplex scaled = s;
  ChainMap m = s.map(0, 1);
  m.set(0, scale(Z.from_integer(2), m.at(0)));
  scaled.maps.at({0, 1}) = m;
  EXPECT_FALSE(validate_k1_simplex(scaled).ok());
}

TEST(K1Simplex, NonInjectiveMapFails) {
  VolodinPath v{Z, 1, {dense(Z, {{1}}), dense(Z, {{1}})}};
  K1Simplex s = volodin_to_k1(v);
  ChainMap zero(s.complexes[0].complex, s.complexes[1].complex);
  s.maps.at({0, 1}) = zero;
  const Report r = validate_k1_simplex(s);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(failure(r).find("(1)"), std::string::npos) << failure(r);
}

TEST(K1Morphism, IdentityAndTriangulation) {
  gen::Rng rng(gen::seed() + 7);
  const K1Simplex s = two_simplex(gen::inclusion_simplex(Z, rng, 3, 2));
  const K1MorphismCheck c = validate_k1_morphism(identity_morphism(s));
  EXPECT_TRUE(c.report.ok()) << failure(c.report);
  ASSERT_EQ(c.triangulation.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(c.triangulation[k].dimension(), 3);
    EXPECT_EQ(c.triangulation[k].complexes[k].complex, s.complexes[k].complex);
    EXPECT_EQ(c.triangulation[k].complexes[k + 1].complex, s.complexes[k].complex);
  }
}

TEST(K1Morphism, MissingComponentIsReported) {
  gen::Rng rng(gen::seed() + 8);
  K1Morphism f = identity_morphism(gen::inclusion_simplex(Z, rng, 2, 2));
  f.maps.erase({0, 1});
  EXPECT_EQ(kind_of([&] { validate_k1_morphism(f); }), ErrorKind::MissingCertificate);
}

TEST(CancellationData, OutputsAreValid) {
  gen::Rng rng(gen::seed() + 9);
  for (int trial = 0; trial < 10; ++trial) {
    const K1Simplex s = trial % 3 == 2 ? volodin_to_k1(gen::volodin_path(Z, rng, 3, 3, SignMode::One))
                                       : gen::inclusion_simplex(trial % 2 ? Ring::integers_mod(3) : Z, rng, 2, 2);
    const CancellationData d = cancellation_data(s);
    const Report sum = validate_k1_simplex(d.sum), cone = validate_k1_simplex(d.cone);
    ASSERT_TRUE(sum.ok()) << failure(sum);
    ASSERT_TRUE(cone.ok()) << failure(cone);
    const auto m = validate_k1_morphism(d.morphism), i = validate_k1_morphism(d.inclusion);
    ASSERT_TRUE(m.report.ok()) << failure(m.report);
    ASSERT_TRUE(i.report.ok()) << failure(i.report);
  }
}

TEST(CancellationData, RejectsInvalidSimplex) {
  gen::Rng rng(gen::seed() + 10);
  K1Simplex s = gen::inclusion_simplex(Z, rng, 2, 2);
  s.maps.at({0, 1}) = ChainMap(s.complexes[0].complex, s.complexes[1].complex);
  if (s.complexes[0].complex.module(0).rank() + s.complexes[0].complex.module(1).rank() == 0) GTEST_SKIP();
  EXPECT_EQ(kind_of([&] { cancellation_data(s); }), ErrorKind::InvalidInput);
}

namespace {

K1Simplex cone_of_unit(const Ring& r) {
  const BasedModule m(r, {"e1"});
  ChainComplex c(r, {m, m});
  c.set_boundary(1, Morphism::identity(m));
  Contraction xi(c);
  xi.set(0, Morphism::identity(m));
  ChainComplex zero(r, {BasedModule(r), BasedModule(r)});
  K1Simplex s;
  s.complexes = {{zero, Contraction(zero)}, {c, xi}};
  s.orders = {{Poset(), Poset()}, {antichain({"e1"}), antichain({"e1"})}};
  s.maps.emplace(std::make_pair(0, 1), ChainMap(zero, c));
  return s;
}

}  // namespace

TEST(Stabilize, NothingToAdd) {
  gen::Rng rng(gen::seed() + 11);
  const K1Simplex s = volodin_to_k1(gen::volodin_path(Z, rng, 3, 2, SignMode::One));
  const Morphism phi(BasedModule(Z), s.complexes[1].complex.module(1));
  const K1Simplex t = stabilize_morphism(s, phi);
  ASSERT_EQ(t.dimension(), 2);
  const Report r = validate_k1_simplex(t);
  EXPECT_TRUE(r.ok()) << failure(r);
}

TEST(Stabilize, ZeroIntoCone) {
  for (const Ring& r : {Z, Ring::integers_mod(5)}) {
    const K1Simplex s = cone_of_unit(r);
    ASSERT_TRUE(validate_k1_simplex(s).ok()) << failure(validate_k1_simplex(s));
    const BasedModule rl(r, {"r1"});
    Morphism phi(rl, s.complexes[1].complex.module(1));
    phi.set(0, 0, r.from_integer(-1));
    const K1Simplex t = stabilize_morphism(s, phi);
    const Report rep = validate_k1_simplex(t);
    EXPECT_TRUE(rep.ok()) << failure(rep);
    EXPECT_EQ(t.complexes[1].complex.module(1).rank(), 1u);
  }
}

TEST(Stabilize, WrongComplementRank) {
  const K1Simplex s = cone_of_unit(Z);
  const BasedModule two(Z, {"r1", "r2"});
  Morphism phi(two, s.complexes[1].complex.module(1));
  phi.set(0, 0, Z.one());
  phi.set(0, 1, Z.one());
  EXPECT_EQ(kind_of([&] { stabilize_morphism(s, phi); }), ErrorKind::WrongComplementRank);
  const BasedModule one(Z, {"r1"});
  Morphism three(one, s.complexes[1].complex.module(1));
  three.set(0, 0, Z.from_integer(3));
  EXPECT_EQ(kind_of([&] { stabilize_morphism(s, three); }), ErrorKind::CoefficientOutsideU);
}

TEST(Controlled, LocatedRadius) {
  const ControlSpace x = gen::line(4);
  const BasedModule a(Z, {"a"}, {{"a", "p0"}}), b(Z, {"b"}, {{"b", "p3"}});
  Morphism f(a, b);
  EXPECT_DOUBLE_EQ(located_radius(f, x), 0.0);
  f.set(0, 0, Z.one());
  EXPECT_DOUBLE_EQ(located_radius(f, x), 3.0);
}
