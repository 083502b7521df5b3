#include <gtest/gtest.h>

#include "ctrlk/geometric.hpp"
#include "geometric_gen.hpp"

using namespace ctrlk;

namespace {

Ring Z = Ring::integers();

struct Line3 {
  ControlSpace x = gen::line(3);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a{Z, {"a"}, {{"a", "p0"}}};
  BasedModule b{Z, {"b"}, {{"b", "p1"}}};
  BasedModule c{Z, {"c"}, {{"c", "p2"}}};
};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST(GMorphism, CompositionMultipliesAndConcatenates) {
  Line3 l;
  GMorphism f(l.a, l.b, {{Z.from_integer(2), "a", "b", {"p0", "p1"}}});
  GMorphism g(l.b, l.c, {{Z.from_integer(3), "b", "c", {"p1", "p2"}}});
  GMorphism gf = gcompose(f, g);
  ASSERT_EQ(gf.paths().size(), 1u);
  EXPECT_EQ(gf.paths()[0].coeff, Z.from_integer(6));
  EXPECT_EQ(gf.paths()[0].via, (Samples{"p0", "p1", "p2"}));
  EXPECT_DOUBLE_EQ(gradius(l.rm, gf), 2.0);
  EXPECT_EQ(gf.algebraic().entry("c", "a"), Z.from_integer(6));
}

TEST(GMorphism, IdenticalPathsMergeAndCancel) {
  Line3 l;
  GMorphism f(l.a, l.b, {{Z.one(), "a", "b", {"p0", "p1"}}, {Z.from_integer(-1), "a", "b", {"p0", "p1"}}});
  EXPECT_TRUE(f.is_zero());
  GMorphism g(l.a, l.b, {{Z.one(), "a", "b", {"p0", "p1"}}, {Z.from_integer(-1), "a", "b", {"p0", "p1", "p2", "p1"}}});
  EXPECT_EQ(g.paths().size(), 2u);
  EXPECT_TRUE(g.algebraic().is_zero());
  EXPECT_TRUE(reduce_backtracks(g).is_zero());
}

TEST(GMorphism, RejectsPathsOffTheirBasisElements) {
  Line3 l;
  EXPECT_EQ(kind_of([&] { GMorphism(l.a, l.b, {{Z.one(), "a", "b", {"p0", "p2"}}}); }),
            ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([&] { GMorphism(l.a, l.b, {{Z.one(), "a", "zz", {"p0"}}}); }),
            ErrorKind::UnknownLabel);
  GMorphism f(l.a, l.b);
  GMorphism g(l.a, l.c);
  EXPECT_EQ(kind_of([&] { gcompose(f, g); }), ErrorKind::ModuleMismatch);
}

TEST(GMorphism, IdentityIsNeutral) {
  gen::Rng rng(gen::seed());
  ControlSpace x = gen::grid(3, 3);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule s = gen::over_points(Z, "s", x), t = gen::over_points(Z, "t", x);
  for (int k = 0; k < 20; ++k) {
    GMorphism f = gen::gmorphism(Z, rng, rm, s, t, 2);
    EXPECT_EQ(gcompose(GMorphism::identity(s), f), f);
    EXPECT_EQ(gcompose(f, GMorphism::identity(t)), f);
  }
}

TEST(GMorphism, CompositionIsAssociativeAndMatchesMatrices) {
  gen::Rng rng(gen::seed() + 1);
  ControlSpace x = gen::grid(3, 2);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a = gen::over_points(Z, "a", x), b = gen::over_points(Z, "b", x),
              c = gen::over_points(Z, "c", x), d = gen::over_points(Z, "d", x);
  for (int k = 0; k < 20; ++k) {
    GMorphism f = gen::gmorphism(Z, rng, rm, a, b, 2);
    GMorphism g = gen::gmorphism(Z, rng, rm, b, c, 2);
    GMorphism h = gen::gmorphism(Z, rng, rm, c, d, 1);
    EXPECT_EQ(gcompose(gcompose(f, g), h), gcompose(f, gcompose(g, h)));
    EXPECT_EQ(gcompose(f, g).algebraic(), compose(f.algebraic(), g.algebraic()));
    EXPECT_LE(gradius(rm, gcompose(f, g)), gradius(rm, f) + gradius(rm, g) + 1e-9);
  }
}

TEST(GMorphism, RestrictionIsFunctorial) {
  gen::Rng rng(gen::seed() + 2);
  ControlSpace x = gen::grid(4, 3);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a = gen::over_points(Z, "a", x), b = gen::over_points(Z, "b", x),
              c = gen::over_points(Z, "c", x);
  for (int k = 0; k < 30; ++k) {
    PointSet y;
    for (const auto& p : x.points())
      if (gen::coin(rng, 0.6)) y.insert(p);
    GMorphism f = gen::gmorphism(Z, rng, rm, a, b, 2);
    GMorphism g = gen::gmorphism(Z, rng, rm, b, c, 2);
    EXPECT_EQ(grestrict(rm, gcompose(f, g), y), gcompose(grestrict(rm, f, y), grestrict(rm, g, y)));
    const GMorphism fy = grestrict(rm, f, y);
    for (const auto& p : fy.paths())
      for (const auto& s : p.via) EXPECT_TRUE(y.count(s));
  }
}

TEST(GMorphism, ProjectionMeasuresRadiusInX) {
  ControlSpace e = ControlSpace::graph({"u0", "u1", "v0", "v1"},
                                       {{"u0", "u1", 1}, {"v0", "v1", 1}, {"u1", "v0", 1}});
  ControlSpace x = gen::line(2);
  ReferenceMap rm(e, x, {{"u0", "p0"}, {"u1", "p0"}, {"v0", "p1"}, {"v1", "p1"}});
  EXPECT_DOUBLE_EQ(gradius(rm, Samples{"u0", "u1"}), 0.0);
  EXPECT_DOUBLE_EQ(gradius(rm, Samples{"u0", "u1", "v0"}), 1.0);
  EXPECT_EQ(kind_of([&] { ReferenceMap(e, x, {{"u0", "p0"}}); }), ErrorKind::UnknownPoint);
}

TEST(Homotopy, ConstantAndReversedTracks) {
  Line3 l;
  BasedModule a2{Z, {"a"}, {{"a", "p0"}}};
  GMorphism f(l.a, a2, {{Z.one(), "a", "a", {"p0", "p1", "p0"}}});
  EXPECT_EQ(apply_homotopy(l.rm, f, constant_homotopy(f)), f);
  GHomotopy h = backtrack_homotopy(f);
  GMorphism g = apply_homotopy(l.rm, f, h);
  EXPECT_EQ(g, GMorphism::identity(l.a));
  EXPECT_DOUBLE_EQ(gradius(l.rm, h), 1.0);

  GHomotopy h2;
  h2.tracks[key_of(f.paths()[0])] = {{"p0", "p1", "p0"}, {"p0", "p2", "p0"}};
  GMorphism moved = apply_homotopy(l.rm, f, h2);
  EXPECT_EQ(apply_homotopy(l.rm, moved, reverse(h2)), f);
  EXPECT_DOUBLE_EQ(gradius(l.rm, h2), 1.0);
}

TEST(Homotopy, TrackMismatch) {
  Line3 l;
  GMorphism f(l.a, l.b, {{Z.one(), "a", "b", {"p0", "p1"}}});
  EXPECT_EQ(kind_of([&] { apply_homotopy(l.rm, f, GHomotopy{}); }), ErrorKind::TrackMismatch);
  GHomotopy bad;
  bad.tracks[key_of(f.paths()[0])] = {{"p0", "p1"}, {"p0", "p1", "p1"}};
  EXPECT_EQ(kind_of([&] { apply_homotopy(l.rm, f, bad); }), ErrorKind::TrackMismatch);
  GHomotopy moves_end;
  moves_end.tracks[key_of(f.paths()[0])] = {{"p0", "p1"}, {"p0", "p2"}};
  EXPECT_EQ(kind_of([&] { apply_homotopy(l.rm, f, moves_end); }), ErrorKind::TrackMismatch);
}

TEST(Homotopy, BacktrackReductionAgreesWithFreeReduction) {
  gen::Rng rng(gen::seed() + 3);
  ControlSpace x = gen::grid(3, 3);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a = gen::over_points(Z, "a", x), b = gen::over_points(Z, "b", x);
  for (int k = 0; k < 30; ++k) {
    GMorphism f = gen::gmorphism(Z, rng, rm, a, b, 3, 0.3, 0.8);
    GMorphism g = gen::gmorphism(Z, rng, rm, b, a, 3, 0.3, 0.8);
    GMorphism gf = gcompose(f, g);
    EXPECT_EQ(apply_homotopy(rm, gf, backtrack_homotopy(gf)), reduce_backtracks(gf));
  }
  EXPECT_EQ(reduce_backtracks(Samples{"a", "b", "c", "b", "a", "d"}), (Samples{"a", "d"}));
  EXPECT_EQ(reduce_backtracks(Samples{"a", "a", "a"}), (Samples{"a", "a", "a"}));
}

TEST(ForgetControl, SingleLoopGivesT) {
  ControlSpace e = ControlSpace::graph({"v"}, {{"v", "v", 1}});
  BasedModule m{Z, {"x"}, {{"x", "v"}}};
  GMorphism f(m, m, {{Z.one(), "x", "x", {"v", "v"}}});
  FundamentalGroupData data{"v", {}, std::nullopt, {}};
  Morphism g = forget_control(f, e, data);
  Ring L = Ring::laurent();
  EXPECT_EQ(g.entry("x", "x"), L.monomial(1, 1));
  GMorphism ff = gcompose(f, f);
  EXPECT_EQ(forget_control(ff, e, data).entry("x", "x"), L.monomial(2, 1));
}

TEST(ForgetControl, CircleIsFunctorialAndOrientationSensitive) {
  ControlSpace e = ControlSpace::graph({"c0", "c1", "c2"}, {{"c0", "c1", 1}, {"c1", "c2", 1}, {"c2", "c0", 1}});
  FundamentalGroupData data{"c0", {{"c0", "c1", 1}, {"c1", "c2", 1}}, std::nullopt, {}};
  BasedModule m{Z, {"x0", "x1", "x2"}, {{"x0", "c0"}, {"x1", "c1"}, {"x2", "c2"}}};
  Ring L = Ring::laurent();
  GMorphism fwd(m, m, {{Z.one(), "x2", "x0", {"c2", "c0"}}});
  GMorphism back(m, m, {{Z.one(), "x0", "x2", {"c0", "c2"}}});
  EXPECT_EQ(forget_control(fwd, e, data).entry("x0", "x2"), L.monomial(1, 1));
  EXPECT_EQ(forget_control(back, e, data).entry("x2", "x0"), L.monomial(-1, 1));

  gen::Rng rng(gen::seed() + 4);
  ReferenceMap rm = ReferenceMap::identity(e);
  for (int k = 0; k < 20; ++k) {
    GMorphism f = gen::gmorphism(Z, rng, rm, m, m, 1, 0.6, 0.3);
    GMorphism g = gen::gmorphism(Z, rng, rm, m, m, 1, 0.6, 0.3);
    f = gadd(f, GMorphism(m, m, {{Z.from_integer(2), "x0", "x0", {"c0", "c1", "c2", "c0"}}}));
    EXPECT_EQ(forget_control(gcompose(f, g), e, data),
              compose(forget_control(f, e, data), forget_control(g, e, data)));
  }
}

TEST(ForgetControl, GroupRingLabels) {
  // Loop a at v and a triangle closing with b, in S3 (indices 1 and 3).
  std::vector<std::vector<int>> s3 = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3}, {2, 0, 1, 5, 3, 4},
                                      {3, 5, 4, 0, 2, 1}, {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  Ring G = Ring::group_ring(s3);
  ControlSpace e = ControlSpace::graph({"v", "w", "u"},
                                       {{"v", "w", 1}, {"w", "u", 1}, {"v", "v", 1}, {"u", "v", 1}});
  FundamentalGroupData data{"v", {{"v", "w", 1}, {"w", "u", 1}}, G, {{{"v", "v"}, 1}, {{"u", "v"}, 3}}};
  BasedModule m{Z, {"x"}, {{"x", "v"}}};
  // loop a, then around v -> w -> u -> v: element b a.
  GMorphism f(m, m, {{Z.one(), "x", "x", {"v", "v", "w", "u", "v"}}});
  Morphism g = forget_control(f, e, data);
  EXPECT_EQ(g.entry("x", "x"), G.mul(G.monomial(3, 1), G.monomial(1, 1)));
  EXPECT_NE(g.entry("x", "x"), G.mul(G.monomial(1, 1), G.monomial(3, 1)));
}

TEST(ForgetControl, Errors) {
  ControlSpace e = ControlSpace::graph({"a", "b", "c"}, {{"a", "b", 1}, {"b", "c", 1}});
  BasedModule m{Z, {"x"}, {{"x", "a"}}};
  GMorphism f(m, m);
  EXPECT_EQ(kind_of([&] { forget_control(f, e, {"a", {{"a", "b", 1}}, std::nullopt, {}}); }),
            ErrorKind::Disconnected);
  Ring z5 = Ring::integers_mod(5);
  BasedModule m5{z5, {"x"}, {{"x", "a"}}};
  EXPECT_EQ(kind_of([&] {
              forget_control(GMorphism(m5, m5), e, {"a", {{"a", "b", 1}, {"b", "c", 1}}, std::nullopt, {}});
            }),
            ErrorKind::InvalidRing);
}

TEST(Cellular, SingleTriangle) {
  SimplicialInput k{{{"a", {0.0, 0.0}}, {"b", {0.9, 0.0}}, {"c", {0.45, 0.7}}}, {{"a", "b", "c"}}};
  CellularChains cc = cellular_chains(k, 1.0);
  EXPECT_TRUE(cc.report.ok()) << cc.report.first_failure()->name;
  EXPECT_EQ(cc.complex.top(), 2);
  EXPECT_EQ(cc.complex.module(1).rank(), 3u);
  EXPECT_LT(cc.report.metrics.at("boundary_radius"), 0.9);
  EXPECT_LT(cc.report.metrics.at("pairing_radius"), 1.8);
  GMorphism sq = gcompose(cc.complex.boundary(2), cc.complex.boundary(1));
  EXPECT_EQ(sq.paths().size(), 6u);
  EXPECT_TRUE(sq.algebraic().is_zero());
  EXPECT_EQ(cc.nullhomotopy.at(2).tracks.size(), 6u);
  EXPECT_TRUE(apply_homotopy(cc.space, sq, cc.nullhomotopy.at(2)).is_zero());
  Report r = validate_controlled_complex(cc.space, cc.complex, 1.0, cc.nullhomotopy);
  EXPECT_TRUE(r.ok()) << r.first_failure()->name;
  EXPECT_EQ(kind_of([&] { validate_controlled_complex(cc.space, cc.complex, 1.0); }),
            ErrorKind::MissingWitness);
  EXPECT_EQ(cc.complex.boundary(2).algebraic().entry("[b,c]", "[a,b,c]"), Z.one());
  EXPECT_EQ(cc.complex.boundary(2).algebraic().entry("[a,c]", "[a,b,c]"), Z.from_integer(-1));
}

TEST(Cellular, MeshTooLargeIsReported) {
  SimplicialInput k{{{"a", {0.0}}, {"b", {2.0}}}, {{"a", "b"}}};
  CellularChains cc = cellular_chains(k, 1.0);
  ASSERT_FALSE(cc.report.ok());
  EXPECT_EQ(cc.report.first_failure()->name, "mesh < eps");
  EXPECT_EQ(cc.report.first_failure()->witness, "[a,b]");
}

TEST(Cellular, EmptyComplex) {
  CellularChains cc = cellular_chains({}, 1.0);
  EXPECT_TRUE(cc.report.ok());
  EXPECT_EQ(cc.complex.top(), -1);
  EXPECT_EQ(cc.report.metrics.at("cells"), 0.0);
}

TEST(Cellular, InvalidInput) {
  EXPECT_EQ(kind_of([] { cellular_chains({{{"a", {0.0}}}, {{"a", "zz"}}}, 1.0); }), ErrorKind::NotAComplex);
  EXPECT_EQ(kind_of([] { cellular_chains({{{"a", {0.0}}}, {{"a", "a"}}}, 1.0); }), ErrorKind::NotAComplex);
  EXPECT_EQ(kind_of([] {
              cellular_chains({{{"a", {0.0}}, {"b", {1.0}}, {"c", {2.0}}}, {{"a", "b", "c"}}}, 5.0);
            }),
            ErrorKind::NotAComplex);
}

TEST(Cellular, RandomTetrahedraAreControlled) {
  gen::Rng rng(gen::seed() + 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    SimplicialInput in;
    for (int i = 0; i < 4; ++i) in.coords["v" + std::to_string(i)] = {u(rng), u(rng), u(rng)};
    in.simplices = {{"v0", "v1", "v2", "v3"}};
    CellularChains cc = cellular_chains(in, 2.0);
    EXPECT_TRUE(cc.report.ok());
    EXPECT_TRUE(validate_controlled_complex(cc.space, cc.complex, 2.0, cc.nullhomotopy).ok());
    for (int n = 2; n <= 3; ++n)
      EXPECT_TRUE(compose(cc.complex.boundary(n).algebraic(), cc.complex.boundary(n - 1).algebraic()).is_zero());
  }
}

TEST(Controlled, ElementaryConeContraction) {
  ControlSpace x = gen::line(2);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule c0{Z, {"x"}, {{"x", "p0"}}}, c1{Z, {"y"}, {{"y", "p1"}}};
  GComplex c(Z, {c0, c1});
  c.set_boundary(1, GMorphism(c1, c0, {{Z.one(), "y", "x", {"p1", "p0"}}}));
  GMaps xi{{0, GMorphism(c0, c1, {{Z.one(), "x", "y", {"p0", "p1"}}})}};
  EXPECT_TRUE(validate_controlled_complex(rm, c, 1.5).ok());
  EXPECT_EQ(kind_of([&] { validate_controlled_contraction(rm, c, xi, 1.5); }), ErrorKind::MissingWitness);
  GWitnesses w;
  for (int n = 0; n <= 1; ++n) {
    GMorphism s = n == 0 ? gcompose(xi.at(0), c.boundary(1)) : gcompose(c.boundary(1), xi.at(0));
    w[n] = backtrack_homotopy(s);
  }
  Report r = validate_controlled_contraction(rm, c, xi, 1.5, w);
  EXPECT_TRUE(r.ok()) << r.first_failure()->name;
  EXPECT_FALSE(validate_controlled_contraction(rm, c, xi, 0.5, w).ok());
}

TEST(Controlled, ChainMapAgreesUpToHomotopy) {
  ControlSpace x = gen::line(2);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule c0{Z, {"x"}, {{"x", "p0"}}}, c1{Z, {"y"}, {{"y", "p0"}}};
  BasedModule d0{Z, {"u"}, {{"u", "p0"}}}, d1{Z, {"v"}, {{"v", "p0"}}};
  GComplex c(Z, {c0, c1}), d(Z, {d0, d1});
  c.set_boundary(1, GMorphism(c1, c0, {{Z.one(), "y", "x", {"p0"}}}));
  d.set_boundary(1, GMorphism(d1, d0, {{Z.one(), "v", "u", {"p0", "p1", "p0"}}}));
  GMaps f{{0, GMorphism(c0, d0, {{Z.one(), "x", "u", {"p0"}}})},
          {1, GMorphism(c1, d1, {{Z.one(), "y", "v", {"p0"}}})}};
  EXPECT_EQ(kind_of([&] { validate_controlled_chain_map(rm, c, d, f, 1.5); }), ErrorKind::MissingWitness);
  GMorphism df = gcompose(f.at(1), d.boundary(1));
  GWitnesses w{{1, backtrack_homotopy(df)}};
  EXPECT_TRUE(validate_controlled_chain_map(rm, c, d, f, 1.5, w).ok());
}

TEST(Controlled, IsomorphismsRestrictToOpenSubsets) {
  gen::Rng rng(gen::seed() + 6);
  for (int k = 0; k < 25; ++k) {
    auto in = gen::iso(Z, rng, 10);
    Report r = validate_controlled_isomorphism(in.rm, in.f, in.f_inverse, in.eps, &in.h_source, &in.h_target);
    ASSERT_TRUE(r.ok()) << r.first_failure()->name << " " << r.first_failure()->witness;
    PointSet u;
    for (const auto& p : in.rm.X.points())
      if (gen::coin(rng, 0.7)) u.insert(p);
    if (u.empty()) continue;
    GMorphism fu = grestrict(in.rm, in.f, u), gu = grestrict(in.rm, in.f_inverse, u);
    GHomotopy ha = grestrict(in.rm, in.h_source, gcompose(fu, gu), u);
    GHomotopy hb = grestrict(in.rm, in.h_target, gcompose(gu, fu), u);
    Report ru = validate_controlled_isomorphism(in.rm.restrict_to(u), fu, gu, in.eps, &ha, &hb);
    EXPECT_TRUE(ru.ok()) << ru.first_failure()->name << " " << ru.first_failure()->witness;
  }
}

TEST(Controlled, UDiagonal) {
  ControlSpace x = gen::line(3, true);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a = gen::over_points(Z, "a", x), b = gen::over_points(Z, "b", x);
  GMorphism f(a, b, {{Z.one(), "ap0", "bp1", {"p0", "p1"}}, {Z.from_integer(-1), "ap1", "bp0", {"p1", "p0"}}});
  BaseFunction h = is_U_diagonal(rm, f, UnitKind::PlusMinusOne, 1.5);
  EXPECT_EQ(h.at("ap0"), "bp1");
  EXPECT_EQ(kind_of([&] { is_U_diagonal(rm, f, UnitKind::PlusMinusOne, 1.0); }), ErrorKind::RadiusExceeded);
  EXPECT_EQ(kind_of([&] { is_U_diagonal(rm, f, UnitKind::One, 1.5); }), ErrorKind::CoefficientOutsideU);
  EXPECT_EQ(kind_of([&] { is_U_diagonal(ReferenceMap::identity(gen::line(3)), f, UnitKind::PlusMinusOne, 1.5); }),
            ErrorKind::NotDiagonal);
}

TEST(TriangularInverse, OneShortPath) {
  ControlSpace x = gen::line(2);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule m{Z, {"s", "t"}, {{"s", "p0"}, {"t", "p1"}}};
  GMorphism u(m, m, {{Z.one(), "s", "t", {"p0", "p1"}}});
  GMorphism d = gadd(GMorphism::identity(m), u);
  Poset order = validate_poset({"s", "t"}, {{"s", "t"}});
  GMorphism inv = controlled_triangular_inverse(rm, d, order, 1.5);
  EXPECT_EQ(inv, gsub(GMorphism::identity(m), u));
  EXPECT_EQ(kind_of([&] { controlled_triangular_inverse(rm, d, order, 1.0); }), ErrorKind::NotEpsilonBounded);
}

TEST(TriangularInverse, RandomIsExactAfterBacktrackReduction) {
  gen::Rng rng(gen::seed() + 7);
  for (const Ring& r : {Z, Ring::integers_mod(7)}) {
    for (int k = 0; k < 25; ++k) {
      auto in = gen::triangular_instance(r, rng, 9, false);
      GMorphism inv = controlled_triangular_inverse(in.rm, in.f, in.order, in.eps);
      EXPECT_EQ(reduce_backtracks(gcompose(inv, in.f)), GMorphism::identity(in.f.target()));
      EXPECT_EQ(reduce_backtracks(gcompose(in.f, inv)), GMorphism::identity(in.f.source()));
      EXPECT_LT(gradius(in.rm, inv), 3 * in.eps);
    }
  }
}

TEST(TriangularInverse, DiagonalNotInvertible) {
  ControlSpace x = gen::line(2);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule m{Z, {"s"}, {{"s", "p0"}}};
  GMorphism d(m, m, {{Z.from_integer(2), "s", "s", {"p0"}}});
  EXPECT_EQ(kind_of([&] { controlled_triangular_inverse(rm, d, antichain({"s"}), 1.0); }),
            ErrorKind::DiagonalNotInvertible);
}

TEST(Unipotent, FactorsAroundY) {
  gen::Rng rng(gen::seed() + 8);
  for (int k = 0; k < 40; ++k) {
    auto in = gen::triangular_instance(Z, rng, 12, true);
    PointSet y;
    for (const auto& p : in.rm.X.points())
      if (gen::coin(rng, 0.3)) y.insert(p);
    auto [d1, d2] = factor_unipotent(in.rm, in.f, in.order, y, in.eps);
    EXPECT_EQ(gcompose(d1, d2), in.f);
    const BasedModule& m = in.f.source();
    const PointSet far = set_difference(in.rm.X.all(), enlarge(in.rm.X, y, 3 * in.eps));
    for (const auto& b : m.basis()) {
      const auto& loc = m.location(b);
      std::vector<GPath> id{{Z.one(), b, b, {loc}}};
      if (y.count(loc)) {
        auto ps = d1.paths_from(b);
        ASSERT_EQ(ps.size(), 1u);
        EXPECT_EQ(ps[0].via, Samples{loc});
      }
      if (far.count(loc)) {
        auto ps = d2.paths_from(b);
        ASSERT_EQ(ps.size(), 1u) << b;
        EXPECT_EQ(ps[0].to, b);
      }
    }
  }
}

TEST(Unipotent, SpecialSupports) {
  ControlSpace x = gen::line(8);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule m = gen::over_points(Z, "a", x);
  Poset order = validate_poset(m.basis(), {{"ap0", "ap1"}, {"ap6", "ap7"}});
  GMorphism near(m, m, {{Z.one(), "ap0", "ap1", {"p0", "p1"}}});
  GMorphism far(m, m, {{Z.one(), "ap6", "ap7", {"p6", "p7"}}});
  GMorphism d = gadd(GMorphism::identity(m), gadd(near, far));
  const PointSet y{"p0", "p1"};
  auto [d1, d2] = factor_unipotent(rm, d, order, y, 1.5);
  EXPECT_EQ(d1, gadd(GMorphism::identity(m), far));
  EXPECT_EQ(d2, gadd(GMorphism::identity(m), near));
  auto [a1, a2] = factor_unipotent(rm, gadd(GMorphism::identity(m), near), order, y, 1.5);
  EXPECT_EQ(a1, GMorphism::identity(m));
  auto [b1, b2] = factor_unipotent(rm, gadd(GMorphism::identity(m), far), order, y, 1.5);
  EXPECT_EQ(b2, GMorphism::identity(m));
}

TEST(Unipotent, SplitBySupportAndConjugationFactors) {
  gen::Rng rng(gen::seed() + 9);
  ControlSpace x = gen::grid(3, 3);
  ReferenceMap rm = ReferenceMap::identity(x);
  BasedModule a = gen::over_points(Z, "a", x), b = gen::over_points(Z, "b", x);
  for (int k = 0; k < 20; ++k) {
    GMorphism xi = gen::gmorphism(Z, rng, rm, a, b, 1);
    PointSet y;
    for (const auto& p : x.points())
      if (gen::coin(rng)) y.insert(p);
    auto [in, out] = split_by_support(rm, xi, y);
    EXPECT_EQ(gadd(in, out), xi);
    for (const auto& p : in.paths()) EXPECT_TRUE(y.count(p.via.front()));
    // [[1,-xi(1-rho)],[0,1]] [[1,-xi rho],[0,1]] = [[1,-xi],[0,1]] on the off-diagonal block.
    Morphism one_b = Morphism::identity(b), one_a = Morphism::identity(a);
    Morphism n_out = neg(out.algebraic()), n_in = neg(in.algebraic()), n_xi = neg(xi.algebraic());
    Morphism left = block2(b, a, b, a, &one_b, &n_out, nullptr, &one_a);
    Morphism right = block2(b, a, b, a, &one_b, &n_in, nullptr, &one_a);
    Morphism whole = block2(b, a, b, a, &one_b, &n_xi, nullptr, &one_a);
    EXPECT_EQ(compose(right, left), whole);
  }
}
