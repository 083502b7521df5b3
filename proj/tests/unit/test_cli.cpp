#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "generators.hpp"
#include "io.hpp"

using namespace ctrlk;
using io::json;

namespace {

struct Invocation {
  int code;
  json report;
  std::string text;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "ctrlk");
  const int code = cli::run(args, out, err);
  json r;
  try {
    r = json::parse(out.str());
  } catch (const json::exception&) {
  }
  return {code, r, out.str()};
}

std::string golden(const std::string& name) { return std::string(CTRLK_GOLDEN_DIR) + "/" + name; }
std::string input(const std::string& name) { return std::string(CTRLK_INPUT_DIR) + "/" + name; }

}  // namespace

TEST(Cli, ValidateContractibleComplex) {
  const Invocation r = invoke({"validate", golden("cone.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report["status"], "ok");
  EXPECT_EQ(r.report["schema"], "ctrlk/1");
}

TEST(Cli, SquareNonzeroNamesDegree) {
  const Invocation r = invoke({"validate", input("bad_square.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["status"], "invalid");
  EXPECT_EQ(r.report["checks"][0]["name"], "c^2=0 in degree 2");
  EXPECT_FALSE(r.report["checks"][0]["pass"].get<bool>());
}

TEST(Cli, MissingAndMalformedFiles) {
  EXPECT_EQ(invoke({"validate", input("no_such_file.json")}).code, 2);
  const Invocation r = invoke({"validate", input("malformed.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.report["error"]["kind"], "MalformedDocument");
  EXPECT_EQ(invoke({"validate", golden("cone.json"), "--kind", "volodin"}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
}

TEST(Cli, FoldThreeTermExample) {
  const Invocation r = invoke({"fold", golden("three_term.json")});
  ASSERT_EQ(r.code, 0);
  const io::ComplexDoc c = io::decode_complex(r.report["result"]["complex"]);
  const Morphism b = c.complex.complex.boundary(1);
  const Ring& z = b.ring();
  // (a, b) -> (b, -a) on C^0 + C^2.
  EXPECT_EQ(b.entry("y", "b"), z.one());
  EXPECT_EQ(b.entry("x", "a"), z.from_integer(-1));
  EXPECT_TRUE(b.entry("y", "a").is_zero());
  EXPECT_TRUE(b.entry("x", "b").is_zero());
}

TEST(Cli, FoldLeavesConeUnchanged) {
  const Invocation r = invoke({"fold", golden("cone.json")});
  ASSERT_EQ(r.code, 0);
  const io::ComplexDoc in = io::decode_complex(io::read_document(golden("cone.json")));
  const io::ComplexDoc out = io::decode_complex(r.report["result"]["complex"]);
  EXPECT_TRUE(in.complex.complex == out.complex.complex);
  EXPECT_TRUE(in.complex.xi == out.complex.xi);
}

TEST(Cli, FoldRejectsNonContractible) {
  const Invocation r = invoke({"fold", input("bad_square.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.report["error"]["kind"], "NotStrictContractible");
}

TEST(Cli, VolodinOrders) {
  const Invocation ok = invoke({"volodin", golden("volodin_unipotent.json")});
  ASSERT_EQ(ok.code, 0);
  EXPECT_EQ(ok.report["result"]["order"]["covers"], json::parse(R"([["e1","e2"]])"));
  const Invocation bad = invoke({"volodin", input("volodin_cycle.json")});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.report["error"]["kind"], "NoOrderExists");
  EXPECT_EQ(bad.report["error"]["witness"], "e1 < e2 < e3 < e1");
}

TEST(Cli, FixSigns) {
  const Invocation r = invoke({"volodin", golden("volodin_signs.json"), "--fix-signs", "--loop"});
  ASSERT_EQ(r.code, 0);
  const json& path = r.report["result"]["path"];
  EXPECT_EQ(path["mode"], "one");
  EXPECT_EQ(path["matrices"], json::parse("[[[1,0],[0,1]],[[1,0],[0,1]],[[1,0],[0,1]]]"));
}

TEST(Cli, Cellular) {
  const Invocation r = invoke({"cellular", golden("triangle.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(r.report["metrics"]["mesh"].get<double>(), 0.9, 1e-9);
  EXPECT_LT(r.report["metrics"]["pairing_radius"].get<double>(), 1.8);
  const Invocation coarse = invoke({"cellular", input("coarse_mesh.json"), "--epsilon", "1"});
  EXPECT_EQ(coarse.code, 1);
  EXPECT_EQ(coarse.report["checks"][0]["witness"], "[a,b]");
  const Invocation empty = invoke({"cellular", input("empty_simplicial.json"), "--epsilon", "1"});
  EXPECT_EQ(empty.code, 0);
  EXPECT_TRUE(empty.report["result"]["complex"]["modules"].empty());
  EXPECT_EQ(invoke({"cellular", input("not_a_complex.json"), "--epsilon", "1"}).code, 2);
}

TEST(Cli, Space) {
  const Invocation e = invoke({"space", golden("line.json"), "--enlarge", "0", "1.5"});
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(e.report["result"]["set"], json::parse(R"(["0","1"])"));
  const Invocation r = invoke({"space", golden("line.json"), "--reduce", "0,1,2,3,4", "1"});
  EXPECT_EQ(r.report["result"]["set"].size(), 5u);
  const Invocation x = invoke({"space", golden("line.json"), "--excise", "1,2", "1.5"});
  EXPECT_EQ(x.code, 0);
  EXPECT_TRUE(x.report["result"]["equal"].get<bool>());
  const Invocation u = invoke({"space", golden("line.json"), "--enlarge", "9", "1"});
  EXPECT_EQ(u.code, 2);
  EXPECT_EQ(u.report["error"]["kind"], "UnknownPoint");
  EXPECT_EQ(invoke({"space", golden("line.json")}).code, 2);
}

TEST(Cli, TriangularAndLocalize) {
  for (const char* a : {"decompose", "invert", "factor"})
    EXPECT_EQ(invoke({"triangular", a, golden("triangular_z7.json")}).code, 0) << a;
  for (const char* a : {"split", "unipotent"}) EXPECT_EQ(invoke({"localize", a, golden("localize.json")}).code, 0) << a;
  EXPECT_EQ(invoke({"triangular", "transpose", golden("triangular_z7.json")}).code, 2);
}

TEST(Cli, TextFormatAndDeterminism) {
  const Invocation t = invoke({"--format", "text", "validate", golden("cone.json")});
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.text.find("status: ok"), std::string::npos);
  EXPECT_EQ(invoke({"validate", golden("k1_volodin.json")}).text, invoke({"validate", golden("k1_volodin.json")}).text);
}

TEST(Cli, OutputEqualsLibraryCall) {
  const Invocation r = invoke({"triangular", "invert", golden("triangular_z7.json")});
  const io::TriangularDoc t = io::decode_triangular(io::read_document(golden("triangular_z7.json")));
  const Morphism inv = invert_triangular(decompose_triangular(t.f, t.order, t.unit));
  EXPECT_EQ(r.report["result"]["inverse"], io::encode_entries(inv));
}

TEST(Io, ComplexRoundTrip) {
  gen::Rng rng(gen::seed());
  for (const Ring& r : {Ring::integers(), Ring::integers_mod(5)})
    for (int t = 0; t < 30; ++t) {
      const ContractedComplex c = gen::contractible(r, rng, 4, 3);
      const io::ComplexDoc back = io::decode_complex(io::parse_document(io::canonical(io::encode(io::ComplexDoc{c, true, {}}))));
      EXPECT_TRUE(back.complex.complex == c.complex);
      EXPECT_TRUE(back.complex.xi == c.xi);
    }
}

TEST(Io, Scalars) {
  const Ring z = Ring::integers(), l = Ring::laurent(), g = Ring::group_ring({{0, 1}, {1, 0}});
  const Scalar big = z.from_integer(Integer(1) << 90);
  EXPECT_TRUE(io::encode(z, big).is_string());
  EXPECT_EQ(io::decode_scalar(z, io::encode(z, big)), big);
  const Scalar t = l.add(l.monomial(-2, 3), l.monomial(5, -1));
  EXPECT_EQ(io::decode_scalar(l, io::encode(l, t)), t);
  EXPECT_EQ(io::encode(g, g.one()), json(1));
  const Scalar x = g.add(g.one(), g.monomial(1, -4));
  EXPECT_EQ(io::decode_scalar(g, io::encode(g, x)), x);
  EXPECT_EQ(io::decode_ring(io::encode(g)), g);
  EXPECT_THROW(io::decode_scalar(z, json("twelve")), Error);
}

TEST(Io, RejectsMalformedDocuments) {
  auto kind = [](const std::string& text) {
    try {
      io::normalize(io::parse_document(text));
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidInput;
  };
  EXPECT_EQ(kind(R"({"schema":"ctrlk/2","type":"space"})"), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind(R"({"schema":"ctrlk/1","type":"teapot"})"), ErrorKind::MalformedDocument);
  EXPECT_EQ(kind(R"({"schema":"ctrlk/1","type":"complex","ring":{"kind":"Z"},"modules":{"1":{"basis":[]}}})"),
            ErrorKind::MalformedDocument);
  EXPECT_EQ(kind(R"({"schema":"ctrlk/1","type":"complex","ring":{"kind":"Q"},"modules":{}})"),
            ErrorKind::MalformedDocument);
  EXPECT_EQ(kind("[1,2]"), ErrorKind::MalformedDocument);
}
