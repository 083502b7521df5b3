#include "io.hpp"

#include <fstream>
#include <sstream>

namespace ctrlk::io {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorKind::MalformedDocument, what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing \"") + key + "\"");
  return j.at(key);
}

json stamp(const char* type, json body) {
  body["schema"] = kSchema;
  body["type"] = type;
  return body;
}

json encode_integer(const Integer& n) {
  if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(n);
  return n.str();
}

Integer decode_integer(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return Integer(j.get<std::uint64_t>());
  if (j.is_string()) {
    try {
      return Integer(j.get<std::string>());
    } catch (const std::exception&) {
      malformed("not an integer: " + j.get<std::string>());
    }
  }
  malformed("not an integer: " + j.dump());
}

int degree_key(const std::string& k) {
  try {
    std::size_t used = 0;
    const int n = std::stoi(k, &used);
    if (used == k.size() && n >= 0) return n;
  } catch (const std::exception&) {
  }
  malformed("bad degree key " + k);
}

// Object keyed by degree -> values ordered by degree; keys must be 0..N.
std::vector<json> by_degree(const json& j) {
  std::map<int, json> m;
  for (const auto& [k, v] : j.items()) m[degree_key(k)] = v;
  std::vector<json> out;
  for (const auto& [n, v] : m) {
    if (n != static_cast<int>(out.size())) malformed("degrees must run from 0 without gaps");
    out.push_back(v);
  }
  return out;
}

std::map<int, json> sparse_degrees(const json& j) {
  std::map<int, json> m;
  for (const auto& [k, v] : j.items()) m[degree_key(k)] = v;
  return m;
}

std::vector<std::string> strings(const json& j) {
  if (!j.is_array()) malformed("expected a list of labels");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(e.get<std::string>());
  return out;
}

json encode_homotopies(const GWitnesses& w) {
  json out = json::object();
  for (const auto& [n, h] : w) {
    json tracks = json::array();
    for (const auto& [key, stages] : h.tracks) {
      const auto& [from, to, via] = key;
      tracks.push_back({{"from", from}, {"to", to}, {"via", via}, {"stages", stages}});
    }
    out[std::to_string(n)] = tracks;
  }
  return out;
}

GWitnesses decode_homotopies(const json& j) {
  GWitnesses out;
  for (const auto& [n, tracks] : sparse_degrees(j)) {
    GHomotopy h;
    for (const auto& t : tracks) {
      PathKey key{need(t, "from").get<std::string>(), need(t, "to").get<std::string>(), strings(need(t, "via"))};
      std::vector<Samples> stages;
      for (const auto& s : need(t, "stages")) stages.push_back(strings(s));
      h.tracks[key] = stages;
    }
    out[n] = h;
  }
  return out;
}

}  // namespace

json parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("document must be an object");
  if (j.contains("schema") && j["schema"] != kSchema) malformed("unsupported schema " + j["schema"].dump());
  return j;
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

std::string canonical(const json& j) { return j.dump(2) + "\n"; }

std::string document_type(const json& doc, const std::string& fallback) {
  if (doc.contains("type") && doc["type"].is_string()) return doc["type"].get<std::string>();
  return fallback;
}

json encode(const Ring& r) {
  switch (r.kind()) {
    case RingKind::Integers: return {{"kind", "Z"}};
    case RingKind::IntegersMod: return {{"kind", "Zmod"}, {"n", encode_integer(r.modulus())}};
    case RingKind::GroupRing: return {{"kind", "GroupRing"}, {"table", r.table()}};
    case RingKind::Laurent: return {{"kind", "Laurent"}};
  }
  return {};
}

Ring decode_ring(const json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "Z") return Ring::integers();
  if (kind == "Zmod") return Ring::integers_mod(decode_integer(need(j, "n")));
  if (kind == "GroupRing") return Ring::group_ring(need(j, "table").get<std::vector<std::vector<int>>>());
  if (kind == "Laurent") return Ring::laurent();
  malformed("unknown ring kind " + kind);
}

json encode(const Ring& r, const Scalar& s) {
  if (s.is_zero()) return 0;
  const auto& t = s.terms();
  if (t.size() == 1 && t[0].first == r.identity_key()) return encode_integer(t[0].second);
  json out = json::array();
  for (const auto& [key, c] : t) out.push_back({key, encode_integer(c)});
  return out;
}

Scalar decode_scalar(const Ring& r, const json& j) {
  if (!j.is_array()) return r.from_integer(decode_integer(j));
  Scalar out;
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2) malformed("ring term must be [key, coefficient]");
    out = r.add(out, r.monomial(term[0].get<std::int64_t>(), decode_integer(term[1])));
  }
  return out;
}

json encode(const BasedModule& m) {
  json basis = json::array();
  for (const auto& l : m.basis()) {
    if (m.locations().empty())
      basis.push_back(l);
    else
      basis.push_back({{"id", l}, {"at", m.location(l)}});
  }
  return {{"basis", basis}};
}

BasedModule decode_module(const Ring& r, const json& j) {
  std::vector<std::string> basis;
  std::map<std::string, std::string> at;
  for (const auto& e : need(j, "basis")) {
    if (e.is_string()) {
      basis.push_back(e.get<std::string>());
    } else {
      basis.push_back(need(e, "id").get<std::string>());
      if (e.contains("at")) at[basis.back()] = e["at"].get<std::string>();
    }
  }
  if (!at.empty() && at.size() != basis.size()) malformed("locations must be given for every basis element");
  return BasedModule(r, basis, at);
}

json encode_entries(const Morphism& f) {
  json out = json::array();
  for (std::size_t c = 0; c < f.source().rank(); ++c)
    for (const auto& [row, v] : f.column(c))
      out.push_back({{"row", f.target().basis()[row]}, {"col", f.source().basis()[c]}, {"coeff", encode(f.ring(), v)}});
  return out;
}

Morphism decode_entries(const BasedModule& source, const BasedModule& target, const json& j) {
  Morphism f(source, target);
  const json& entries = j.is_object() ? need(j, "entries") : j;
  for (const auto& e : entries) {
    const std::string row = need(e, "row").get<std::string>(), col = need(e, "col").get<std::string>();
    if (!f.entry(row, col).is_zero()) malformed("repeated entry " + row + "<-" + col);
    f.set(row, col, decode_scalar(source.ring(), need(e, "coeff")));
  }
  return f;
}

json encode(const Morphism& f) {
  return {{"source", encode(f.source())}, {"target", encode(f.target())}, {"entries", encode_entries(f)}};
}

Morphism decode_morphism(const Ring& r, const json& j) {
  return decode_entries(decode_module(r, need(j, "source")), decode_module(r, need(j, "target")), need(j, "entries"));
}

json encode(const Poset& p) {
  json covers = json::array();
  for (const auto& [a, b] : p.covers()) covers.push_back({a, b});
  return {{"elements", p.elements()}, {"covers", covers}};
}

Poset decode_poset(const json& j) {
  std::vector<Relation> covers;
  for (const auto& c : need(j, "covers")) {
    if (!c.is_array() || c.size() != 2) malformed("cover must be a pair");
    covers.emplace_back(c[0].get<std::string>(), c[1].get<std::string>());
  }
  return validate_poset(strings(need(j, "elements")), covers);
}

json encode(const PointSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

PointSet decode_points(const json& j) {
  const auto v = strings(j);
  return PointSet(v.begin(), v.end());
}

json encode(const ControlSpace& x) {
  json metric;
  if (x.is_graph()) {
    json edges = json::array();
    for (const auto& e : x.edges()) edges.push_back({e.a, e.b, e.weight});
    metric = {{"kind", "graph"}, {"edges", edges}};
  } else {
    metric = {{"kind", "euclidean"}, {"coords", x.coords()}};
  }
  json frontier = json::array();
  for (const auto& f : x.frontier()) {
    json fp = {{"id", f.id}, {"dist", f.dist}};
    if (!f.attach.empty()) fp["attach"] = f.attach;
    frontier.push_back(fp);
  }
  return stamp("space", {{"points", x.points()}, {"metric", metric}, {"frontier", frontier}});
}

ControlSpace decode_space(const json& j) {
  const auto points = strings(need(j, "points"));
  std::vector<FrontierPoint> frontier;
  if (j.contains("frontier"))
    for (const auto& f : j["frontier"]) {
      FrontierPoint fp{need(f, "id").get<std::string>(), {}, {}};
      if (f.contains("dist")) fp.dist = f["dist"].get<std::map<std::string, double>>();
      if (f.contains("attach")) fp.attach = f["attach"].get<std::map<std::string, double>>();
      frontier.push_back(fp);
    }
  const json& metric = need(j, "metric");
  const std::string kind = need(metric, "kind").get<std::string>();
  if (kind == "graph") {
    std::vector<Edge> edges;
    for (const auto& e : need(metric, "edges")) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) malformed("edge must be [a, b] or [a, b, w]");
      edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
    return ControlSpace::graph(points, edges, frontier);
  }
  if (kind == "euclidean")
    return ControlSpace::euclidean(points, need(metric, "coords").get<std::map<std::string, std::vector<double>>>(),
                                   frontier);
  malformed("unknown metric kind " + kind);
}

json encode_body(const ComplexDoc& c) {
  const ChainComplex& cx = c.complex.complex;
  json modules = json::object(), boundary = json::object();
  for (int n = 0; n <= cx.top(); ++n) modules[std::to_string(n)] = encode(cx.module(n));
  for (int n = 1; n <= cx.top(); ++n) boundary[std::to_string(n)] = {{"entries", encode_entries(cx.boundary(n))}};
  json out = {{"modules", modules}, {"boundary", boundary}};
  if (c.has_contraction) {
    json xi = json::object();
    for (int n = 0; n < cx.top(); ++n) xi[std::to_string(n)] = {{"entries", encode_entries(c.complex.xi.at(n))}};
    out["contraction"] = xi;
  }
  if (!c.orders.empty()) {
    json orders = json::object();
    for (std::size_t n = 0; n < c.orders.size(); ++n) orders[std::to_string(n)] = encode(c.orders[n]);
    out["orders"] = orders;
  }
  return out;
}

json encode(const ComplexDoc& c) {
  json body = encode_body(c);
  body["ring"] = encode(c.complex.complex.ring());
  return stamp("complex", body);
}

ComplexDoc decode_complex(const Ring& r, const json& j) {
  std::vector<BasedModule> modules;
  for (const auto& m : by_degree(need(j, "modules"))) modules.push_back(decode_module(r, m));
  ChainComplex c(r, modules);
  if (j.contains("boundary"))
    for (const auto& [n, b] : sparse_degrees(j["boundary"])) {
      if (n < 1 || n > c.top()) malformed("boundary degree " + std::to_string(n) + " out of range");
      c.set_boundary(n, decode_entries(c.module(n), c.module(n - 1), b));
    }
  Contraction xi(c);
  const bool has = j.contains("contraction");
  if (has)
    for (const auto& [n, x] : sparse_degrees(j["contraction"])) {
      if (n >= c.top()) malformed("contraction degree " + std::to_string(n) + " out of range");
      xi.set(n, decode_entries(c.module(n), c.module(n + 1), x));
    }
  ComplexDoc out{{c, xi}, has, {}};
  if (j.contains("orders")) {
    for (const auto& o : by_degree(j["orders"])) out.orders.push_back(decode_poset(o));
    if (static_cast<int>(out.orders.size()) != c.top() + 1) malformed("one order per degree is required");
  }
  return out;
}

ComplexDoc decode_complex(const json& j) { return decode_complex(decode_ring(need(j, "ring")), j); }

json encode(const VolodinPath& v) {
  json mats = json::array();
  for (const auto& m : v.matrices) {
    json rows = json::array();
    for (const auto& row : m) {
      json r = json::array();
      for (const auto& s : row) r.push_back(encode(v.ring, s));
      rows.push_back(r);
    }
    mats.push_back(rows);
  }
  return stamp("volodin", {{"ring", encode(v.ring)},
                           {"k", v.k},
                           {"mode", v.mode == SignMode::One ? "one" : "pm"},
                           {"matrices", mats}});
}

VolodinPath decode_volodin(const json& j) {
  const Ring r = decode_ring(need(j, "ring"));
  VolodinPath v{r, need(j, "k").get<int>(), {}, SignMode::One};
  const std::string mode = j.value("mode", "one");
  if (mode == "pm")
    v.mode = SignMode::PlusMinus;
  else if (mode != "one")
    malformed("mode must be \"one\" or \"pm\"");
  for (const auto& m : need(j, "matrices")) {
    DenseMatrix d;
    for (const auto& row : m) {
      d.emplace_back();
      for (const auto& e : row) d.back().push_back(decode_scalar(r, e));
    }
    v.matrices.push_back(d);
  }
  return v;
}

json encode(const SimplicialInput& s, double eps) {
  json out = {{"coords", s.coords}, {"simplices", s.simplices}};
  if (eps > 0) out["epsilon"] = eps;
  return stamp("simplicial", out);
}

SimplicialInput decode_simplicial(const json& j) {
  SimplicialInput s;
  s.coords = need(j, "coords").get<std::map<std::string, std::vector<double>>>();
  for (const auto& simplex : need(j, "simplices")) s.simplices.push_back(strings(simplex));
  return s;
}

json encode(const Ring& r, const GPath& p) {
  return {{"coeff", encode(r, p.coeff)}, {"from", p.from}, {"to", p.to}, {"via", p.via}};
}

json encode_paths(const GMorphism& f) {
  json out = json::array();
  for (const auto& p : f.paths()) out.push_back(encode(f.ring(), p));
  return out;
}

GMorphism decode_gmorphism(const BasedModule& s, const BasedModule& t, const json& j) {
  std::vector<GPath> paths;
  const json& list = j.is_object() ? need(j, "paths") : j;
  for (const auto& p : list)
    paths.push_back({decode_scalar(s.ring(), need(p, "coeff")), need(p, "from").get<std::string>(),
                     need(p, "to").get<std::string>(), strings(need(p, "via"))});
  return GMorphism(s, t, paths);
}

json encode(const GComplexDoc& g) {
  json modules = json::object(), boundary = json::object(), xi = json::object();
  for (int n = 0; n <= g.complex.top(); ++n) modules[std::to_string(n)] = encode(g.complex.module(n));
  for (int n = 1; n <= g.complex.top(); ++n) boundary[std::to_string(n)] = {{"paths", encode_paths(g.complex.boundary(n))}};
  for (const auto& [n, x] : g.contraction) xi[std::to_string(n)] = {{"paths", encode_paths(x)}};
  json space = encode(g.space);
  space.erase("schema");
  space.erase("type");
  json out = {{"ring", encode(g.complex.ring())}, {"space", space},    {"epsilon", g.eps},
              {"modules", modules},               {"boundary", boundary}};
  if (!g.contraction.empty()) out["contraction"] = xi;
  if (!g.square.empty()) out["square"] = encode_homotopies(g.square);
  return stamp("gcomplex", out);
}

GComplexDoc decode_gcomplex(const json& j) {
  const Ring r = decode_ring(need(j, "ring"));
  ControlSpace x = decode_space(need(j, "space"));
  std::vector<BasedModule> modules;
  for (const auto& m : by_degree(need(j, "modules"))) modules.push_back(decode_module(r, m));
  GComplex c(r, modules);
  if (j.contains("boundary"))
    for (const auto& [n, b] : sparse_degrees(j["boundary"])) {
      if (n < 1 || n > c.top()) malformed("boundary degree " + std::to_string(n) + " out of range");
      c.set_boundary(n, decode_gmorphism(c.module(n), c.module(n - 1), b));
    }
  GComplexDoc out{x, c, {}, {}, need(j, "epsilon").get<double>()};
  if (j.contains("contraction"))
    for (const auto& [n, b] : sparse_degrees(j["contraction"])) {
      if (n >= c.top()) malformed("contraction degree " + std::to_string(n) + " out of range");
      out.contraction.emplace(n, decode_gmorphism(c.module(n), c.module(n + 1), b));
    }
  if (j.contains("square")) out.square = decode_homotopies(j["square"]);
  return out;
}

std::string unit_name(UnitKind u) {
  switch (u) {
    case UnitKind::One: return "one";
    case UnitKind::PlusMinusOne: return "pm";
    case UnitKind::PlusMinusGroup: return "pmgroup";
    case UnitKind::AllUnits: return "all";
  }
  return "all";
}

UnitKind decode_unit(const std::string& s) {
  if (s == "one") return UnitKind::One;
  if (s == "pm") return UnitKind::PlusMinusOne;
  if (s == "pmgroup") return UnitKind::PlusMinusGroup;
  if (s == "all") return UnitKind::AllUnits;
  malformed("unknown unit subgroup " + s);
}

json encode(const TriangularDoc& t) {
  json out = encode(t.f);
  out["ring"] = encode(t.f.ring());
  out["order"] = encode(t.order);
  out["unit"] = unit_name(t.unit);
  if (t.source_order) out["source_order"] = encode(*t.source_order);
  return stamp("triangular", out);
}

TriangularDoc decode_triangular(const json& j) {
  const Ring r = decode_ring(need(j, "ring"));
  TriangularDoc t{decode_morphism(r, j), decode_poset(need(j, "order")), std::nullopt,
                  decode_unit(j.value("unit", "all"))};
  if (j.contains("source_order")) t.source_order = decode_poset(j["source_order"]);
  return t;
}

json encode(const LocalizeDoc& l) {
  json space = encode(l.space);
  space.erase("schema");
  space.erase("type");
  return stamp("localize", {{"ring", encode(l.f.ring())},
                            {"space", space},
                            {"source", encode(l.f.source())},
                            {"target", encode(l.f.target())},
                            {"paths", encode_paths(l.f)},
                            {"subset", encode(l.subset)},
                            {"epsilon", l.eps},
                            {"order", encode(l.order)}});
}

LocalizeDoc decode_localize(const json& j) {
  const Ring r = decode_ring(need(j, "ring"));
  ControlSpace x = decode_space(need(j, "space"));
  const BasedModule s = decode_module(r, need(j, "source")), t = decode_module(r, need(j, "target"));
  return {x, decode_gmorphism(s, t, need(j, "paths")), decode_points(need(j, "subset")),
          need(j, "epsilon").get<double>(), decode_poset(need(j, "order"))};
}

json encode(const K1Simplex& s) {
  if (s.complexes.empty()) malformed("empty simplex");
  json vertices = json::array(), maps = json::array();
  for (std::size_t i = 0; i < s.complexes.size(); ++i)
    vertices.push_back(encode_body({s.complexes[i], true, s.orders.at(i)}));
  for (const auto& [key, m] : s.maps) {
    json degrees = json::object();
    for (int n = 0; n <= std::max(m.source.top(), m.target.top()); ++n)
      degrees[std::to_string(n)] = {{"entries", encode_entries(m.at(n))}};
    maps.push_back({{"from", key.first}, {"to", key.second}, {"degrees", degrees}});
  }
  json out = {{"ring", encode(s.complexes[0].complex.ring())}, {"vertices", vertices}, {"maps", maps}};
  if (s.controlled) {
    json space = encode(s.controlled->space);
    space.erase("schema");
    space.erase("type");
    out["control"] = {{"space", space}, {"epsilon", s.controlled->eps}};
  }
  return stamp("k1simplex", out);
}

K1Simplex decode_k1(const json& j) {
  const Ring r = decode_ring(need(j, "ring"));
  K1Simplex s;
  for (const auto& v : need(j, "vertices")) {
    ComplexDoc c = decode_complex(r, v);
    if (!c.has_contraction) malformed("every vertex needs a contraction");
    s.complexes.push_back(c.complex);
    s.orders.push_back(c.orders);
  }
  for (const auto& m : need(j, "maps")) {
    const int from = need(m, "from").get<int>(), to = need(m, "to").get<int>();
    const int n = static_cast<int>(s.complexes.size());
    if (from < 0 || to <= from || to >= n) malformed("map indices must satisfy 0 <= from < to < vertices");
    ChainMap f(s.complexes[from].complex, s.complexes[to].complex);
    for (const auto& [d, e] : sparse_degrees(need(m, "degrees")))
      f.set(d, decode_entries(f.source.module(d), f.target.module(d), e));
    if (!s.maps.emplace(std::make_pair(from, to), f).second) malformed("repeated map");
  }
  if (j.contains("control"))
    s.controlled = Controlled{decode_space(need(j["control"], "space")), need(j["control"], "epsilon").get<double>()};
  return s;
}

json encode(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
  return {{"checks", checks}, {"metrics", r.metrics}, {"status", r.ok() ? "ok" : "invalid"}};
}

json normalize(const json& doc) {
  const std::string type = document_type(doc);
  if (type == "complex") return encode(decode_complex(doc));
  if (type == "volodin") return encode(decode_volodin(doc));
  if (type == "space") return encode(decode_space(doc));
  if (type == "simplicial") return encode(decode_simplicial(doc), doc.value("epsilon", 0.0));
  if (type == "gcomplex") return encode(decode_gcomplex(doc));
  if (type == "triangular") return encode(decode_triangular(doc));
  if (type == "localize") return encode(decode_localize(doc));
  if (type == "k1simplex") return encode(decode_k1(doc));
  malformed("unknown document type \"" + type + "\"");
}

}  // namespace ctrlk::io
