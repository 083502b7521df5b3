#include "commands.hpp"

#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"

namespace ctrlk::cli {

namespace {

using io::json;

// Errors raised while reading a document always mean malformed input.
struct LoadFailure {
  Error error;
};

template <class F>
auto load(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw LoadFailure{e};
  } catch (const json::exception& e) {
    throw LoadFailure{Error(ErrorKind::MalformedDocument, e.what())};
  }
}

struct Outcome {
  Report report;
  json result = json::object();
};

struct Options {
  std::string format = "json";
  std::string path;
  std::string kind;
  std::optional<double> eps;
  bool orders = false;
  bool fix_signs = false;
  bool loop = false;
  std::vector<std::string> enlarge, reduce, excise;
  std::optional<double> frontier;
  std::string action;
};

bool load_kind(ErrorKind k) {
  return k == ErrorKind::MalformedDocument || k == ErrorKind::UnknownPoint || k == ErrorKind::NotAComplex;
}

PointSet parse_set(const ControlSpace& x, const std::string& text) {
  PointSet out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ','))
    if (!p.empty()) {
      if (!x.contains(p)) throw Error(ErrorKind::UnknownPoint, p);
      out.insert(p);
    }
  return out;
}

double parse_eps(const std::string& text) {
  try {
    std::size_t used = 0;
    const double e = std::stod(text, &used);
    if (used == text.size() && e > 0) return e;
  } catch (const std::exception&) {
  }
  throw LoadFailure{Error(ErrorKind::MalformedDocument, "bad epsilon " + text)};
}

json strip(json doc) {
  doc.erase("schema");
  return doc;
}

bool is_identity_outside(const GMorphism& d, const ReferenceMap& rm, const PointSet& y, std::string& witness) {
  const GMorphism id = GMorphism::identity(d.source());
  for (const auto& b : d.source().basis()) {
    if (rm.over(d.source().location(b), y)) continue;
    const auto got = d.paths_from(b), want = id.paths_from(b);
    const bool same = got.size() == want.size() &&
                      (got.empty() || (key_of(got[0]) == key_of(want[0]) && got[0].coeff == want[0].coeff));
    if (!same) {
      witness = b;
      return false;
    }
  }
  return true;
}

Outcome validate_complex_doc(const json& doc, const Options& opt) {
  const io::ComplexDoc c = load([&] { return io::decode_complex(doc); });
  Outcome o;
  o.report = validate_complex(c.complex.complex, c.has_contraction ? &c.complex.xi : nullptr);
  o.report.metrics["top"] = c.complex.complex.top();
  if (opt.orders) {
    const int n = c.complex.complex.top() + 1;
    o.report.add("one order per degree", static_cast<int>(c.orders.size()) == n,
                 std::to_string(c.orders.size()) + " of " + std::to_string(n));
    for (std::size_t d = 0; d < c.orders.size(); ++d) {
      auto el = c.orders[d].elements();
      auto basis = c.complex.complex.module(static_cast<int>(d)).basis();
      std::sort(el.begin(), el.end());
      std::sort(basis.begin(), basis.end());
      o.report.add("order on the basis in degree " + std::to_string(d), el == basis);
    }
  }
  return o;
}

Outcome validate_gcomplex_doc(const json& doc, const Options& opt) {
  io::GComplexDoc g = load([&] { return io::decode_gcomplex(doc); });
  const double eps = opt.eps.value_or(g.eps);
  const ReferenceMap rm = ReferenceMap::identity(g.space);
  Outcome o;
  o.report = validate_controlled_complex(rm, g.complex, eps, g.square);
  if (!g.contraction.empty())
    o.report.merge(validate_controlled_contraction(rm, g.complex, g.contraction, eps), "contraction: ");
  o.report.metrics["epsilon"] = eps;
  return o;
}

Outcome validate_k1_doc(const json& doc, const Options& opt) {
  K1Simplex s = load([&] { return io::decode_k1(doc); });
  if (opt.eps && s.controlled) s.controlled->eps = *opt.eps;
  Outcome o;
  o.report = validate_k1_simplex(s);
  o.report.metrics["dimension"] = s.dimension();
  return o;
}

Outcome volodin(const json& doc, const Options& opt) {
  const VolodinPath v = load([&] { return io::decode_volodin(doc); });
  Outcome o;
  o.report.metrics["k"] = v.k;
  o.report.metrics["length"] = static_cast<double>(v.matrices.size());
  if (opt.fix_signs) {
    const VolodinPath w = fix_signs(v, opt.loop);
    o.result["path"] = strip(io::encode(w));
    o.result["order"] = io::encode(volodin_check(w));
  } else {
    o.result["order"] = io::encode(volodin_check(v));
  }
  o.report.add("common 1-triangular order", true);
  return o;
}

Outcome triangular(const json& doc, const std::string& action) {
  const io::TriangularDoc t = load([&] { return io::decode_triangular(doc); });
  const TriangularDecomposition d =
      decompose_triangular(t.f, t.order, t.unit, t.source_order ? &*t.source_order : nullptr);
  Outcome o;
  o.report.add("triangular", true);
  if (action == "decompose") {
    o.result["diagonal"] = io::encode_entries(d.diagonal);
    o.result["increasing"] = io::encode_entries(d.increasing);
    o.result["base"] = d.base;
  } else if (action == "invert") {
    const Morphism inv = invert_triangular(d);
    o.result["inverse"] = io::encode_entries(inv);
    o.report.add("left inverse", compose(t.f, inv) == Morphism::identity(t.f.source()));
    o.report.add("right inverse", compose(inv, t.f) == Morphism::identity(t.f.target()));
  } else {
    const ElementaryFactorization e = factor_elementary(d);
    json alphas = json::array();
    for (const auto& a : e.alphas) alphas.push_back(io::encode_entries(a));
    o.result["alphas"] = alphas;
    o.result["layers"] = e.layers;
    o.result["diagonal"] = io::encode_entries(e.diagonal);
    o.report.add("factors reassemble", reassemble(e) == t.f);
    o.report.metrics["factors"] = static_cast<double>(e.alphas.size());
  }
  return o;
}

Outcome localize(const json& doc, const std::string& action) {
  const io::LocalizeDoc l = load([&] { return io::decode_localize(doc); });
  const ReferenceMap rm = ReferenceMap::identity(l.space);
  Outcome o;
  if (action == "split") {
    const auto [over, rest] = split_by_support(rm, l.f, l.subset);
    o.result["over"] = io::encode_paths(over);
    o.result["rest"] = io::encode_paths(rest);
    o.report.add("pieces recompose", gadd(over, rest) == l.f);
  } else {
    const UnipotentFactors u = factor_unipotent(rm, l.f, l.order, l.subset, l.eps);
    o.result["d1"] = io::encode_paths(u.d1);
    o.result["d2"] = io::encode_paths(u.d2);
    o.report.add("d2 d1 = d", gcompose(u.d1, u.d2) == l.f);
    std::string witness;
    o.report.add("d2 is the identity outside Y^{3 eps}",
                 is_identity_outside(u.d2, rm, enlarge(l.space, l.subset, 3 * l.eps), witness), witness);
    o.report.metrics["radius_d1"] = gradius(rm, u.d1);
    o.report.metrics["radius_d2"] = gradius(rm, u.d2);
  }
  return o;
}

Outcome space(const json& doc, const Options& opt) {
  const ControlSpace x = load([&] { return io::decode_space(doc); });
  Outcome o;
  o.report.metrics["points"] = static_cast<double>(x.size());
  auto two = [&](const std::vector<std::string>& a) {
    return std::make_pair(parse_set(x, a.at(0)), parse_eps(a.at(1)));
  };
  if (!opt.enlarge.empty()) {
    const auto [y, e] = two(opt.enlarge);
    o.result["set"] = io::encode(enlarge(x, y, e));
  } else if (!opt.reduce.empty()) {
    const auto [y, e] = two(opt.reduce);
    o.result["set"] = io::encode(reduce(x, y, e));
  } else if (opt.frontier) {
    o.result["set"] = io::encode(frontier_enlargement(x, *opt.frontier));
  } else if (!opt.excise.empty()) {
    const auto [u, e] = two(opt.excise);
    o.report = check_excision(x, u, e);
    o.report.metrics["points"] = static_cast<double>(x.size());
    o.result["equal"] = o.report.ok();
  }
  return o;
}

Outcome cellular(const json& doc, const Options& opt) {
  const SimplicialInput k = load([&] { return io::decode_simplicial(doc); });
  std::optional<double> eps = opt.eps;
  if (!eps && doc.contains("epsilon")) eps = load([&] { return doc["epsilon"].get<double>(); });
  if (!eps) throw LoadFailure{Error(ErrorKind::MalformedDocument, "no epsilon")};
  const CellularChains cc = cellular_chains(k, *eps);
  Outcome o{cc.report, {}};
  // The nullhomotopy has radius < 2 eps, so the emitted complex carries 2 eps.
  o.result["complex"] = io::encode(io::GComplexDoc{cc.space.X, cc.complex, {}, cc.nullhomotopy, 2 * *eps});
  return o;
}

Outcome validate(const json& doc, const Options& opt) {
  const std::string kind = opt.kind.empty() ? io::document_type(doc) : opt.kind;
  if (!opt.kind.empty() && doc.contains("type") && io::document_type(doc) != kind)
    throw LoadFailure{Error(ErrorKind::MalformedDocument, "document is a " + io::document_type(doc))};
  if (kind == "complex") return validate_complex_doc(doc, opt);
  if (kind == "gcomplex") return validate_gcomplex_doc(doc, opt);
  if (kind == "k1simplex") return validate_k1_doc(doc, opt);
  if (kind == "volodin") return volodin(doc, opt);
  if (kind == "triangular") return triangular(doc, "decompose");
  if (kind == "localize") {
    const io::LocalizeDoc l = load([&] { return io::decode_localize(doc); });
    std::map<std::string, std::string> loc;
    for (const auto& b : l.f.target().basis()) loc[b] = l.f.target().location(b);
    const BoundednessReport b = is_epsilon_bounded(l.order, loc, l.eps, l.space);
    Outcome o;
    o.report.add("order is eps-bounded", b.epsilon_bounded, b.violating_element.value_or(""));
    o.report.metrics["chain_radius"] = b.chain_radius;
    return o;
  }
  if (kind == "simplicial") return cellular(doc, opt);
  if (kind == "space") return space(doc, opt);
  throw LoadFailure{Error(ErrorKind::MalformedDocument, "unknown document type \"" + kind + "\"")};
}

json report_json(const std::string& command, const Outcome* o, const Error* err) {
  json r = {{"schema", io::kSchema}, {"type", "report"}, {"command", command}};
  if (o) {
    const json enc = io::encode(o->report);
    r["checks"] = enc["checks"];
    r["metrics"] = enc["metrics"];
    r["status"] = enc["status"];
    r["result"] = o->result;
  } else {
    r["checks"] = json::array();
    r["metrics"] = json::object();
    r["status"] = "error";
    r["error"] = {{"kind", std::string(to_string(err->kind()))}, {"witness", err->witness()}};
  }
  return r;
}

std::string text(const json& r) {
  std::ostringstream os;
  os << "command: " << r["command"].get<std::string>() << "\nstatus: " << r["status"].get<std::string>() << "\n";
  for (const auto& c : r["checks"]) {
    os << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
    if (!c["witness"].get<std::string>().empty()) os << " [" << c["witness"].get<std::string>() << "]";
    os << "\n";
  }
  for (const auto& [k, v] : r["metrics"].items()) os << k << " = " << v.dump() << "\n";
  if (r.contains("error"))
    os << "error: " << r["error"]["kind"].get<std::string>() << " " << r["error"]["witness"].get<std::string>() << "\n";
  if (r.contains("result") && !r["result"].empty()) os << "result: " << r["result"].dump() << "\n";
  return os.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact controlled K-theory workbench"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  using Handler = std::function<Outcome(const json&)>;
  std::string command;
  Handler handler;
  bool canon = false;

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("path", opt.path, "Input document")->required();
    s->fallthrough();
    return s;
  };

  CLI::App* v = sub("validate", "Validate a document");
  v->add_option("--kind", opt.kind, "Document kind (defaults to its type field)");
  v->add_option("--epsilon", opt.eps, "Control parameter override");
  v->add_flag("--orders", opt.orders, "Require one order per degree covering each basis");
  v->callback([&] { command = "validate", handler = [&](const json& d) { return validate(d, opt); }; });

  CLI::App* f = sub("fold", "Fold a strict contractible complex into degrees 0 and 1");
  f->callback([&] {
    command = "fold";
    handler = [](const json& d) {
      const io::ComplexDoc c = load([&] { return io::decode_complex(d); });
      if (!c.has_contraction) throw Error(ErrorKind::NotStrictContractible, "no contraction given");
      const ContractedComplex folded = fold_two_degrees(c.complex);
      Outcome o;
      o.report = validate_complex(folded.complex, &folded.xi);
      if (folded.complex.top() >= 1) {
        const Morphism c1 = folded.complex.boundary(1), x0 = folded.xi.at(0);
        o.report.add("boundary and contraction are inverse",
                     compose(x0, c1) == Morphism::identity(c1.target()) &&
                         compose(c1, x0) == Morphism::identity(c1.source()));
      }
      o.result["complex"] = io::encode(io::ComplexDoc{folded, true, {}});
      return o;
    };
  });

  CLI::App* vo = sub("volodin", "Find the common order of a Volodin path");
  vo->add_flag("--fix-signs", opt.fix_signs, "Rescale a plus-minus path into mode one");
  vo->add_flag("--loop", opt.loop, "Require identity ends");
  vo->callback([&] { command = "volodin", handler = [&](const json& d) { return volodin(d, opt); }; });

  CLI::App* ce = sub("cellular", "Geometric cellular chains of a simplicial complex");
  ce->add_option("--epsilon", opt.eps, "Control parameter");
  ce->callback([&] { command = "cellular", handler = [&](const json& d) { return cellular(d, opt); }; });

  CLI::App* sp = sub("space", "Enlargements, reductions, frontier and excision");
  auto* g = sp->add_option_group("mode")->require_option(1);
  g->add_option("--enlarge", opt.enlarge, "Y eps")->expected(2);
  g->add_option("--reduce", opt.reduce, "Y eps")->expected(2);
  g->add_option("--frontier", opt.frontier, "eps");
  g->add_option("--excise", opt.excise, "U eps")->expected(2);
  sp->callback([&] { command = "space", handler = [&](const json& d) { return space(d, opt); }; });

  CLI::App* tr = app.add_subcommand("triangular", "Triangular morphism calculus");
  tr->add_option("action", opt.action, "decompose, invert or factor")
      ->required()
      ->check(CLI::IsMember({"decompose", "invert", "factor"}));
  tr->add_option("path", opt.path, "Input document")->required();
  tr->callback([&] {
    command = "triangular " + opt.action;
    handler = [&](const json& d) { return triangular(d, opt.action); };
  });

  CLI::App* lo = app.add_subcommand("localize", "Localization of geometric morphisms");
  lo->add_option("action", opt.action, "split or unipotent")->required()->check(CLI::IsMember({"split", "unipotent"}));
  lo->add_option("path", opt.path, "Input document")->required();
  lo->callback([&] {
    command = "localize " + opt.action;
    handler = [&](const json& d) { return localize(d, opt.action); };
  });

  CLI::App* ca = sub("canon", "Print a document in canonical form");
  ca->callback([&] { canon = true; });

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ctrlk: " << e.what() << "\n";
    return kMalformed;
  }

  if (canon) {
    try {
      out << io::canonical(io::normalize(io::read_document(opt.path)));
      return kOk;
    } catch (const Error& e) {
      err << "ctrlk: " << to_string(e.kind()) << ": " << e.witness() << "\n";
      return kMalformed;
    } catch (const json::exception& e) {
      err << "ctrlk: MalformedDocument: " << e.what() << "\n";
      return kMalformed;
    }
  }

  json report;
  int code = kOk;
  auto fail = [&](const Error& e, int c) {
    report = report_json(command, nullptr, &e);
    code = c;
    err << "ctrlk: " << to_string(e.kind()) << ": " << e.witness() << "\n";
  };
  try {
    const json doc = load([&] { return io::read_document(opt.path); });
    const Outcome o = handler(doc);
    report = report_json(command, &o, nullptr);
    code = o.report.ok() ? kOk : kInvalid;
  } catch (const LoadFailure& e) {
    fail(e.error, kMalformed);
  } catch (const Error& e) {
    fail(e, load_kind(e.kind()) ? kMalformed : kInvalid);
  } catch (const json::exception& e) {
    fail(Error(ErrorKind::MalformedDocument, e.what()), kMalformed);
  }
  out << (opt.format == "json" ? io::canonical(report) : text(report));
  return code;
}

}  // namespace ctrlk::cli
