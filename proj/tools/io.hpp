#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ctrlk/ctrlk.hpp"

namespace ctrlk::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "ctrlk/1";

/// Parses a file; MalformedDocument on unreadable or non-JSON input or a
/// wrong "schema" field.
json read_document(const std::string& path);
json parse_document(const std::string& text);
/// Sorted keys, two-space indent, trailing newline.
std::string canonical(const json& j);
/// The "type" field, or `fallback` when absent.
std::string document_type(const json& doc, const std::string& fallback = {});

json encode(const Ring& r);
Ring decode_ring(const json& j);
json encode(const Ring& r, const Scalar& s);
Scalar decode_scalar(const Ring& r, const json& j);

json encode(const BasedModule& m);
BasedModule decode_module(const Ring& r, const json& j);
json encode_entries(const Morphism& f);
Morphism decode_entries(const BasedModule& source, const BasedModule& target, const json& j);
/// {"source", "target", "entries"}.
json encode(const Morphism& f);
Morphism decode_morphism(const Ring& r, const json& j);

json encode(const Poset& p);
Poset decode_poset(const json& j);
json encode(const PointSet& s);
PointSet decode_points(const json& j);

json encode(const ControlSpace& x);
ControlSpace decode_space(const json& j);

/// Complex with optional contraction and orders.
struct ComplexDoc {
  ContractedComplex complex;
  bool has_contraction = false;
  std::vector<Poset> orders;
};
json encode(const ComplexDoc& c);
ComplexDoc decode_complex(const json& j);
ComplexDoc decode_complex(const Ring& r, const json& j);
json encode_body(const ComplexDoc& c);

json encode(const VolodinPath& v);
VolodinPath decode_volodin(const json& j);

json encode(const SimplicialInput& s, double eps);
SimplicialInput decode_simplicial(const json& j);

json encode(const Ring& r, const GPath& p);
json encode_paths(const GMorphism& f);
GMorphism decode_gmorphism(const BasedModule& s, const BasedModule& t, const json& j);

/// Geometric complex over a space (E = X) with optional contraction.
struct GComplexDoc {
  ControlSpace space;
  GComplex complex;
  GMaps contraction;
  GWitnesses square;
  double eps = 0;
};
json encode(const GComplexDoc& g);
GComplexDoc decode_gcomplex(const json& j);

struct TriangularDoc {
  Morphism f;
  Poset order;
  std::optional<Poset> source_order;
  UnitKind unit = UnitKind::AllUnits;
};
json encode(const TriangularDoc& t);
TriangularDoc decode_triangular(const json& j);

struct LocalizeDoc {
  ControlSpace space;
  GMorphism f;
  PointSet subset;
  double eps = 0;
  Poset order;
};
json encode(const LocalizeDoc& l);
LocalizeDoc decode_localize(const json& j);

json encode(const K1Simplex& s);
K1Simplex decode_k1(const json& j);

json encode(const Report& r);
std::string unit_name(UnitKind u);
UnitKind decode_unit(const std::string& s);

/// Re-encodes a document through its decoder; MalformedDocument for
/// unknown types.
json normalize(const json& doc);

}  // namespace ctrlk::io
