#pragma once

// File formats and rendering: the line-oriented JSON cone spec (generators,
// optional lattice, optional Gram matrix, labels), JSON/text germ output and
// the report serializations used by the command line tool. Rationals travel
// as strings "p/q" so no float ever contaminates the data.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "conical/cone.hpp"
#include "conical/euler_maclaurin.hpp"
#include "conical/germ.hpp"
#include "conical/subdivision.hpp"

namespace conical {

struct ConeSpecFile {
  size_t ambient_dim = 0;
  RatMat generators;
  std::optional<RatMat> lattice;
  std::optional<RatMat> inner_product;
  std::string label;
};

namespace io_detail {

inline Rat parse_entry(const nlohmann::json& j) {
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  throw std::invalid_argument("cone spec: matrix entries must be integers or \"p/q\" strings");
}

inline RatMat parse_matrix(const nlohmann::json& j, size_t expect_cols, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument("cone spec: " + what + " must be an array of rows");
  RatMat m;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != expect_cols)
      throw std::invalid_argument("cone spec: " + what + " row width must equal ambient_dim");
    RatVec v;
    for (const auto& x : row) v.push_back(parse_entry(x));
    m.push_back(v);
  }
  return m;
}

inline nlohmann::json matrix_to_json(const RatMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : r) row.push_back(rat_to_string(x));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace io_detail

inline ConeSpecFile parse_cone_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("cone spec: malformed JSON: ") + e.what());
  }
  ConeSpecFile spec;
  if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer() || j["ambient_dim"].get<long>() <= 0)
    throw std::invalid_argument("cone spec: positive integer ambient_dim required");
  spec.ambient_dim = j["ambient_dim"].get<size_t>();
  if (!j.contains("generators")) throw std::invalid_argument("cone spec: generators required");
  spec.generators = io_detail::parse_matrix(j["generators"], spec.ambient_dim, "generators");
  for (const auto& g : spec.generators)
    if (is_zero(g)) throw std::invalid_argument("cone spec: zero generator");
  if (j.contains("lattice")) spec.lattice = io_detail::parse_matrix(j["lattice"], spec.ambient_dim, "lattice");
  if (j.contains("inner_product"))
    spec.inner_product = io_detail::parse_matrix(j["inner_product"], j["inner_product"].size(), "inner_product");
  if (j.contains("label")) spec.label = j["label"].get<std::string>();
  return spec;
}

inline LatticeCone build_lattice_cone(const ConeSpecFile& spec) {
  Cone c(spec.ambient_dim, spec.generators);
  if (!spec.lattice) return LatticeCone::with_induced_lattice(c);
  return LatticeCone(c, *spec.lattice);
}

inline InnerProduct build_inner_product(const ConeSpecFile& spec) {
  if (!spec.inner_product) return InnerProduct();
  return InnerProduct(*spec.inner_product);
}

inline std::string serialize_cone_spec(const LatticeCone& lc, const InnerProduct& q = InnerProduct(),
                                       const std::string& label = "") {
  nlohmann::json j;
  if (!label.empty()) j["label"] = label;
  j["ambient_dim"] = lc.ambient_dim();
  RatMat gens;
  for (const auto& g : lc.cone().generators()) gens.push_back(g);
  j["generators"] = io_detail::matrix_to_json(gens);
  RatMat lattice;
  for (const auto& u : lc.lattice_basis()) lattice.push_back(u);
  j["lattice"] = io_detail::matrix_to_json(lattice);
  if (!q.is_identity()) j["inner_product"] = io_detail::matrix_to_json(q.gram());
  return j.dump();
}

// ---------------------------------------------------------------------------
// germ output. Both renderings run through the polar decomposition so the
// text and JSON forms carry the same Laurent-style data.

inline Germ display_germ(const Germ& g, const InnerProduct& q = InnerProduct()) {
  GermSplit split = polar_decompose(g, q);
  return germ_add(split.polar, Germ::from_series(split.holomorphic));
}

inline nlohmann::json series_coefficients_json(const TruncatedSeries& s) {
  nlohmann::json arr = nlohmann::json::array();
  s.for_each([&](const Mono& m, const Rat& c) {
    nlohmann::json entry;
    entry["exponents"] = m;
    entry["value"] = rat_to_string(c);
    arr.push_back(entry);
  });
  return arr;
}

inline nlohmann::json germ_to_json(const Germ& g) {
  nlohmann::json j;
  j["nvars"] = g.nvars;
  j["reliable_order"] = g.reliable_order() >= kExactOrder ? -1 : g.reliable_order();
  nlohmann::json terms = nlohmann::json::array();
  std::vector<const GermTerm*> order;
  for (const auto& t : g.terms) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const GermTerm* a, const GermTerm* b) {
    int da = denominator_degree(a->den), db = denominator_degree(b->den);
    if (da != db) return da > db;
    return a->den < b->den;
  });
  for (const GermTerm* t : order) {
    nlohmann::json jt;
    nlohmann::json den = nlohmann::json::array();
    for (const auto& [f, p] : t->den) {
      nlohmann::json jf;
      nlohmann::json coords = nlohmann::json::array();
      for (const auto& x : f.vector()) coords.push_back(rat_to_string(x));
      jf["form"] = coords;
      jf["power"] = p;
      den.push_back(jf);
    }
    jt["denominator"] = den;
    jt["coefficients"] = series_coefficients_json(t->num);
    terms.push_back(jt);
  }
  j["terms"] = terms;
  return j;
}

// ---------------------------------------------------------------------------
// reports

inline nlohmann::json verdicts_to_json(const std::vector<Verdict>& verdicts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : verdicts) {
    nlohmann::json jv;
    jv["name"] = v.name;
    jv["pass"] = v.pass;
    if (!v.detail.empty()) jv["detail"] = v.detail;
    arr.push_back(jv);
  }
  return arr;
}

inline nlohmann::json em_report_to_json(const EmReport& r, const InnerProduct& q = InnerProduct()) {
  nlohmann::json j;
  j["order"] = r.order;
  j["strongly_convex"] = r.strongly_convex;
  j["order_insufficient"] = r.order_insufficient;
  j["cone_key"] = canonical_key(r.cone);
  j["germs"]["sum_open"] = germ_to_json(display_germ(r.s_open, q));
  j["germs"]["sum_closed"] = germ_to_json(display_germ(r.s_closed, q));
  j["germs"]["integral"] = germ_to_json(r.integral);
  j["germs"]["mu_open"] = germ_to_json(r.mu_open);
  j["germs"]["mu_closed"] = germ_to_json(r.mu_closed);
  j["germs"]["first_factor_open"] = germ_to_json(r.s1_open);
  j["germs"]["first_factor_closed"] = germ_to_json(r.s1_closed);
  j["germs"]["second_factor_open"] = germ_to_json(r.s2_open);
  j["germs"]["second_factor_closed"] = germ_to_json(r.s2_closed);
  j["verdicts"] = verdicts_to_json(r.verdicts);
  return j;
}

inline std::string em_report_to_text(const EmReport& r, const InnerProduct& q = InnerProduct()) {
  std::ostringstream out;
  out << "cone: " << canonical_key(r.cone) << "\n";
  out << "order: " << r.order << (r.strongly_convex ? "" : "   (not strongly convex)") << "\n";
  out << "S_open    = " << germ_to_string(display_germ(r.s_open, q)) << "\n";
  out << "S_closed  = " << germ_to_string(display_germ(r.s_closed, q)) << "\n";
  out << "I         = " << germ_to_string(r.integral) << "\n";
  out << "mu_open   = " << germ_to_string(r.mu_open) << "\n";
  out << "mu_closed = " << germ_to_string(r.mu_closed) << "\n";
  for (const auto& v : r.verdicts) {
    out << (v.pass ? "PASS " : "FAIL ") << v.name << "\n";
    if (!v.pass && !v.detail.empty()) out << "     " << v.detail << "\n";
  }
  return out.str();
}

inline nlohmann::json subdivision_report_to_json(const SubdivisionIdentityReport& r) {
  nlohmann::json j;
  j["order"] = r.order;
  j["order_insufficient"] = r.order_insufficient;
  j["verdicts"] = verdicts_to_json(r.verdicts);
  return j;
}

inline const char* face_class_name(FaceClass c) {
  switch (c) {
    case FaceClass::parent_j0: return "parent-face-of-no-piece";
    case FaceClass::parent_j1: return "parent-face-of-one-piece";
    case FaceClass::parent_j2: return "parent-face-of-several-pieces";
    case FaceClass::induced: return "subdivision-induced";
    case FaceClass::neither: return "interior-other";
  }
  return "?";
}

inline nlohmann::json analysis_to_json(const SubdivisionAnalysis& a) {
  nlohmann::json j;
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& af : a.faces) {
    nlohmann::json jf;
    RatMat gens;
    for (const auto& g : af.cone.generators()) gens.push_back(g);
    jf["generators"] = io_detail::matrix_to_json(gens);
    jf["dim"] = af.cone.dim();
    jf["class"] = face_class_name(af.cls);
    jf["pieces"] = af.piece_indices;
    if (af.alpha) jf["alpha"] = *af.alpha;
    faces.push_back(jf);
  }
  j["faces"] = faces;
  nlohmann::json open = nlohmann::json::array();
  for (const auto& f : a.open_faces) {
    RatMat gens;
    for (const auto& g : f.face_cone.generators()) gens.push_back(g);
    open.push_back(io_detail::matrix_to_json(gens));
  }
  j["open_faces"] = open;
  nlohmann::json inter = nlohmann::json::array();
  for (const auto& [h, l] : a.intersections) {
    nlohmann::json ji;
    ji["cone_key"] = canonical_key(h);
    ji["lambda"] = rat_to_string(l);
    inter.push_back(ji);
  }
  j["intersections"] = inter;
  return j;
}

}  // namespace conical
