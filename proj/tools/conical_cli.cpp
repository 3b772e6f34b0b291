// Command line front end: cone ingestion, pipeline invocation, series and
// report emission, and the acceptance-catalog runner.
//
// Exit codes: 0 success, 1 usage or file parse error, 2 validation error,
// 3 verification failure, 4 insufficient truncation order.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "conical/acceptance.hpp"
#include "conical/conical.hpp"
#include "conical/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitValidation = 2;
constexpr int kExitVerification = 3;
constexpr int kExitOrder = 4;

struct ParseFailure {
  std::string message;
};
struct ValidationFailure {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure{"cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LoadedCone {
  conical::LatticeCone cone;
  conical::InnerProduct q;
  std::string label;
};

LoadedCone load_cone(const std::string& path) {
  conical::ConeSpecFile spec;
  try {
    spec = conical::parse_cone_spec(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw ParseFailure{std::string(e.what()) + " (" + path + ")"};
  }
  try {
    return LoadedCone{conical::build_lattice_cone(spec), conical::build_inner_product(spec), spec.label};
  } catch (const std::invalid_argument& e) {
    throw ValidationFailure{std::string(e.what()) + " (" + path + ")"};
  }
}

void emit(bool json, const nlohmann::json& j, const std::string& text) {
  if (json)
    std::cout << j.dump() << "\n";
  else
    std::cout << text;
}

nlohmann::json cone_to_json(const conical::LatticeCone& lc) {
  nlohmann::json j = nlohmann::json::parse(conical::serialize_cone_spec(lc));
  j["dim"] = lc.dim();
  j["key"] = conical::canonical_key(lc);
  return j;
}

std::string cone_to_text(const conical::LatticeCone& lc) {
  std::string s = "dim " + std::to_string(lc.dim()) + "; generators";
  for (const auto& g : lc.cone().generators()) s += " " + conical::vec_to_string(g);
  if (lc.cone().generators().empty()) s += " (none: zero cone)";
  s += "; lattice";
  for (const auto& u : lc.lattice_basis()) s += " " + conical::vec_to_string(u);
  if (lc.lattice_basis().empty()) s += " (trivial)";
  return s;
}

conical::Subdivision assemble_subdivision(const LoadedCone& parent, const std::vector<std::string>& piece_paths) {
  if (piece_paths.empty()) return conical::smooth_subdivide(parent.cone);
  std::vector<conical::LatticeCone> pieces;
  for (const auto& path : piece_paths) {
    conical::ConeSpecFile spec;
    try {
      spec = conical::parse_cone_spec(read_file(path));
    } catch (const std::invalid_argument& e) {
      throw ParseFailure{std::string(e.what()) + " (" + path + ")"};
    }
    try {
      // pieces of a subdivision carry the parent lattice by definition
      pieces.emplace_back(conical::Cone(spec.ambient_dim, spec.generators), parent.cone.lattice_basis());
    } catch (const std::invalid_argument& e) {
      throw ValidationFailure{std::string(e.what()) + " (" + path + ")"};
    }
  }
  return conical::Subdivision{parent.cone, pieces};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conical: exact exponential sums, integrals and Euler-Maclaurin identities on lattice cones"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  bool json = false;
  app.add_flag("--json", json, "machine-readable JSON output");

  std::string cone_path;
  std::vector<std::string> piece_paths;
  int order = 6;
  size_t face_index = 0;
  bool variant_open = false, variant_closed = false, smooth = false;

  auto* faces_cmd = app.add_subcommand("faces", "list the faces of a cone");
  faces_cmd->add_option("cone", cone_path)->required();

  auto* transverse_cmd = app.add_subcommand("transverse", "transverse cone along a face");
  transverse_cmd->add_option("cone", cone_path)->required();
  transverse_cmd->add_option("--face", face_index, "index into the face list")->required();

  auto* coproduct_cmd = app.add_subcommand("coproduct", "face/transverse coproduct of a cone");
  coproduct_cmd->add_option("cone", cone_path)->required();

  auto* subdivide_cmd = app.add_subcommand("subdivide", "triangulate (optionally into smooth pieces)");
  subdivide_cmd->add_option("cone", cone_path)->required();
  subdivide_cmd->add_flag("--smooth", smooth, "refine until every piece is unimodular");

  auto* analyze_cmd = app.add_subcommand("analyze-subdivision", "face classes, open faces and multiplicities");
  analyze_cmd->add_option("cone", cone_path)->required();
  analyze_cmd->add_option("pieces", piece_paths, "piece spec files (default: the smooth subdivision)");

  auto* sum_cmd = app.add_subcommand("sum", "exponential sum as a truncated germ");
  sum_cmd->add_option("cone", cone_path)->required();
  sum_cmd->add_flag("--open", variant_open, "interior lattice points");
  sum_cmd->add_flag("--closed", variant_closed, "all lattice points (default)");
  sum_cmd->add_option("--order", order, "truncation order (default 6)")->check(CLI::Range(0, 200));

  auto* integral_cmd = app.add_subcommand("integral", "exponential integral (exact germ)");
  integral_cmd->add_option("cone", cone_path)->required();

  auto* mu_cmd = app.add_subcommand("mu", "interpolating factor (holomorphic projection of the sum)");
  mu_cmd->add_option("cone", cone_path)->required();
  mu_cmd->add_flag("--open", variant_open);
  mu_cmd->add_flag("--closed", variant_closed);
  mu_cmd->add_option("--order", order, "truncation order (default 6)")->check(CLI::Range(0, 200));

  auto* verify_em_cmd = app.add_subcommand("verify-em", "verify the Euler-Maclaurin identities on a cone");
  verify_em_cmd->add_option("cone", cone_path)->required();
  verify_em_cmd->add_option("--order", order, "certification order (default 6)")->check(CLI::Range(0, 200));

  auto* verify_sub_cmd = app.add_subcommand("verify-subdivision", "verify the subdivision identities");
  verify_sub_cmd->add_option("cone", cone_path)->required();
  verify_sub_cmd->add_option("pieces", piece_paths, "piece spec files (default: the smooth subdivision)");
  verify_sub_cmd->add_option("--order", order, "certification order (default 6)")->check(CLI::Range(0, 200));

  auto* catalog_cmd = app.add_subcommand("catalog", "run the full acceptance catalog");
  catalog_cmd->add_option("--order", order, "certification order (default 6)")->check(CLI::Range(0, 200));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitParse;
  }

  try {
    if (faces_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      auto fs = conical::lattice_faces(in.cone);
      nlohmann::json arr = nlohmann::json::array();
      std::string text;
      for (size_t i = 0; i < fs.size(); ++i) {
        conical::LatticeCone f = conical::face_as_lattice_cone(fs[i]);
        arr.push_back(cone_to_json(f));
        text += "[" + std::to_string(i) + "] " + cone_to_text(f) + "\n";
      }
      emit(json, arr, text);
    } else if (transverse_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      auto fs = conical::lattice_faces(in.cone);
      if (face_index >= fs.size()) throw ValidationFailure{"face index out of range (faces: " + std::to_string(fs.size()) + ")"};
      conical::LatticeCone t = conical::transverse(in.cone, fs[face_index], in.q);
      emit(json, cone_to_json(t), cone_to_text(t) + "\n");
    } else if (coproduct_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::TensorSum d = conical::coproduct(in.cone, in.q);
      nlohmann::json arr = nlohmann::json::array();
      std::string text;
      for (const auto& t : d.terms()) {
        nlohmann::json jt;
        jt["transverse"] = cone_to_json(t.left);
        jt["face"] = cone_to_json(t.right);
        jt["coeff"] = conical::rat_to_string(t.coeff);
        arr.push_back(jt);
        text += "(" + cone_to_text(t.left) + ")  (x)  (" + cone_to_text(t.right) + ")\n";
      }
      emit(json, arr, text);
    } else if (subdivide_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::Subdivision s = smooth ? conical::smooth_subdivide(in.cone) : conical::triangulate(in.cone);
      nlohmann::json arr = nlohmann::json::array();
      std::string text;
      for (const auto& p : s.pieces) {
        arr.push_back(cone_to_json(p));
        text += conical::serialize_cone_spec(p, in.q) + "\n";
      }
      emit(json, arr, text);
    } else if (analyze_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::Subdivision s = assemble_subdivision(in, piece_paths);
      conical::SubdivisionAnalysis a = conical::analyze(s);
      nlohmann::json j = conical::analysis_to_json(a);
      std::string text;
      for (const auto& af : a.faces) {
        text += std::string(conical::face_class_name(af.cls)) + ":";
        for (const auto& g : af.cone.generators()) text += " " + conical::vec_to_string(g);
        text += "\n";
      }
      text += "open faces: " + std::to_string(a.open_faces.size()) + "; intersection cones: " +
              std::to_string(a.intersections.size()) + "\n";
      emit(json, j, text);
    } else if (sum_cmd->parsed() || mu_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      if (variant_open && variant_closed) throw ValidationFailure{"choose one of --open/--closed"};
      conical::SumVariant variant = variant_open ? conical::SumVariant::open : conical::SumVariant::closed;
      conical::Germ g = conical::Germ::zero(in.cone.ambient_dim());
      if (sum_cmd->parsed()) {
        g = variant == conical::SumVariant::open ? conical::exp_sum_open(in.cone, order)
                                                 : conical::exp_sum_closed(in.cone, order);
        g = conical::display_germ(g, in.q);
      } else {
        g = conical::interpolator(in.cone, variant, order, in.q);
      }
      emit(json, conical::germ_to_json(g), conical::germ_to_string(g) + "\n");
    } else if (integral_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::Germ g = conical::exp_integral(in.cone);
      emit(json, conical::germ_to_json(g), conical::germ_to_string(g) + "\n");
    } else if (verify_em_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::EmReport r = conical::verify_euler_maclaurin(in.cone, order, in.q);
      emit(json, conical::em_report_to_json(r, in.q), conical::em_report_to_text(r, in.q));
      if (r.order_insufficient) return kExitOrder;
      if (!r.all_pass()) return kExitVerification;
    } else if (verify_sub_cmd->parsed()) {
      LoadedCone in = load_cone(cone_path);
      conical::Subdivision s = assemble_subdivision(in, piece_paths);
      conical::SubdivisionIdentityReport r = conical::verify_subdivision_identities(s, order, in.q);
      std::string text;
      for (const auto& v : r.verdicts) {
        text += std::string(v.pass ? "PASS " : "FAIL ") + v.name + "\n";
        if (!v.pass && !v.detail.empty()) text += "     " + v.detail + "\n";
      }
      emit(json, conical::subdivision_report_to_json(r), text);
      if (r.order_insufficient) return kExitOrder;
      if (!r.all_pass()) return kExitVerification;
    } else if (catalog_cmd->parsed()) {
      auto results = conical::run_acceptance(order);
      bool all = true;
      nlohmann::json arr = nlohmann::json::array();
      std::string text;
      for (const auto& r : results) {
        nlohmann::json jr;
        jr["number"] = r.number;
        jr["name"] = r.name;
        jr["pass"] = r.pass;
        if (!r.detail.empty()) jr["detail"] = r.detail;
        arr.push_back(jr);
        char line[16];
        std::snprintf(line, sizeof(line), "[%2d] ", r.number);
        text += std::string(line) + (r.pass ? "PASS  " : "FAIL  ") + r.name + "\n";
        if (!r.pass && !r.detail.empty()) text += "      " + r.detail + "\n";
        all = all && r.pass;
      }
      emit(json, arr, text);
      if (!all) return kExitVerification;
    }
  } catch (const ParseFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitParse;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitValidation;
  } catch (const conical::InsufficientOrderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOrder;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
