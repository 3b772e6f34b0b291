#pragma once

// The fixed catalog of verification cones: every code path (smoothness,
// subdivision, exotic lattices, non-simpliciality, non-pointedness) is
// represented. Sample points lie in the negative dual chamber of the pointed
// entries.

#include <string>
#include <vector>

#include "conical/cone.hpp"

namespace conical {

struct CatalogEntry {
  std::string name;
  LatticeCone cone;
  std::vector<double> sample_point;  // empty for non-pointed cones
};

inline std::vector<CatalogEntry> standard_catalog() {
  auto lc = [](size_t dim, std::vector<std::vector<long>> gens,
               std::vector<std::vector<long>> lattice = {}) {
    std::vector<RatVec> g;
    for (auto& row : gens) {
      RatVec v;
      for (long x : row) v.push_back(Rat(x));
      g.push_back(v);
    }
    Cone c(dim, g);
    if (lattice.empty()) return LatticeCone::with_induced_lattice(c);
    std::vector<RatVec> l;
    for (auto& row : lattice) {
      RatVec v;
      for (long x : row) v.push_back(Rat(x));
      l.push_back(v);
    }
    return LatticeCone(c, l);
  };

  std::vector<CatalogEntry> out;
  out.push_back({"ray", lc(1, {{1}}), {-1.0}});
  out.push_back({"quadrant", lc(2, {{1, 0}, {0, 1}}), {-1.0, -2.0}});
  out.push_back({"skew", lc(2, {{1, 0}, {1, 1}}), {-1.0, -0.5}});
  out.push_back({"nonsmooth2", lc(2, {{1, 0}, {1, 2}}), {-1.0, -1.0}});
  out.push_back({"nonsmooth2-wide", lc(2, {{1, 0}, {1, 3}}), {-1.0, -1.0}});
  out.push_back({"chen3", lc(3, {{1, 0, 0}, {1, 1, 0}, {1, 1, 1}}), {-1.0, -1.0, -1.0}});
  out.push_back({"square3", lc(3, {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}, {0, 1, 1}}), {-1.0, -1.0, -1.0}});
  out.push_back({"quadrant-sum-lattice", lc(2, {{1, 0}, {0, 1}}, {{1, 1}, {0, 1}}), {-1.0, -2.0}});
  out.push_back({"quadrant-checkerboard", lc(2, {{1, 0}, {0, 1}}, {{1, 1}, {1, -1}}), {-1.0, -2.0}});
  out.push_back({"nonsmooth3", lc(3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 2}}), {-1.0, -1.0, -1.0}});
  out.push_back({"line", lc(1, {{1}, {-1}}), {}});
  out.push_back({"plane", lc(2, {{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), {}});
  out.push_back({"wedge-with-line", lc(3, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), {}});
  return out;
}

}  // namespace conical
