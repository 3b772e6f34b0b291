#pragma once

#include <vector>

#include "conical/cone.hpp"

namespace conical::testing {

inline RatVec rv(std::vector<long> v) {
  RatVec r;
  for (long x : v) r.push_back(Rat(x));
  return r;
}

inline RatMat rm(std::vector<std::vector<long>> rows) {
  RatMat m;
  for (auto& r : rows) m.push_back(rv(r));
  return m;
}

inline Cone cone(size_t dim, std::vector<std::vector<long>> gens) {
  std::vector<RatVec> g;
  for (auto& x : gens) g.push_back(rv(x));
  return Cone(dim, g);
}

inline LatticeCone lat_cone(size_t dim, std::vector<std::vector<long>> gens, std::vector<std::vector<long>> lattice) {
  std::vector<RatVec> l;
  for (auto& x : lattice) l.push_back(rv(x));
  return LatticeCone(cone(dim, gens), l);
}

inline LatticeCone std_cone(size_t dim, std::vector<std::vector<long>> gens) {
  return LatticeCone::with_induced_lattice(cone(dim, gens));
}

}  // namespace conical::testing
