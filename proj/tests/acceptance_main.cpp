// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <cstdio>

#include "conical/acceptance.hpp"

int main() {
  std::vector<conical::CriterionResult> results = conical::run_acceptance(6);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%2d] %s  %s\n", r.number, r.pass ? "PASS" : "FAIL", r.name.c_str());
    if (!r.pass && !r.detail.empty()) std::printf("      %s\n", r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
