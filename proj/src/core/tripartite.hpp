#pragma once

#include "covariance.hpp"

#include <array>
#include <string>

namespace optomech::tripartite {

struct CutResult {
  std::string name;  // e.g. "mechanics|rest"
  int mode = 0;      // the transposed single mode
  double value = 0.0;  // smallest transposed symplectic eigenvalue minus 1/2
};

struct TripartiteReport {
  std::array<CutResult, 3> cuts;
  bool fully_inseparable = false;  // every 1|2 cut is NPT
};

// Modes ordered (mechanics, Stokes, anti-Stokes). Only NPT tests are made.
TripartiteReport classify_tripartite(const CovarianceMatrix& cm);

// Compact JSON object with the three cuts and the verdict.
std::string to_json(const TripartiteReport& report);

}  // namespace optomech::tripartite
