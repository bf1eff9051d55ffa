#pragma once

#include "glt/rng.hpp"
#include "glt/types.hpp"

#include <vector>

namespace glt {

struct SimulationSpec {
  int m = 12;
  int T = 500;
  std::vector<int> leading = {0, 1, 3};  // 0-based, one per factor
  double load_lo = 0.6;                  // nonzero loadings are uniform on ±[lo, hi]
  double load_hi = 1.0;
  double sigma2_lo = 0.2;
  double sigma2_hi = 0.5;
  double density = 1.0;  // inclusion probability below the leading rows
};

struct SimulatedData {
  Matrix y;  // T x m, not standardized
  Matrix lambda;
  Vector sigma2;
  IndicatorMatrix delta;
  Matrix factors;  // r x T
};

// Draws a GLT factor model with positive leading loadings and data from it.
SimulatedData simulate(const SimulationSpec& spec, Rng& rng);

}  // namespace glt
