#pragma once

#include "glt/types.hpp"

#include <cstdint>
#include <vector>

namespace glt {

struct SweepDiagnostics {
  long split_proposed = 0, split_accepted = 0;
  long merge_proposed = 0, merge_accepted = 0;
  long shift_proposed = 0, shift_accepted = 0;
  long switch_proposed = 0, switch_accepted = 0;
  long add_proposed = 0, add_accepted = 0;
  long delete_proposed = 0, delete_accepted = 0;
  long flips_proposed = 0, flips_accepted = 0;
  int r_active = 0;  // at the last sweep
  int d_total = 0;   // at the last sweep

  void add(const SweepDiagnostics& o);
  bool operator==(const SweepDiagnostics&) const = default;
};

// One stored chain state. Factors are kept only when requested.
struct Draw {
  long sweep = 0;
  IndicatorMatrix delta;
  Matrix lambda;
  Vector sigma2;
  Vector tau;
  Matrix factors;
};

struct DrawStore {
  int m = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<Draw> draws;
  SweepDiagnostics diagnostics;
};

bool identical(const DrawStore& a, const DrawStore& b);

}  // namespace glt
