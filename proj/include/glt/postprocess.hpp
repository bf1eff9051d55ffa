#pragma once

#include "glt/draws.hpp"
#include "glt/types.hpp"

#include <map>
#include <vector>

namespace glt {

struct ScreenResult {
  std::vector<bool> mask;
  double p_V = 0.0;
};

// Flags draws whose nonzero columns are variance identified.
ScreenResult screen_variance_identified(const DrawStore& store);

struct NumFactors {
  std::map<int, double> pmf;
  int mode = 0;  // smallest r among ties
};
NumFactors posterior_num_factors(const DrawStore& store, const std::vector<bool>& mask);

// Orders nonzero columns by leading row (zero columns last, in original order) and
// makes every leading loading positive. Factors and tau follow the columns.
Draw resolve_trivial_rotation(const Draw& d);

// 1 + 2 * sum of autocorrelations, truncated by Geyer's initial monotone sequence.
double inefficiency_factor(const std::vector<double>& x);

struct PosteriorSummary {
  int n_draws = 0;
  int n_identified = 0;
  double p_V = 0.0;
  std::map<int, double> p_r;
  int r_mode = 0;

  std::vector<int> l_star;  // 0-based leading rows
  double p_L = 0.0;

  IndicatorMatrix hpm;
  double p_H = 0.0;
  int d_H = 0;
  std::vector<int> l_H;

  IndicatorMatrix mpm;
  int d_M = 0;
  Matrix inclusion_probs;  // over draws with leading rows l_star
  Matrix loading_means;
  Vector sigma2_means;

  Matrix communalities;  // R2_ij averaged over identified draws
  Vector communality_totals;
  Vector p_zero_row;
  double d_mean = 0.0;

  double if_d = 1.0;
  double if_r = 1.0;
  SweepDiagnostics diagnostics;
};

PosteriorSummary summarize(const DrawStore& store, const std::vector<bool>& mask);

// Concatenates chains; diagnostics counters are summed.
DrawStore merge_stores(const std::vector<DrawStore>& stores);

}  // namespace glt
