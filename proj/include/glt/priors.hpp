#pragma once

#include "glt/types.hpp"

namespace glt {

struct SimplicityHyper {
  double a0;
  double alpha;
};

// a0 = b0 E_q / (k - E_q), alpha = E_q / (1 - E_q / k). Requires 0 < E_q < k.
SimplicityHyper hyperparams_from_simplicity(double E_q, int k, double b0);

// (nu0 + T/2) (nu0 S0 + 0.5 sum_t y_t y_t')^{-1}; y is T x m.
Matrix estimate_inv_omega(const Matrix& y, double nu0, const Matrix& S0);

// C_i0 = (c0 - 1) / (inverse Omega)_ii. Requires c0 > 1.
Vector idio_prior_scale(double c0, const Vector& inv_omega_diag);

struct FractionDefaults {
  double b_N;
  double b_R;
  int d_free;
};
FractionDefaults fraction_defaults(int T, int m, int k);

inline constexpr double kLogitClamp = 745.0;

// Clamped logit of tau.
double log_prior_odds_indicator(double tau);

// a0 / (b0 + m - 1).
double marginalized_split_prior_odds(double a0, double b0, int m);

// Log densities used in acceptance ratios.
double log_inv_gamma_pdf(double x, double shape, double scale);
double log_normal_pdf(double x, double mean, double var);
double log_beta_pdf(double x, double a, double b);

}  // namespace glt
