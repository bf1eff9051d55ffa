#include "glt/priors.hpp"

#include "glt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace glt {

SimplicityHyper hyperparams_from_simplicity(double E_q, int k, double b0) {
  if (!(E_q > 0) || !(E_q < k)) throw DomainError("expected simplicity must lie in (0, k)");
  if (!(b0 > 0)) throw DomainError("b0 must be positive");
  return {b0 * E_q / (k - E_q), E_q / (1.0 - E_q / k)};
}

Matrix estimate_inv_omega(const Matrix& y, double nu0, const Matrix& S0) {
  if (!(nu0 > 0)) throw DomainError("nu0 must be positive");
  const double T = static_cast<double>(y.rows());
  Matrix inner = nu0 * S0;
  inner.noalias() += 0.5 * y.transpose() * y;
  Eigen::LLT<Matrix> llt(inner);
  if (llt.info() != Eigen::Success) throw NumericalError("SingularMatrix: nu0*S0 + 0.5*Y'Y is not positive definite");
  Matrix out = (nu0 + T / 2.0) * llt.solve(Matrix::Identity(inner.rows(), inner.cols()));
  return 0.5 * (out + out.transpose());
}

Vector idio_prior_scale(double c0, const Vector& inv_omega_diag) {
  if (!(c0 > 1)) throw DomainError("c0 must exceed 1");
  if (!(inv_omega_diag.array() > 0).all()) throw DomainError("inverse Omega diagonal must be positive");
  return (c0 - 1.0) * inv_omega_diag.cwiseInverse();
}

FractionDefaults fraction_defaults(int T, int m, int k) {
  const int d = k * m - k * (k - 1) / 2;
  return {1.0 / (static_cast<double>(T) * m), 1.0 / (static_cast<double>(d) * d), d};
}

double log_prior_odds_indicator(double tau) {
  const double v = std::log(tau) - std::log1p(-tau);
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -kLogitClamp, kLogitClamp);
}

double marginalized_split_prior_odds(double a0, double b0, int m) { return a0 / (b0 + m - 1); }

double log_inv_gamma_pdf(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

}  // namespace glt
