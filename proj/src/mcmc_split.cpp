#include "glt/identification.hpp"
#include "glt/mcmc.hpp"
#include "glt/priors.hpp"

#include <cmath>
#include <limits>

namespace glt {
namespace rj {

double p_split(int r_sp, int kappa, const SamplerConfig& c) {
  if (r_sp == 0) return kappa > 0 ? c.p0 : 0.0;
  return r_sp < kappa ? c.ps : 0.0;
}

double p_merge(int r_sp, int kappa, const SamplerConfig& c) {
  if (r_sp == 0) return 0.0;
  return r_sp < kappa ? 1.0 - c.ps : 1.0;
}

double log_u_density(double u, const SamplerConfig& c) {
  const double a = std::abs(u);
  if (!(a < 1.0)) return -std::numeric_limits<double>::infinity();
  switch (c.u_proposal) {
    case UProposal::uniform: return std::log(0.5);
    case UProposal::beta_on_U: return std::log(0.5) + log_beta_pdf(a, c.u0, c.v0);
    case UProposal::uniform_on_U2: return std::log(a);
    case UProposal::beta_on_U2:
    default:
      return (c.u0 - 0.5) * std::log(a * a) + (c.v0 - 1.0) * std::log1p(-a * a) -
             (std::lgamma(c.u0) + std::lgamma(c.v0) - std::lgamma(c.u0 + c.v0));
  }
}

double sample_u(const SamplerConfig& c, Rng& rng) {
  double a;
  switch (c.u_proposal) {
    case UProposal::uniform: a = rng.uniform(); break;
    case UProposal::beta_on_U: a = rng.beta(c.u0, c.v0); break;
    case UProposal::uniform_on_U2: a = std::sqrt(rng.uniform()); break;
    case UProposal::beta_on_U2:
    default: a = std::sqrt(rng.beta(c.u0, c.v0)); break;
  }
  a = std::min(a, 1.0 - 1e-12);
  return rng.uniform() < 0.5 ? -a : a;
}

void apply_split(ModelState& s, int j, int row, double U, const Vector& f_new, double tau_new) {
  const double sigma2 = s.sigma2[row];
  s.lambda(row, j) = U * std::sqrt(sigma2);
  s.sigma2[row] = (1.0 - U * U) * sigma2;
  s.delta.set(row, j, true);
  s.factors.row(j) = f_new.transpose();
  s.tau[j] = tau_new;
}

double apply_merge(ModelState& s, int j, const Vector& f_new, double tau_new) {
  const int row = s.delta.leading_row(j);
  const double lam = s.lambda(row, j);
  const double sigma2 = s.sigma2[row] + lam * lam;
  s.lambda(row, j) = 0.0;
  s.sigma2[row] = sigma2;
  s.delta.set(row, j, false);
  s.factors.row(j) = f_new.transpose();
  s.tau[j] = tau_new;
  return lam / std::sqrt(sigma2);
}

namespace {

std::vector<int> leading_rows_except(const IndicatorMatrix& delta, int skip) {
  std::vector<int> out;
  for (int l = 0; l < delta.k(); ++l) {
    if (l == skip) continue;
    const int r = delta.leading_row(l);
    if (r >= 0) out.push_back(r);
  }
  return out;
}

}  // namespace

double log_split_ratio(const ModelState& merged, const ModelState& split, int j, int row, double U, const Matrix& Y,
                       const PriorConfig& prior, const SamplerConfig& c) {
  const int m = merged.m();
  const ColumnClasses cc = classify_columns(merged.delta);
  const int kappa = std::min(merged.k() - cc.r_active, prior.S);
  const double ps = p_split(cc.r_sp, kappa, c);
  const double pm = p_merge(cc.r_sp + 1, kappa, c);
  const auto admissible = admissible_leading_rows(leading_rows_except(merged.delta, j), m, prior.S);
  const double sigma2 = merged.sigma2[row];
  const double sigma2_sp = split.sigma2[row];
  const double u2 = U * U;
  const double C0 = prior.C0[row];

  double log_a = 0.5 * std::log(sigma2) + std::log(pm) + std::log(static_cast<double>(admissible.size())) +
                 std::log(static_cast<double>(cc.zero)) + std::log(marginalized_split_prior_odds(prior.a0, prior.b0, m)) -
                 log_u_density(U, c) - std::log(static_cast<double>(cc.r_sp + 1)) - std::log(ps);
  log_a += -(prior.c0 + 1.0) * std::log1p(-u2) - C0 * u2 / (sigma2 * (1.0 - u2));

  std::vector<int> others;
  for (int l = 0; l < merged.k(); ++l)
    if (l != j && merged.delta(row, l)) others.push_back(l);
  const Vector y = Y.col(row);
  if (prior.family == PriorFamily::standard) {
    double norm2 = 0.0;
    for (int l : others) norm2 += merged.lambda(row, l) * merged.lambda(row, l);
    const double q = static_cast<double>(others.size());
    log_a += log_normal_pdf(split.lambda(row, j), 0.0, prior.A0 * sigma2_sp) - 0.5 * q * std::log1p(-u2) -
             u2 * norm2 / (2.0 * sigma2 * prior.A0 * (1.0 - u2));
  } else {
    std::vector<int> with_j = others;
    with_j.push_back(j);
    log_a += log_fractional_normalizer(others, merged.factors, y, sigma2, prior.b) -
             log_fractional_normalizer(with_j, split.factors, y, sigma2_sp, prior.b);
  }
  return log_a;
}

}  // namespace rj

void step_R(ModelState& s, const Matrix& Y, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
            SweepDiagnostics& diag) {
  const int m = s.m(), k = s.k(), T = s.T();
  const ColumnClasses cc = classify_columns(s.delta);
  const int kappa = std::min(k - cc.r_active, prior.S);
  const double ps = rj::p_split(cc.r_sp, kappa, config);
  const double pm = rj::p_merge(cc.r_sp, kappa, config);
  const double u = rng.uniform();

  if (u < ps) {
    std::vector<int> zero_cols;
    std::vector<int> leading;
    for (int l = 0; l < k; ++l) {
      const int r = s.delta.leading_row(l);
      if (r < 0)
        zero_cols.push_back(l);
      else
        leading.push_back(r);
    }
    const auto admissible = admissible_leading_rows(leading, m, prior.S);
    if (zero_cols.empty() || admissible.empty()) return;
    ++diag.split_proposed;
    const int j = zero_cols[rng.uniform_int(static_cast<int>(zero_cols.size()))];
    const int row = admissible[rng.uniform_int(static_cast<int>(admissible.size()))];
    const double U = rj::sample_u(config, rng);
    const double sigma2 = s.sigma2[row];
    // Factor proposal: conditional of f given the row residual.
    Vector f(T);
    const double sd = std::sqrt(1.0 - U * U);
    for (int t = 0; t < T; ++t) {
      double resid = Y(t, row);
      for (int l = 0; l < k; ++l)
        if (l != j && s.delta(row, l)) resid -= s.lambda(row, l) * s.factors(l, t);
      f[t] = U / std::sqrt(sigma2) * resid + sd * rng.normal();
    }
    const double tau_new = rng.beta(prior.a0 + 1.0, prior.b0 + m - 1.0);
    ModelState prop = s;
    rj::apply_split(prop, j, row, U, f, tau_new);
    const double log_a = rj::log_split_ratio(s, prop, j, row, U, Y, prior, config);
    if (std::log(rng.uniform()) <= log_a) {
      s = std::move(prop);
      ++diag.split_accepted;
    }
  } else if (u < ps + pm) {
    std::vector<int> spurious;
    for (int l = 0; l < k; ++l)
      if (is_spurious(s.delta, l)) spurious.push_back(l);
    if (spurious.empty()) return;
    ++diag.merge_proposed;
    const int j = spurious[rng.uniform_int(static_cast<int>(spurious.size()))];
    const int row = s.delta.leading_row(j);
    Vector f(T);
    for (int t = 0; t < T; ++t) f[t] = rng.normal();
    const double tau_new = rng.beta(prior.a0, prior.b0 + m);
    ModelState prop = s;
    const double U = rj::apply_merge(prop, j, f, tau_new);
    const double log_a = -rj::log_split_ratio(prop, s, j, row, U, Y, prior, config);
    if (std::log(rng.uniform()) <= log_a) {
      s = std::move(prop);
      ++diag.merge_accepted;
    }
  }
}

}  // namespace glt
