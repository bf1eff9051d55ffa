#include "glt/errors.hpp"
#include "glt/gig.hpp"
#include "glt/mcmc.hpp"
#include "glt/priors.hpp"

#include <cmath>

namespace glt {

void step_F(ModelState& s, const Matrix& Y, Rng& rng) { s.factors = sample_factors(s, Y, rng); }

void step_H(ModelState& s, const PriorConfig& prior, Rng& rng) {
  const int m = s.m();
  for (int j = 0; j < s.k(); ++j) {
    const int d = s.delta.col_count(j);
    s.tau[j] = rng.beta(prior.a0 + d, prior.b0 + m - d);
  }
}

void step_P(ModelState& s, const FactorGram& g, const PriorConfig& prior, Rng& rng) {
  ParamDraw p = sample_params_block(s.delta, g, prior, rng);
  s.lambda = std::move(p.lambda);
  s.sigma2 = std::move(p.sigma2);
}

void step_A(ModelState& s, const PriorConfig& prior, const SamplerConfig& config, Rng& rng) {
  if (config.boost == BoostMode::none) return;
  const int m = s.m(), T = s.T();
  const bool frac = prior.family == PriorFamily::fractional;
  for (int j = 0; j < s.k(); ++j) {
    const int d = s.delta.col_count(j);
    if (d == 0) continue;  // Psi_j = 1 for zero columns
    const double sumf2 = s.factors.row(j).squaredNorm();
    double weighted = 0.0;  // sum over nonzero cells of lambda^2 / sigma^2
    for (int i = 0; i < m; ++i)
      if (s.delta(i, j)) weighted += s.lambda(i, j) * s.lambda(i, j) / s.sigma2[i];
    double psi, psi_new;
    if (config.boost == BoostMode::mda) {
      if (frac) {
        psi = rng.inv_gamma(config.mda_nu, config.mda_q);
        psi_new = rng.inv_gamma(config.mda_nu - 0.5 * d + 0.5 * T, config.mda_q + 0.5 * psi * sumf2);
      } else {
        psi = sample_gig(config.mda_p, config.mda_a, config.mda_b, rng);
        psi_new = sample_gig(config.mda_p + 0.5 * d - 0.5 * T, config.mda_a + weighted / (prior.A0 * psi),
                             config.mda_b + psi * sumf2, rng);
      }
    } else {
      int n = s.delta.leading_row(j);
      if (config.boost == BoostMode::asis_max)
        for (int i = 0; i < m; ++i)
          if (std::abs(s.lambda(i, j)) > std::abs(s.lambda(n, j))) n = i;
      psi = s.lambda(n, j) * s.lambda(n, j);
      if (!(psi > 0)) continue;
      if (frac) {
        if (T <= d) continue;
        psi_new = rng.inv_gamma(0.5 * (T - d), 0.5 * psi * sumf2);
      } else {
        psi_new = sample_gig(0.5 * (d - T), weighted / (prior.A0 * psi), psi * sumf2, rng);
      }
    }
    const double scale = std::sqrt(psi_new / psi);
    if (!std::isfinite(scale) || !(scale > 0)) throw NumericalError("boosting produced a degenerate scale");
    s.lambda.col(j) *= scale;
    s.factors.row(j) /= scale;
  }
}

void step_D(ModelState& s, const FactorGram& g, const PriorConfig& prior, Rng& rng, SweepDiagnostics& diag) {
  const int m = s.m();
  const std::vector<int> nz = s.delta.nonzero_columns();
  const std::vector<int> order = rng.permutation(static_cast<int>(nz.size()));
  for (int o : order) {
    const int j = nz[o];
    const int l = s.delta.leading_row(j);
    std::vector<int> rows;
    for (int i = l + 1; i < m; ++i) rows.push_back(i);
    if (rows.empty()) continue;
    const Vector O = column_odds_batch(j, rows, s.delta, g, prior);
    const double logit = log_prior_odds_indicator(s.tau[j]);
    for (std::size_t n = 0; n < rows.size(); ++n) {
      const int i = rows[n];
      const double post = O[n] + logit;
      const double lu = std::log(rng.uniform());
      ++diag.flips_proposed;
      const bool on = s.delta(i, j);
      if (on ? lu <= -post : lu <= post) {
        ++diag.flips_accepted;
        s.delta.set(i, j, !on);
        s.lambda(i, j) = 0.0;
      }
    }
  }
}

}  // namespace glt
