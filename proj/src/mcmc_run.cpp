#include "glt/errors.hpp"
#include "glt/mcmc.hpp"

#include <spdlog/spdlog.h>

namespace glt {

std::string to_string(BoostMode b) {
  switch (b) {
    case BoostMode::none: return "none";
    case BoostMode::asis_max: return "asis_max";
    case BoostMode::asis_leading: return "asis_leading";
    case BoostMode::mda: return "mda";
  }
  return "?";
}

std::string to_string(UProposal u) {
  switch (u) {
    case UProposal::uniform: return "uniform";
    case UProposal::beta_on_U: return "beta_on_U";
    case UProposal::uniform_on_U2: return "uniform_on_U2";
    case UProposal::beta_on_U2: return "beta_on_U2";
  }
  return "?";
}

BoostMode parse_boost_mode(const std::string& s) {
  for (auto b : {BoostMode::none, BoostMode::asis_max, BoostMode::asis_leading, BoostMode::mda})
    if (to_string(b) == s) return b;
  throw ConfigError("unknown boost mode '" + s + "'");
}

UProposal parse_u_proposal(const std::string& s) {
  for (auto u : {UProposal::uniform, UProposal::beta_on_U, UProposal::uniform_on_U2, UProposal::beta_on_U2})
    if (to_string(u) == s) return u;
  throw ConfigError("unknown U proposal '" + s + "'");
}

void SamplerConfig::validate() const {
  auto open01 = [](double p) { return p > 0.0 && p < 1.0; };
  if (M < 1) throw ConfigError("M must be at least 1");
  if (M0 < 0) throw ConfigError("M0 must be non-negative");
  if (thin < 1) throw ConfigError("thin must be at least 1");
  if (!open01(p0) || !open01(ps)) throw ConfigError("p0 and ps must lie in (0,1)");
  if (!open01(p_a)) throw ConfigError("p_a must lie in (0,1)");
  if (p_shift < 0 || p_switch < 0 || !(p_shift + p_switch < 1.0))
    throw ConfigError("p_shift and p_switch must be non-negative with p_shift + p_switch < 1");
  if (!(u0 > 0) || !(v0 > 0)) throw ConfigError("u0 and v0 must be positive");
  if (!(mda_a > 0) || !(mda_b > 0) || !(mda_nu > 0) || !(mda_q > 0))
    throw ConfigError("working prior parameters must be positive");
  if (init_fill < 0 || init_fill > 1) throw ConfigError("init_fill must lie in [0,1]");
  if (init_retries < 1) throw ConfigError("init_retries must be at least 1");
  if (warmup < 0) throw ConfigError("warmup must be non-negative");
}

void SweepDiagnostics::add(const SweepDiagnostics& o) {
  split_proposed += o.split_proposed;
  split_accepted += o.split_accepted;
  merge_proposed += o.merge_proposed;
  merge_accepted += o.merge_accepted;
  shift_proposed += o.shift_proposed;
  shift_accepted += o.shift_accepted;
  switch_proposed += o.switch_proposed;
  switch_accepted += o.switch_accepted;
  add_proposed += o.add_proposed;
  add_accepted += o.add_accepted;
  delete_proposed += o.delete_proposed;
  delete_accepted += o.delete_accepted;
  flips_proposed += o.flips_proposed;
  flips_accepted += o.flips_accepted;
  r_active = o.r_active;
  d_total = o.d_total;
}

bool identical(const DrawStore& a, const DrawStore& b) {
  if (a.m != b.m || a.k != b.k || a.seed != b.seed || !(a.diagnostics == b.diagnostics)) return false;
  if (a.draws.size() != b.draws.size()) return false;
  for (std::size_t n = 0; n < a.draws.size(); ++n) {
    const Draw& x = a.draws[n];
    const Draw& y = b.draws[n];
    if (x.sweep != y.sweep || !(x.delta == y.delta) || x.lambda != y.lambda || x.sigma2 != y.sigma2 ||
        x.tau != y.tau || x.factors.rows() != y.factors.rows() || x.factors.cols() != y.factors.cols() ||
        x.factors != y.factors)
      return false;
  }
  return true;
}

void sweep(ModelState& s, const Matrix& Y, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
           SweepDiagnostics& diag) {
  step_F(s, Y, rng);
  step_A(s, prior, config, rng);
  step_R(s, Y, prior, config, rng, diag);
  const FactorGram g = FactorGram::build(s.factors, Y);
  step_L(s, g, prior, config, rng, diag);
  step_D(s, g, prior, rng, diag);
  step_H(s, prior, rng);
  step_P(s, g, prior, rng);
  diag.r_active = classify_columns(s.delta).r_active;
  diag.d_total = s.delta.total();
}

DrawStore run_chain(const Dataset& data, const PriorConfig& prior, const SamplerConfig& config,
                    const ProgressSink& progress) {
  if (prior.S == 0)
    spdlog::warn("S=0: no spurious columns, the number of nonzero columns stays at its initial value");
  Rng rng(config.seed);
  ModelState s = init_chain(data, prior, config, rng);
  DrawStore store;
  store.m = data.m();
  store.k = prior.k;
  store.seed = config.seed;
  store.draws.reserve(static_cast<std::size_t>(config.M / config.thin + 1));
  const long total = config.M0 + config.M;
  for (long it = 1; it <= total; ++it) {
    SweepDiagnostics diag;
    sweep(s, data.y, prior, config, rng, diag);
    if (it > config.M0) {
      store.diagnostics.add(diag);
      if ((it - config.M0) % config.thin == 0) {
        Draw d;
        d.sweep = it;
        d.delta = s.delta;
        d.lambda = s.lambda;
        d.sigma2 = s.sigma2;
        d.tau = s.tau;
        if (config.keep_factors) d.factors = s.factors;
        store.draws.push_back(std::move(d));
      }
    } else {
      store.diagnostics.r_active = diag.r_active;
      store.diagnostics.d_total = diag.d_total;
    }
    if (config.log_every > 0 && it % config.log_every == 0) {
      if (progress)
        progress(it, s, store.diagnostics);
      else
        spdlog::info("seed {} sweep {}/{}: r_active={} d={} split {}/{} merge {}/{}", config.seed, it, total,
                     diag.r_active, diag.d_total, store.diagnostics.split_accepted, store.diagnostics.split_proposed,
                     store.diagnostics.merge_accepted, store.diagnostics.merge_proposed);
    }
  }
  return store;
}

}  // namespace glt
