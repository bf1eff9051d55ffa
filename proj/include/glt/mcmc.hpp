#pragma once

#include "glt/draws.hpp"
#include "glt/kernels.hpp"
#include "glt/rng.hpp"
#include "glt/types.hpp"

#include <cstdint>
#include <functional>
#include <string>

namespace glt {

enum class BoostMode { none, asis_max, asis_leading, mda };
enum class UProposal { uniform, beta_on_U, uniform_on_U2, beta_on_U2 };

std::string to_string(BoostMode b);
std::string to_string(UProposal u);
BoostMode parse_boost_mode(const std::string& s);
UProposal parse_u_proposal(const std::string& s);

struct SamplerConfig {
  long M = 10000;  // sweeps after burn-in
  long M0 = 5000;  // burn-in sweeps
  int thin = 10;
  std::uint64_t seed = 1;

  BoostMode boost = BoostMode::asis_max;
  UProposal u_proposal = UProposal::beta_on_U2;
  double u0 = 3.0;  // shape parameters of the U proposal
  double v0 = 1.5;

  double p0 = 0.5;  // split probability with no spurious columns
  double ps = 0.5;  // split probability otherwise
  double p_shift = 1.0 / 3.0;
  double p_switch = 1.0 / 3.0;
  double p_a = 0.5;  // add probability when both add and delete are possible

  // Working prior for marginal data augmentation: GIG(p, a, b) for the standard
  // slab, inverted Gamma(nu, q) for the fractional slab.
  double mda_p = 1.5, mda_a = 2.0, mda_b = 2.0;
  double mda_nu = 1.5, mda_q = 1.5;

  int init_r = -1;  // initial number of factors; -1 draws it uniformly from 1..k
  double init_fill = 0.5;
  int init_u1 = 5;
  int init_retries = 100;
  int warmup = 100;

  long log_every = 0;  // progress line interval in sweeps; 0 disables
  bool keep_factors = false;

  void validate() const;
};

ModelState init_chain(const Dataset& data, const PriorConfig& prior, const SamplerConfig& config, Rng& rng);

void step_F(ModelState& s, const Matrix& Y, Rng& rng);
void step_A(ModelState& s, const PriorConfig& prior, const SamplerConfig& config, Rng& rng);
void step_R(ModelState& s, const Matrix& Y, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
            SweepDiagnostics& diag);
void step_L(ModelState& s, const FactorGram& g, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
            SweepDiagnostics& diag);
void step_D(ModelState& s, const FactorGram& g, const PriorConfig& prior, Rng& rng, SweepDiagnostics& diag);
void step_H(ModelState& s, const PriorConfig& prior, Rng& rng);
void step_P(ModelState& s, const FactorGram& g, const PriorConfig& prior, Rng& rng);

// One full sweep in the order F, A, R, L, D, H, P.
void sweep(ModelState& s, const Matrix& Y, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
           SweepDiagnostics& diag);

using ProgressSink = std::function<void(long sweep, const ModelState&, const SweepDiagnostics&)>;

DrawStore run_chain(const Dataset& data, const PriorConfig& prior, const SamplerConfig& config,
                    const ProgressSink& progress = {});

// Split/merge building blocks, exposed for testing.
namespace rj {

// Probabilities of proposing a split and a merge given r_sp spurious columns and
// kappa = min(k - r_active, S).
double p_split(int r_sp, int kappa, const SamplerConfig& c);
double p_merge(int r_sp, int kappa, const SamplerConfig& c);

double log_u_density(double u, const SamplerConfig& c);
double sample_u(const SamplerConfig& c, Rng& rng);

// Turns zero column j into a spurious column at `row`: loading U sqrt(sigma2),
// variance (1 - U^2) sigma2, factors f_new, tau tau_new.
void apply_split(ModelState& s, int j, int row, double U, const Vector& f_new, double tau_new);
// Inverse of apply_split for spurious column j; returns U.
double apply_merge(ModelState& s, int j, const Vector& f_new, double tau_new);

// Log acceptance ratio of splitting zero column j of the merged state `merged`
// into the spurious state `split`, with r_sp spurious columns before the split.
double log_split_ratio(const ModelState& merged, const ModelState& split, int j, int row, double U, const Matrix& Y,
                       const PriorConfig& prior, const SamplerConfig& c);

}  // namespace rj

// Step-L move availability for nonzero column j.
namespace lead {

struct AddDelete {
  bool can_add = false;
  bool can_delete = false;
  double p_add = 0.0;
};
AddDelete add_delete_options(const IndicatorMatrix& delta, int j, int S, double p_a);

}  // namespace lead

}  // namespace glt
