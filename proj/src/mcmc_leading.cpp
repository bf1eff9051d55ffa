#include "glt/identification.hpp"
#include "glt/mcmc.hpp"
#include "glt/priors.hpp"

#include <algorithm>
#include <cmath>

namespace glt {
namespace {

std::vector<int> leading_minus(const IndicatorMatrix& delta, int j) {
  std::vector<int> out;
  for (int l = 0; l < delta.k(); ++l) {
    if (l == j) continue;
    const int r = delta.leading_row(l);
    if (r >= 0) out.push_back(r);
  }
  return out;
}

// First nonzero row below row `l` in column j, or m for a spurious column.
int next_below(const IndicatorMatrix& delta, int j, int l) {
  for (int i = l + 1; i < delta.m(); ++i)
    if (delta(i, j)) return i;
  return delta.m();
}

std::vector<int> rows_above(const std::vector<int>& set, int bound) {
  std::vector<int> out;
  for (int i : set)
    if (i < bound) out.push_back(i);
  return out;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

double odds(int j, int i, const ModelState& s, const FactorGram& g, const PriorConfig& prior) {
  return column_odds_batch(j, {i}, s.delta, g, prior)[0];
}

void set_cell(ModelState& s, int i, int j, bool on) {
  s.delta.set(i, j, on);
  if (!on) s.lambda(i, j) = 0.0;
}

void shift_move(ModelState& s, int j, const FactorGram& g, const PriorConfig& prior, Rng& rng, SweepDiagnostics& diag) {
  const int l = s.delta.leading_row(j);
  const int lstar = next_below(s.delta, j, l);
  const auto M = rows_above(admissible_leading_rows(leading_minus(s.delta, j), s.m(), prior.S), lstar);
  if (M.size() < 2) return;
  const int lnew = M[rng.uniform_int(static_cast<int>(M.size()))];
  if (lnew == l) return;
  ++diag.shift_proposed;
  const double log_a = odds(j, lnew, s, g, prior) - odds(j, l, s, g, prior);
  if (std::log(rng.uniform()) <= log_a) {
    set_cell(s, lnew, j, true);
    set_cell(s, l, j, false);
    ++diag.shift_accepted;
  }
}

void switch_move(ModelState& s, int j, const FactorGram& g, const PriorConfig& prior, Rng& rng,
                 SweepDiagnostics& diag) {
  std::vector<int> others;
  for (int l = 0; l < s.k(); ++l)
    if (l != j && s.delta.leading_row(l) >= 0) others.push_back(l);
  if (others.empty()) return;
  const int c = others[rng.uniform_int(static_cast<int>(others.size()))];
  const int lj = s.delta.leading_row(j), lc = s.delta.leading_row(c);
  const int lo = std::min(lj, lc), hi = std::max(lj, lc);
  ++diag.switch_proposed;
  std::vector<int> rows;
  double log_a = 0.0;
  const double logit_j = log_prior_odds_indicator(s.tau[j]);
  const double logit_c = log_prior_odds_indicator(s.tau[c]);
  for (int i = lo; i <= hi; ++i) {
    if (s.delta(i, j) == s.delta(i, c)) continue;
    rows.push_back(i);
    const auto cur = s.delta.cols_in_row(i);
    std::vector<int> swapped;
    for (int l = 0; l < s.k(); ++l) {
      bool on = s.delta(i, l);
      if (l == j) on = s.delta(i, c);
      if (l == c) on = s.delta(i, j);
      if (on) swapped.push_back(l);
    }
    log_a += log_marglik_row(swapped, g, i, prior) - log_marglik_row(cur, g, i, prior);
    log_a += s.delta(i, j) ? logit_c - logit_j : logit_j - logit_c;
  }
  if (std::log(rng.uniform()) <= log_a) {
    for (int i : rows) {
      const bool on_j = s.delta(i, j);
      const double lam = s.lambda(i, j) + s.lambda(i, c);
      set_cell(s, i, j, !on_j);
      set_cell(s, i, c, on_j);
      s.lambda(i, on_j ? c : j) = lam;
    }
    ++diag.switch_accepted;
  }
}

void add_delete_move(ModelState& s, int j, const FactorGram& g, const PriorConfig& prior, const SamplerConfig& config,
                     Rng& rng, SweepDiagnostics& diag) {
  const auto opts = lead::add_delete_options(s.delta, j, prior.S, config.p_a);
  if (!opts.can_add && !opts.can_delete) return;
  const int l = s.delta.leading_row(j);
  const auto L = admissible_leading_rows(leading_minus(s.delta, j), s.m(), prior.S);
  const double logit = log_prior_odds_indicator(s.tau[j]);
  if (rng.uniform() < opts.p_add) {
    const auto A = rows_above(L, l);
    const int lnew = A[rng.uniform_int(static_cast<int>(A.size()))];
    ++diag.add_proposed;
    const double post = odds(j, lnew, s, g, prior) + logit;
    IndicatorMatrix next = s.delta;
    next.set(lnew, j, true);
    const auto opts_new = lead::add_delete_options(next, j, prior.S, config.p_a);
    const double log_a = post + std::log(static_cast<double>(A.size())) + std::log(1.0 - opts_new.p_add) -
                         std::log(opts.p_add);
    if (std::log(rng.uniform()) <= log_a) {
      set_cell(s, lnew, j, true);
      ++diag.add_accepted;
    }
  } else {
    const int lstar = next_below(s.delta, j, l);
    ++diag.delete_proposed;
    const double post = odds(j, l, s, g, prior) + logit;
    IndicatorMatrix next = s.delta;
    next.set(l, j, false);
    const auto opts_new = lead::add_delete_options(next, j, prior.S, config.p_a);
    const auto A_new = rows_above(L, lstar);
    const double log_a = -post + std::log(opts_new.p_add) - std::log(static_cast<double>(A_new.size())) -
                         std::log(1.0 - opts.p_add);
    if (std::log(rng.uniform()) <= log_a) {
      set_cell(s, l, j, false);
      ++diag.delete_accepted;
    }
  }
}

}  // namespace

namespace lead {

AddDelete add_delete_options(const IndicatorMatrix& delta, int j, int S, double p_a) {
  AddDelete o;
  const int l = delta.leading_row(j);
  if (l < 0) return o;
  const int d = delta.col_count(j);
  const auto L = admissible_leading_rows(leading_minus(delta, j), delta.m(), S);
  o.can_add = !rows_above(L, l).empty();
  if (d >= 2) {
    const int lstar = next_below(delta, j, l);
    const int r_sp = classify_columns(delta).r_sp;
    o.can_delete = contains(L, lstar) && (d > 2 || r_sp < S);
  }
  o.p_add = o.can_add && o.can_delete ? p_a : (o.can_add ? 1.0 : 0.0);
  return o;
}

}  // namespace lead

void step_L(ModelState& s, const FactorGram& g, const PriorConfig& prior, const SamplerConfig& config, Rng& rng,
            SweepDiagnostics& diag) {
  const std::vector<int> nz = s.delta.nonzero_columns();
  const std::vector<int> order = rng.permutation(static_cast<int>(nz.size()));
  for (int o : order) {
    const int j = nz[o];
    const double u = rng.uniform();
    if (u < config.p_shift)
      shift_move(s, j, g, prior, rng, diag);
    else if (u < config.p_shift + config.p_switch)
      switch_move(s, j, g, prior, rng, diag);
    else
      add_delete_move(s, j, g, prior, config, rng, diag);
  }
}

}  // namespace glt
