#include "glt/errors.hpp"
#include "glt/identification.hpp"
#include "glt/mcmc.hpp"

#include <algorithm>
#include <cmath>

namespace glt {
namespace {

// True when `set` can be completed to `total` leading rows satisfying GLT-TS
// under S by adding the smallest unused rows below its last element.
bool completable(std::vector<int> set, int total, int m, int S) {
  int next = set.empty() ? 0 : set.back() + 1;
  while (static_cast<int>(set.size()) < total && next < m) set.push_back(next++);
  return static_cast<int>(set.size()) == total && check_GLT_TS(set, m, S);
}

std::vector<int> candidates(const std::vector<int>& set, int r0, int m, int S_strict, int S, int upper) {
  std::vector<int> out;
  const int from = set.empty() ? 0 : set.back() + 1;
  for (int i = from; i < std::min(m, upper); ++i) {
    std::vector<int> with = set;
    with.push_back(i);
    if (check_GLT_TS(with, m, S_strict) && completable(with, r0, m, S)) out.push_back(i);
  }
  return out;
}

std::vector<int> draw_leading_rows(int r0, int m, int S, const SamplerConfig& config, Rng& rng) {
  const int S0 = std::max(static_cast<int>(std::floor(config.init_fill * m)), S);
  std::vector<int> set;
  for (int j = 0; j < r0; ++j) {
    const int upper = j == 0 ? std::max(config.init_u1, 1) : m;
    auto c = candidates(set, r0, m, S0, S, upper);
    if (c.empty()) c = candidates(set, r0, m, S, S, upper);
    if (c.empty()) c = candidates(set, r0, m, S, S, m);
    if (c.empty()) throw ConfigError("no admissible leading rows for the initial number of factors");
    set.push_back(c[rng.uniform_int(static_cast<int>(c.size()))]);
  }
  return set;
}

}  // namespace

ModelState init_chain(const Dataset& data, const PriorConfig& prior, const SamplerConfig& config, Rng& rng) {
  const int m = data.m(), k = prior.k, T = data.T();
  prior.validate(m);
  config.validate();

  int r0 = config.init_r > 0 ? std::min(config.init_r, k) : 1 + rng.uniform_int(k);
  int r_max = 0;
  while (r_max < k) {
    std::vector<int> first(r_max + 1);
    for (int j = 0; j <= r_max; ++j) first[j] = j;
    if (!check_GLT_TS(first, m, prior.S)) break;
    ++r_max;
  }
  if (r_max == 0) throw ConfigError("no factor fits m variables with overfitting degree S");
  r0 = std::min(r0, r_max);
  const std::vector<int> leading = draw_leading_rows(r0, m, prior.S, config, rng);

  IndicatorMatrix delta(m, k);
  bool ok = false;
  for (int attempt = 0; attempt < config.init_retries && !ok; ++attempt) {
    delta = IndicatorMatrix(m, k);
    for (int j = 0; j < r0; ++j) {
      delta.set(leading[j], j, true);
      for (int i = leading[j] + 1; i < m; ++i)
        if (rng.bernoulli(0.5)) delta.set(i, j, true);
    }
    std::vector<int> cols(r0);
    for (int j = 0; j < r0; ++j) cols[j] = j;
    ok = verify_variance_identification(delta.select_columns(cols)).yes();
  }
  if (!ok)
    for (int j = 0; j < r0; ++j)
      for (int i = leading[j] + 1; i <= std::min(leading[j] + 3, m - 1); ++i) delta.set(i, j, true);

  ModelState s;
  s.delta = delta;
  s.lambda = Matrix::Zero(m, k);
  s.sigma2 = Vector::Ones(m);
  s.tau = Vector::Constant(k, 0.5);
  s.factors.resize(k, T);
  for (int j = 0; j < k; ++j)
    for (int t = 0; t < T; ++t) s.factors(j, t) = rng.normal();
  step_H(s, prior, rng);
  for (int w = 0; w < std::max(config.warmup, 1); ++w) {
    step_P(s, FactorGram::build(s.factors, data.y), prior, rng);
    step_F(s, data.y, rng);
  }
  step_P(s, FactorGram::build(s.factors, data.y), prior, rng);
  return s;
}

}  // namespace glt
