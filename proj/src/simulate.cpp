#include "glt/simulate.hpp"

#include "glt/errors.hpp"

#include <cmath>

namespace glt {

SimulatedData simulate(const SimulationSpec& spec, Rng& rng) {
  const int m = spec.m, T = spec.T, r = static_cast<int>(spec.leading.size());
  if (m < 3 || T < 1) throw ConfigError("simulate needs m >= 3 and T >= 1");
  if (!(spec.load_lo > 0) || spec.load_hi < spec.load_lo) throw ConfigError("invalid loading magnitude range");
  if (!(spec.sigma2_lo > 0) || spec.sigma2_hi < spec.sigma2_lo) throw ConfigError("invalid variance range");
  if (spec.density < 0 || spec.density > 1) throw ConfigError("density must lie in [0,1]");
  for (int j = 0; j < r; ++j) {
    if (spec.leading[j] < 0 || spec.leading[j] >= m) throw ConfigError("leading row out of range");
    for (int l = 0; l < j; ++l)
      if (spec.leading[l] == spec.leading[j]) throw ConfigError("leading rows must be distinct");
  }

  SimulatedData out;
  out.delta = IndicatorMatrix(m, r);
  out.lambda = Matrix::Zero(m, r);
  for (int j = 0; j < r; ++j) {
    const int l = spec.leading[j];
    for (int i = l; i < m; ++i) {
      if (i > l && !rng.bernoulli(spec.density)) continue;
      const double mag = spec.load_lo + (spec.load_hi - spec.load_lo) * rng.uniform();
      out.delta.set(i, j, true);
      out.lambda(i, j) = (i == l || rng.uniform() < 0.5) ? mag : -mag;
    }
  }
  out.sigma2.resize(m);
  for (int i = 0; i < m; ++i) out.sigma2[i] = spec.sigma2_lo + (spec.sigma2_hi - spec.sigma2_lo) * rng.uniform();
  out.factors.resize(r, T);
  for (int j = 0; j < r; ++j)
    for (int t = 0; t < T; ++t) out.factors(j, t) = rng.normal();
  out.y.resize(T, m);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) {
      double v = std::sqrt(out.sigma2[i]) * rng.normal();
      for (int j = 0; j < r; ++j) v += out.lambda(i, j) * out.factors(j, t);
      out.y(t, i) = v;
    }
  return out;
}

}  // namespace glt
