// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include "glt/identification.hpp"
#include "glt/mcmc.hpp"
#include "glt/postprocess.hpp"
#include "glt/priors.hpp"
#include "glt/rng.hpp"
#include "glt/types.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

using glt::IndicatorMatrix;
using glt::Matrix;
using glt::Vector;

// Calls fn for every ordered GLT pattern with m rows and r nonzero columns:
// leading rows l_1 < ... < l_r, zeros above them, free entries below.
inline void for_each_glt_pattern(int m, int r, const std::function<void(const IndicatorMatrix&)>& fn) {
  std::vector<int> lead(r);
  std::function<void(int, int)> choose = [&](int j, int from) {
    if (j == r) {
      std::vector<std::pair<int, int>> free;
      for (int c = 0; c < r; ++c)
        for (int i = lead[c] + 1; i < m; ++i) free.emplace_back(i, c);
      const std::uint64_t n = std::uint64_t{1} << free.size();
      IndicatorMatrix d(m, r);
      for (int c = 0; c < r; ++c) d.set(lead[c], c, true);
      for (std::uint64_t mask = 0; mask < n; ++mask) {
        for (std::size_t b = 0; b < free.size(); ++b) d.set(free[b].first, free[b].second, (mask >> b) & 1u);
        fn(d);
      }
      return;
    }
    for (int i = from; i < m; ++i) {
      lead[j] = i;
      choose(j + 1, i + 1);
    }
  };
  choose(0, 0);
}

inline IndicatorMatrix random_glt_pattern(int m, int r, double fill, glt::Rng& rng) {
  std::vector<int> rows(m);
  for (int i = 0; i < m; ++i) rows[i] = i;
  for (int i = 0; i < r; ++i) std::swap(rows[i], rows[i + rng.uniform_int(m - i)]);
  std::vector<int> lead(rows.begin(), rows.begin() + r);
  std::sort(lead.begin(), lead.end());
  IndicatorMatrix d(m, r);
  for (int c = 0; c < r; ++c) {
    d.set(lead[c], c, true);
    for (int i = lead[c] + 1; i < m; ++i) d.set(i, c, rng.bernoulli(fill));
  }
  return d;
}

// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
inline double ks_pvalue(double D, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * D;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// KS statistic of samples against the density exp(log_kernel) on (0, inf),
// normalized by adaptive quadrature.
inline double ks_statistic_positive(std::vector<double> x, const std::function<double(double)>& log_kernel,
                                    double mode) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(x.begin(), x.end());
  const double shift = log_kernel(mode);
  // Integrate over u = log y so both tails are handled on a finite range.
  auto f = [&](double u) {
    const double y = std::exp(u);
    return std::exp(log_kernel(y) - shift + u);
  };
  const double lo = std::log(x.front()) - 30.0, hi = std::log(x.back()) + 30.0;
  auto piece = [&](double a, double b) { return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13); };
  const double Z = piece(lo, std::log(mode)) + piece(std::log(mode), hi);
  double cdf = piece(lo, std::log(x.front())) / Z;
  const double n = static_cast<double>(x.size());
  double D = std::max(cdf, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) {
      const double a = std::log(x[i - 1]), b = std::log(x[i]);
      // Neighbouring samples are close; a fixed 20-point rule is exact to rounding there.
      cdf += (b - a < 0.05 ? boost::math::quadrature::gauss<double, 20>::integrate(f, a, b) : piece(a, b)) / Z;
    }
    D = std::max({D, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  return D;
}

inline double two_sided_p(double z) {
  static const boost::math::normal_distribution<> N;
  return 2.0 * boost::math::cdf(boost::math::complement(N, std::abs(z)));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

inline Matrix omega(const glt::ModelState& s) {
  Matrix out = s.lambda * s.lambda.transpose();
  out.diagonal() += s.sigma2;
  return out;
}

// Leading rows of the nonzero columns, in column order.
inline std::vector<int> leading_rows(const IndicatorMatrix& d) {
  std::vector<int> out;
  for (int j = 0; j < d.k(); ++j)
    if (d.leading_row(j) >= 0) out.push_back(d.leading_row(j));
  return out;
}

inline bool in_support(const IndicatorMatrix& d, int S) {
  std::vector<int> lead = leading_rows(d);
  std::vector<int> sorted = lead;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  return lead.empty() || glt::check_GLT_TS(lead, d.m(), S);
}

// Draws (tau, delta, sigma2, Lambda, F) from the prior with standard slab and the
// indicator prior restricted to GLT-TS support (joint rejection of tau and delta).
inline glt::ModelState draw_prior_state(int m, int T, const glt::PriorConfig& p, glt::Rng& rng) {
  const int k = p.k;
  glt::ModelState s;
  s.tau.resize(k);
  s.delta = IndicatorMatrix(m, k);
  do {
    for (int j = 0; j < k; ++j) {
      s.tau[j] = rng.beta(p.a0, p.b0);
      for (int i = 0; i < m; ++i) s.delta.set(i, j, rng.bernoulli(s.tau[j]));
    }
  } while (!in_support(s.delta, p.S));
  s.sigma2.resize(m);
  s.lambda = Matrix::Zero(m, k);
  for (int i = 0; i < m; ++i) {
    s.sigma2[i] = rng.inv_gamma(p.c0, p.C0[i]);
    for (int j = 0; j < k; ++j)
      if (s.delta(i, j)) s.lambda(i, j) = std::sqrt(p.A0 * s.sigma2[i]) * rng.normal();
  }
  s.factors.resize(k, T);
  for (int j = 0; j < k; ++j)
    for (int t = 0; t < T; ++t) s.factors(j, t) = rng.normal();
  return s;
}

inline Matrix draw_data(const glt::ModelState& s, glt::Rng& rng) {
  const int T = s.T(), m = s.m();
  Matrix y = (s.lambda * s.factors).transpose();
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) y(t, i) += std::sqrt(s.sigma2[i]) * rng.normal();
  return y;
}

struct GewekeStat {
  const char* name;
  double mc_mean, mc_se, sc_mean, sc_se, z, p;
};

inline std::vector<double> geweke_stats(const glt::ModelState& s) {
  const glt::ColumnClasses cc = glt::classify_columns(s.delta);
  return {static_cast<double>(s.delta.total()), static_cast<double>(cc.r_active), s.tau.mean(), s.sigma2.mean()};
}

// Marginal-conditional versus successive-conditional comparison.
inline std::vector<GewekeStat> geweke_test(int m, int T, const glt::PriorConfig& prior, const glt::SamplerConfig& sc,
                                           long n, std::uint64_t seed) {
  glt::Rng rng(seed);
  const char* names[] = {"d", "r_active", "mean_tau", "mean_sigma2"};
  std::vector<std::vector<double>> mc(4), chain(4);
  for (long it = 0; it < n; ++it) {
    const auto st = geweke_stats(draw_prior_state(m, T, prior, rng));
    for (int a = 0; a < 4; ++a) mc[a].push_back(st[a]);
  }
  glt::ModelState s = draw_prior_state(m, T, prior, rng);
  Matrix y = draw_data(s, rng);
  glt::SweepDiagnostics diag;
  for (long it = 0; it < n; ++it) {
    glt::sweep(s, y, prior, sc, rng, diag);
    y = draw_data(s, rng);
    const auto st = geweke_stats(s);
    for (int a = 0; a < 4; ++a) chain[a].push_back(st[a]);
  }
  std::vector<GewekeStat> out;
  for (int a = 0; a < 4; ++a) {
    GewekeStat g{names[a], mean(mc[a]), 0, mean(chain[a]), 0, 0, 0};
    g.mc_se = std::sqrt(variance(mc[a]) / static_cast<double>(n));
    g.sc_se = std::sqrt(variance(chain[a]) * glt::inefficiency_factor(chain[a]) / static_cast<double>(n));
    const double se = std::sqrt(g.mc_se * g.mc_se + g.sc_se * g.sc_se);
    g.z = se > 0 ? (g.mc_mean - g.sc_mean) / se : 0.0;
    g.p = two_sided_p(g.z);
    out.push_back(g);
  }
  return out;
}

// Fractional-prior marginal likelihood of a one-regressor row by two-dimensional
// quadrature: integral of p(y|l,s2) / integral of p(y|l,s2)^b, weighted by IG(s2).
inline double fractional_marglik_quadrature(const Vector& x, const Vector& y, double b, double c0, double C0) {
  using boost::math::quadrature::gauss_kronrod;
  const double T = static_cast<double>(y.size());
  const double xx = x.squaredNorm(), xy = x.dot(y);
  const double lhat = xy / xx;
  auto loglik = [&](double l, double s2) {
    return -0.5 * T * std::log(2.0 * std::numbers::pi * s2) - 0.5 * (y - l * x).squaredNorm() / s2;
  };
  // log of the integral over l of exp(w * loglik), computed around its peak.
  auto log_inner = [&](double s2, double w) {
    const double peak = w * loglik(lhat, s2);
    const double width = std::sqrt(s2 / (w * xx));
    auto g = [&](double u) { return std::exp(w * loglik(lhat + width * u, s2) - peak); };
    const double v = gauss_kronrod<double, 61>::integrate(g, -40.0, 40.0, 15, 1e-14);
    return peak + std::log(v * width);
  };
  auto log_outer = [&](double u) {
    const double s2 = std::exp(u);
    const double log_ig = c0 * std::log(C0) - std::lgamma(c0) - (c0 + 1.0) * u - C0 / s2;
    return log_inner(s2, 1.0) - log_inner(s2, b) + log_ig + u;
  };
  double gmax = -std::numeric_limits<double>::infinity(), umax = 0.0;
  for (double u = -12.0; u <= 12.0; u += 0.01) {
    const double v = log_outer(u);
    if (v > gmax) {
      gmax = v;
      umax = u;
    }
  }
  auto h = [&](double u) { return std::exp(log_outer(u) - gmax); };
  const double I = gauss_kronrod<double, 61>::integrate(h, umax - 25.0, umax, 15, 1e-14) +
                   gauss_kronrod<double, 61>::integrate(h, umax, umax + 25.0, 15, 1e-14);
  return gmax + std::log(I);
}

}  // namespace oracle
