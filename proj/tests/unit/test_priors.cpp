#include "oracles.hpp"

#include "glt/errors.hpp"
#include "glt/priors.hpp"

#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>

using namespace glt;
using doctest::Approx;

TEST_CASE("hyperparameters from expected simplicity") {
  const SimplicityHyper h = hyperparams_from_simplicity(2.0, 9, 0.6);
  CHECK(h.a0 == Approx(0.17142857).epsilon(1e-8));
  CHECK(h.alpha == Approx(2.5714286).epsilon(1e-7));
  CHECK(hyperparams_from_simplicity(20.0 / 3.0, 20, 0.1).alpha == Approx(10.0));
  const SimplicityHyper tiny = hyperparams_from_simplicity(1e-9, 5, 1.0);
  CHECK(tiny.a0 < 1e-9);
  CHECK(tiny.alpha < 1e-8);
  CHECK_THROWS_AS(hyperparams_from_simplicity(9.0, 9, 0.6), DomainError);
}

TEST_CASE("simplicity round trip by simulation") {
  const int k = 6;
  const double b0 = 0.8, Eq = 2.0;
  const SimplicityHyper h = hyperparams_from_simplicity(Eq, k, b0);
  Rng rng(2);
  const int n = 100000;
  std::vector<double> q(n);
  for (int t = 0; t < n; ++t) {
    int c = 0;
    for (int j = 0; j < k; ++j) c += rng.bernoulli(rng.beta(h.a0, b0)) ? 1 : 0;
    q[t] = c;
  }
  const double se = std::sqrt(oracle::variance(q) / n);
  CHECK(std::abs(oracle::mean(q) - Eq) < 3 * se);
}

TEST_CASE("inverse Omega estimate") {
  const Matrix S0 = Matrix::Identity(3, 3);
  const Matrix none = estimate_inv_omega(Matrix(0, 3), 3.0, S0);
  CHECK((none - S0).cwiseAbs().maxCoeff() < 1e-14);
  Matrix y = Matrix::Zero(1, 3);
  y(0, 0) = std::sqrt(2.0);
  const Matrix one = estimate_inv_omega(y, 3.0, S0);
  CHECK(one(0, 0) == Approx(3.5 / 4.0));
  CHECK(one(1, 1) == Approx(3.5 / 3.0));
  CHECK(std::abs(one(0, 1)) < 1e-15);
}

TEST_CASE("inverse Omega on standardized data is SPD") {
  Rng rng(4);
  Matrix y(96, 22);
  for (int t = 0; t < 96; ++t)
    for (int i = 0; i < 22; ++i) y(t, i) = rng.normal();
  const Dataset d = Dataset::from_matrix(y, true);
  const Matrix w = estimate_inv_omega(d.y, 3.0, Matrix::Identity(22, 22));
  CHECK((w.diagonal().array() > 0).all());
  CHECK(Eigen::LLT<Matrix>(w).info() == Eigen::Success);
}

TEST_CASE("idiosyncratic prior scale") {
  const Vector C0 = idio_prior_scale(2.5, Vector::Constant(2, 1.5));
  CHECK(C0[0] == Approx(1.0));
  const Vector w = (Vector(3) << 0.7, 1.2, 3.3).finished();
  const Vector C = idio_prior_scale(2.5, w);
  for (int i = 0; i < 3; ++i) CHECK(C[i] / 1.5 * w[i] == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(idio_prior_scale(1.0, w), DomainError);
}

TEST_CASE("Heywood guard probability") {
  const double c0 = 2.5, w = 1.7;
  const double C0 = idio_prior_scale(c0, Vector::Constant(1, w))[0];
  const double expected = boost::math::cdf(boost::math::gamma_distribution<>(c0, 1.0), c0 - 1.0);
  Rng rng(6);
  const int n = 100000;
  int hits = 0;
  for (int t = 0; t < n; ++t) hits += rng.inv_gamma(c0, C0) > 1.0 / w ? 1 : 0;
  const double p = static_cast<double>(hits) / n;
  CHECK(std::abs(p - expected) < 3 * std::sqrt(expected * (1 - expected) / n));
}

TEST_CASE("fraction defaults") {
  CHECK(fraction_defaults(96, 22, 9).b_N == Approx(4.735e-4).epsilon(1e-3));
  CHECK(fraction_defaults(96, 22, 9).d_free == 162);
  const FractionDefaults big = fraction_defaults(240, 73, 20);
  CHECK(big.d_free == 1270);
  CHECK(big.b_N == Approx(5.71e-5).epsilon(1e-3));
  CHECK(big.b_R == Approx(1.0 / (1270.0 * 1270.0)));
  // The published b_R uses d = 175.
  CHECK(1.0 / (175.0 * 175.0) == Approx(3.265e-5).epsilon(1e-3));
}

TEST_CASE("b_R is smaller than b_N exactly when d exceeds sqrt(Tm)") {
  for (int T : {10, 50, 200})
    for (int m : {5, 12, 30})
      for (int k = 1; 2 * k <= m - 1; ++k) {
        const FractionDefaults f = fraction_defaults(T, m, k);
        CHECK((f.b_R < f.b_N) == (f.d_free > std::sqrt(static_cast<double>(T) * m)));
      }
}

TEST_CASE("indicator prior odds") {
  CHECK(log_prior_odds_indicator(0.5) == 0.0);
  CHECK(log_prior_odds_indicator(0.75) == Approx(std::log(3.0)));
  CHECK(log_prior_odds_indicator(0.0) == -kLogitClamp);
  CHECK(log_prior_odds_indicator(1.0) == kLogitClamp);
}

TEST_CASE("marginalized split prior odds") {
  CHECK(marginalized_split_prior_odds(0.1714, 0.6, 22) == Approx(0.007935).epsilon(1e-3));
  CHECK(marginalized_split_prior_odds(1.0, 1.0, 2) == 0.5);
  for (int m = 3; m < 30; ++m)
    CHECK(marginalized_split_prior_odds(0.3, 0.6, m + 1) < marginalized_split_prior_odds(0.3, 0.6, m));
}

TEST_CASE("log densities") {
  CHECK(std::exp(log_normal_pdf(0.0, 0.0, 1.0)) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)));
  CHECK(std::exp(log_beta_pdf(0.5, 1.0, 1.0)) == Approx(1.0));
  // IG(1, 1) at x = 1 is exp(-1).
  CHECK(log_inv_gamma_pdf(1.0, 1.0, 1.0) == Approx(-1.0));
}
