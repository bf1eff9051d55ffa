#include "oracles.hpp"

#include "glt/errors.hpp"
#include "glt/mcmc.hpp"
#include "glt/simulate.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <map>

using namespace glt;
using doctest::Approx;

namespace {

PriorConfig standard_prior(int m, int k, int S) {
  PriorConfig p;
  p.family = PriorFamily::standard;
  p.A0 = 1.0;
  p.a0 = 0.8;
  p.b0 = 1.3;
  p.c0 = 2.5;
  p.C0 = Vector::Constant(m, 1.0);
  p.k = k;
  p.S = S;
  return p;
}

Dataset simulated(int m, int T, std::vector<int> leading, std::uint64_t seed) {
  SimulationSpec spec;
  spec.m = m;
  spec.T = T;
  spec.leading = std::move(leading);
  Rng rng(seed);
  return Dataset::from_matrix(simulate(spec, rng).y, true);
}

// A state with both nonzero and zero columns, used by the algebraic checks.
ModelState sample_state(Rng& rng) {
  ModelState s;
  s.delta = IndicatorMatrix::from_rows(
      {{1, 0, 0, 0}, {1, 1, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 0},
       {0, 0, 0, 0}, {0, 0, 0, 0}});
  s.lambda = Matrix::Zero(10, 4);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 4; ++j)
      if (s.delta(i, j)) s.lambda(i, j) = rng.normal();
  s.sigma2 = Vector::LinSpaced(10, 0.3, 1.2);
  s.factors.resize(4, 30);
  for (int j = 0; j < 4; ++j)
    for (int t = 0; t < 30; ++t) s.factors(j, t) = rng.normal();
  s.tau = Vector::Constant(4, 0.4);
  return s;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("step H draws from the Beta conditional") {
  const PriorConfig p = standard_prior(6, 2, 1);
  ModelState s;
  s.delta = IndicatorMatrix(6, 2);
  for (int i = 0; i < 6; ++i) s.delta.set(i, 1, true);
  s.lambda = Matrix::Zero(6, 2);
  s.tau = Vector::Constant(2, 0.5);
  Rng rng(1);
  std::vector<double> t0, t1;
  for (int n = 0; n < 50000; ++n) {
    step_H(s, p, rng);
    t0.push_back(s.tau[0]);
    t1.push_back(s.tau[1]);
  }
  const double m0 = p.a0 / (p.a0 + p.b0 + 6), m1 = (p.a0 + 6) / (p.a0 + 6 + p.b0);
  CHECK(std::abs(oracle::mean(t0) - m0) < 4 * std::sqrt(oracle::variance(t0) / t0.size()));
  CHECK(std::abs(oracle::mean(t1) - m1) < 4 * std::sqrt(oracle::variance(t1) / t1.size()));
}

TEST_CASE("split Jacobian") {
  // (sigma2, U) -> (lambda, sigma2_sp) = (U sqrt(sigma2), (1 - U^2) sigma2).
  const double s2 = 4.0, U = 0.3, h = 1e-6;
  auto map = [](double a, double u) { return std::pair{u * std::sqrt(a), (1.0 - u * u) * a}; };
  const auto [l_a, v_a] = map(s2 + h, U);
  const auto [l_b, v_b] = map(s2 - h, U);
  const auto [l_c, v_c] = map(s2, U + h);
  const auto [l_d, v_d] = map(s2, U - h);
  const double J = ((l_a - l_b) * (v_c - v_d) - (l_c - l_d) * (v_a - v_b)) / (4 * h * h);
  CHECK(std::abs(J) == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("split and merge are inverse maps that keep the covariance") {
  Rng rng(2);
  const ModelState s = sample_state(rng);
  Vector f(30);
  for (int t = 0; t < 30; ++t) f[t] = rng.normal();
  ModelState split = s;
  rj::apply_split(split, 2, 8, -0.45, f, 0.2);
  CHECK(max_abs(oracle::omega(split) - oracle::omega(s)) < 1e-12);
  CHECK(is_spurious(split.delta, 2));
  ModelState back = split;
  const double U = rj::apply_merge(back, 2, s.factors.row(2).transpose(), s.tau[2]);
  CHECK(U == Approx(-0.45).epsilon(1e-12));
  CHECK(max_abs(back.lambda - s.lambda) < 1e-12);
  CHECK(max_abs(back.sigma2 - s.sigma2) < 1e-12);
  CHECK(back.delta == s.delta);
}

TEST_CASE("split and merge ratios are reciprocal") {
  Rng rng(3);
  const ModelState s = sample_state(rng);
  Matrix Y(30, 10);
  for (int t = 0; t < 30; ++t)
    for (int i = 0; i < 10; ++i) Y(t, i) = rng.normal();
  for (PriorFamily fam : {PriorFamily::standard, PriorFamily::fractional}) {
    PriorConfig p = standard_prior(10, 4, 2);
    p.family = fam;
    p.b = 0.1;
    p.enforce_k_bound = false;
    SamplerConfig c;
    ModelState split = s;
    Vector f(30);
    for (int t = 0; t < 30; ++t) f[t] = rng.normal();
    rj::apply_split(split, 3, 9, 0.6, f, 0.3);
    const double forward = rj::log_split_ratio(s, split, 3, 9, 0.6, Y, p, c);
    CHECK(std::isfinite(forward));
    ModelState merged = split;
    const double U = rj::apply_merge(merged, 3, s.factors.row(3).transpose(), s.tau[3]);
    CHECK(rj::log_split_ratio(merged, split, 3, 9, U, Y, p, c) == Approx(forward).epsilon(1e-12));
  }
}

TEST_CASE("move probabilities") {
  SamplerConfig c;
  c.p0 = 0.4;
  c.ps = 0.6;
  CHECK(rj::p_split(0, 0, c) == 0.0);
  CHECK(rj::p_merge(0, 0, c) == 0.0);
  CHECK(rj::p_split(0, 2, c) == 0.4);
  CHECK(rj::p_split(1, 2, c) == 0.6);
  CHECK(rj::p_merge(1, 2, c) == Approx(0.4));
  CHECK(rj::p_split(2, 2, c) == 0.0);
  CHECK(rj::p_merge(2, 2, c) == 1.0);
}

TEST_CASE("U proposal densities integrate to one and match their samplers") {
  using boost::math::quadrature::gauss_kronrod;
  for (UProposal u : {UProposal::uniform, UProposal::beta_on_U, UProposal::uniform_on_U2, UProposal::beta_on_U2}) {
    SamplerConfig c;
    c.u_proposal = u;
    auto dens = [&](double x) { return std::exp(rj::log_u_density(x, c)); };
    const double I = 2.0 * gauss_kronrod<double, 61>::integrate(dens, 0.0, 1.0, 15, 1e-12);
    CHECK(I == Approx(1.0).epsilon(1e-8));
    auto second = [&](double x) { return x * x * dens(x); };
    const double EU2 = 2.0 * gauss_kronrod<double, 61>::integrate(second, 0.0, 1.0, 15, 1e-12);
    Rng rng(4);
    std::vector<double> v;
    for (int n = 0; n < 40000; ++n) {
      const double x = rj::sample_u(c, rng);
      v.push_back(x * x);
    }
    CHECK(std::abs(oracle::mean(v) - EU2) < 4 * std::sqrt(oracle::variance(v) / v.size()));
  }
}

TEST_CASE("boosting preserves the product of loadings and factors") {
  Rng rng(5);
  for (BoostMode b : {BoostMode::asis_max, BoostMode::asis_leading, BoostMode::mda}) {
    for (PriorFamily fam : {PriorFamily::standard, PriorFamily::fractional}) {
      ModelState s = sample_state(rng);
      PriorConfig p = standard_prior(10, 4, 2);
      p.family = fam;
      p.b = 0.1;
      SamplerConfig c;
      c.boost = b;
      const Matrix before = s.lambda * s.factors;
      const Matrix zero_f = s.factors.bottomRows(2);
      step_A(s, p, c, rng);
      CHECK(max_abs(s.lambda * s.factors - before) < 1e-12 * std::max(1.0, max_abs(before)));
      CHECK(s.factors.bottomRows(2) == zero_f);
      CHECK(s.invariant_violation(2).empty());
    }
  }
}

TEST_CASE("shift and switch moves are always accepted when the data are uninformative") {
  // With zero factors and the standard slab every row marginal likelihood is the
  // same, and tau = 1/2 makes the prior odds vanish.
  const int m = 10, k = 3;
  const PriorConfig p = standard_prior(m, k, 1);
  const FactorGram g = FactorGram::build(Matrix::Zero(k, 20), Matrix::Random(20, m));
  Rng rng(6);
  for (double p_shift : {0.999, 0.0}) {
    SamplerConfig c;
    c.p_shift = p_shift;
    c.p_switch = 0.999 - p_shift;
    ModelState s = sample_state(rng);
    s.delta = s.delta.select_columns({0, 1, 2});
    s.lambda = Matrix::Zero(m, k);
    s.factors = Matrix::Zero(k, 20);
    s.tau = Vector::Constant(k, 0.5);
    s.delta.set(5, 2, true);
    s.delta.set(7, 2, true);
    SweepDiagnostics d;
    for (int n = 0; n < 2000; ++n) {
      step_L(s, g, p, c, rng, d);
      CHECK(s.invariant_violation(1).empty());
    }
    if (p_shift > 0) {
      CHECK(d.shift_proposed > 100);
      CHECK(d.shift_accepted == d.shift_proposed);
    } else {
      CHECK(d.switch_proposed > 100);
      CHECK(d.switch_accepted == d.switch_proposed);
    }
  }
}

TEST_CASE("leading index moves leave a flat target invariant") {
  // Under the flat target every reachable pattern is equally likely.
  const int m = 7, k = 2;
  const PriorConfig p = standard_prior(m, k, 1);
  const FactorGram g = FactorGram::build(Matrix::Zero(k, 10), Matrix::Random(10, m));
  for (double p_move : {1.0 / 3.0, 0.0}) {
    ModelState s;
    s.delta = IndicatorMatrix::from_rows({{0, 0}, {1, 0}, {0, 0}, {0, 1}, {1, 0}, {0, 1}, {1, 1}});
    s.lambda = Matrix::Zero(m, k);
    s.sigma2 = Vector::Ones(m);
    s.factors = Matrix::Zero(k, 10);
    s.tau = Vector::Constant(k, 0.5);
    SamplerConfig c;
    c.p_shift = c.p_switch = p_move;
    Rng rng(7);
    SweepDiagnostics d;
    std::map<std::vector<std::uint8_t>, long> visits;
    const long n = 1000000;
    for (long it = 0; it < n; ++it) {
      step_L(s, g, p, c, rng, d);
      const auto& st = s.delta.storage();
      ++visits[std::vector<std::uint8_t>(st.data(), st.data() + st.size())];
    }
    const double expected = static_cast<double>(n) / visits.size();
    CHECK(visits.size() == (p_move > 0 ? 136u : 8u));
    double worst = 0.0;
    for (const auto& [key, count] : visits) worst = std::max(worst, std::abs(count / expected - 1.0));
    CHECK(worst < (p_move > 0 ? 0.1 : 0.02));
    CHECK(d.add_accepted > 1000);
    CHECK(d.delete_accepted > 1000);
  }
}

TEST_CASE("add and delete availability") {
  const auto d = IndicatorMatrix::from_rows({{0}, {0}, {1}, {1}, {0}, {1}, {0}, {0}});
  const lead::AddDelete o = lead::add_delete_options(d, 0, 1, 0.5);
  CHECK(o.can_add);
  CHECK(o.can_delete);
  CHECK(o.p_add == 0.5);
  // Deleting would leave a spurious column, which S = 0 forbids.
  const auto two = IndicatorMatrix::from_rows({{0}, {0}, {1}, {1}, {0}, {0}, {0}, {0}});
  const lead::AddDelete o2 = lead::add_delete_options(two, 0, 0, 0.5);
  CHECK_FALSE(o2.can_delete);
  CHECK(o2.p_add == 1.0);
}

TEST_CASE("indicator flips match exact inclusion probabilities") {
  Rng rng(8);
  const int m = 7, T = 30;
  PriorConfig p = standard_prior(m, 1, 1);
  Matrix F(1, T), Y(T, m);
  for (int t = 0; t < T; ++t) F(0, t) = rng.normal();
  const Vector load = (Vector(m) << 1.0, 0.0, 0.3, 0.15, 0.0, 0.2, 0.05).finished();
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) Y(t, i) = load[i] * F(0, t) + rng.normal();
  const FactorGram g = FactorGram::build(F, Y);
  ModelState s;
  s.delta = IndicatorMatrix(m, 1);
  s.delta.set(0, 0, true);
  s.lambda = Matrix::Zero(m, 1);
  s.tau = Vector::Constant(1, 0.35);
  std::vector<int> rows;
  for (int i = 1; i < m; ++i) rows.push_back(i);
  const Vector O = column_odds_batch(0, rows, IndicatorMatrix(m, 1), g, p);
  const double logit = log_prior_odds_indicator(0.35);
  std::vector<std::vector<double>> on(m);
  SweepDiagnostics d;
  for (int n = 0; n < 50000; ++n) {
    step_D(s, g, p, rng, d);
    CHECK(s.delta(0, 0));
    for (int i = 1; i < m; ++i) on[i].push_back(s.delta(i, 0) ? 1.0 : 0.0);
  }
  for (int i = 1; i < m; ++i) {
    const double exact = 1.0 / (1.0 + std::exp(-(O[i - 1] + logit)));
    const double se = std::sqrt(oracle::variance(on[i]) * inefficiency_factor(on[i]) / on[i].size());
    CHECK(std::abs(oracle::mean(on[i]) - exact) < 4 * se + 1e-12);
  }
}

TEST_CASE("initial states are valid") {
  const Dataset data = simulated(22, 96, {0, 1, 4, 6}, 9);
  PriorConfig p = standard_prior(22, 9, 3);
  p.family = PriorFamily::fractional;
  p.b = 1.0 / (96 * 22);
  for (int r0 : {2, 9, -1}) {
    SamplerConfig c;
    c.init_r = r0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed);
      const ModelState s = init_chain(data, p, c, rng);
      CHECK(s.invariant_violation(3).empty());
      CHECK(check_GLT_TS(derive_counts(s.delta).leading.rows, 22, 3));
    }
  }
}

TEST_CASE("smallest model starts with a full column") {
  const Dataset data = simulated(3, 50, {0}, 10);
  const PriorConfig p = standard_prior(3, 1, 0);
  Rng rng(11);
  const ModelState s = init_chain(data, p, SamplerConfig{}, rng);
  CHECK(s.delta.col_count(0) == 3);
}

TEST_CASE("initialization rejects too many factors") {
  const Dataset data = simulated(8, 40, {0}, 12);
  const PriorConfig p = standard_prior(8, 4, 0);
  Rng rng(13);
  CHECK_THROWS_AS(init_chain(data, p, SamplerConfig{}, rng), ConfigError);
}

TEST_CASE("sweeps keep every invariant") {
  const Dataset data = simulated(10, 60, {0, 2}, 14);
  for (PriorFamily fam : {PriorFamily::standard, PriorFamily::fractional}) {
    PriorConfig p = standard_prior(10, 4, 1);
    p.family = fam;
    p.b = 1.0 / 600.0;
    SamplerConfig c;
    Rng rng(15);
    ModelState s = init_chain(data, p, c, rng);
    SweepDiagnostics total;
    for (int it = 0; it < 300; ++it) {
      SweepDiagnostics d;
      sweep(s, data.y, p, c, rng, d);
      total.add(d);
      const ColumnClasses cc = classify_columns(s.delta);
      CHECK(cc.r_active + cc.r_sp + cc.zero == 4);
      CHECK(cc.r_active == d.r_active);
      CHECK(s.delta.total() == d.d_total);
      REQUIRE(s.invariant_violation(1).empty());
    }
    CHECK(total.split_accepted <= total.split_proposed);
    CHECK(total.merge_accepted <= total.merge_proposed);
    CHECK(total.flips_accepted <= total.flips_proposed);
  }
}

TEST_CASE("equal seeds give identical chains") {
  const Dataset data = simulated(8, 50, {0, 2}, 16);
  PriorConfig p = standard_prior(8, 3, 1);
  SamplerConfig c;
  c.M = 200;
  c.M0 = 100;
  c.thin = 2;
  c.seed = 77;
  const DrawStore a = run_chain(data, p, c);
  const DrawStore b = run_chain(data, p, c);
  CHECK(identical(a, b));
  CHECK(a.draws.size() == 100);
  c.seed = 78;
  CHECK_FALSE(identical(a, run_chain(data, p, c)));
}

TEST_CASE("sampler configuration checks") {
  SamplerConfig c;
  c.M = 100000;
  c.M0 = 50000;
  CHECK_NOTHROW(c.validate());
  c.p_shift = 0.6;
  c.p_switch = 0.4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.ps = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SamplerConfig{};
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_boost_mode(to_string(BoostMode::mda)) == BoostMode::mda);
  CHECK(parse_u_proposal(to_string(UProposal::beta_on_U)) == UProposal::beta_on_U);
  CHECK_THROWS_AS(parse_boost_mode("fast"), ConfigError);
}
