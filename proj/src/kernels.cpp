#include "glt/kernels.hpp"

#include "glt/errors.hpp"

#include <cmath>
#include <numbers>

namespace glt {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Regression summaries for one row: X'X, X'y, y'y.
struct RowData {
  Matrix XtX;
  Vector Xty;
  double yy;
  int T;
  double C0;
};

RowData row_data(const std::vector<int>& cols, const FactorGram& g, int i, double C0_i) {
  const int q = static_cast<int>(cols.size());
  RowData d{Matrix(q, q), Vector(q), g.yy[i], g.T, C0_i};
  for (int a = 0; a < q; ++a) {
    d.Xty[a] = g.Fy(cols[a], i);
    for (int b = 0; b < q; ++b) d.XtX(a, b) = g.G(cols[a], cols[b]);
  }
  return d;
}

RowData row_data(const std::vector<int>& cols, const Matrix& F, const Vector& y_i, double C0_i) {
  const int q = static_cast<int>(cols.size());
  Matrix X(F.cols(), q);
  for (int a = 0; a < q; ++a) X.col(a) = F.row(cols[a]).transpose();
  return RowData{X.transpose() * X, X.transpose() * y_i, y_i.squaredNorm(), static_cast<int>(F.cols()), C0_i};
}

Eigen::LLT<Matrix> factorize(const Matrix& info) {
  Eigen::LLT<Matrix> llt(info);
  if (llt.info() != Eigen::Success) throw NumericalError("RankDeficient: row information matrix is not positive definite");
  const Matrix& L = llt.matrixLLT();
  for (Eigen::Index a = 0; a < info.rows(); ++a)
    if (!(L(a, a) * L(a, a) > 1e-12 * info(a, a)))
      throw NumericalError("RankDeficient: collinear factors in row regression");
  return llt;
}

Matrix information(const RowData& d, const PriorConfig& prior) {
  Matrix info = d.XtX;
  if (prior.family == PriorFamily::standard) info.diagonal().array() += 1.0 / prior.A0;
  return info;
}

double ssr_factor(const PriorConfig& prior) {
  return prior.family == PriorFamily::fractional ? 0.5 * (1.0 - prior.b) : 0.5;
}

double shape_T(const PriorConfig& prior, int T, bool null_row) {
  if (null_row || prior.family == PriorFamily::standard) return prior.c0 + 0.5 * T;
  return prior.c0 + 0.5 * (1.0 - prior.b) * T;
}

SlabMoments moments(const std::vector<int>& cols, const RowData& d, const PriorConfig& prior) {
  SlabMoments s;
  s.cols = cols;
  const int q = static_cast<int>(cols.size());
  if (q == 0) {
    s.ssr = d.yy;
    s.cT = prior.c0 + 0.5 * d.T;
    s.CT = d.C0 + 0.5 * d.yy;
    return s;
  }
  s.V_inv = information(d, prior);
  const auto llt = factorize(s.V_inv);
  s.V = llt.solve(Matrix::Identity(q, q));
  s.c = d.Xty;
  s.mean = llt.solve(s.c);
  const Vector x = llt.matrixL().solve(s.c);
  s.ssr = std::max(d.yy - x.squaredNorm(), 0.0);
  s.log_det_V = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  s.cT = shape_T(prior, d.T, false);
  s.CT = d.C0 + ssr_factor(prior) * s.ssr;
  return s;
}

double marglik(const std::vector<int>& cols, const RowData& d, const PriorConfig& prior) {
  const SlabMoments s = moments(cols, d, prior);
  const double q = static_cast<double>(cols.size());
  const double common = std::lgamma(s.cT) - std::lgamma(prior.c0) + prior.c0 * std::log(d.C0) - s.cT * std::log(s.CT);
  if (cols.empty()) return common - 0.5 * d.T * kLog2Pi;
  if (prior.family == PriorFamily::standard)
    return common - 0.5 * d.T * kLog2Pi + 0.5 * s.log_det_V - 0.5 * q * std::log(prior.A0);
  return common + 0.5 * q * std::log(prior.b) - 0.5 * d.T * (1.0 - prior.b) * kLog2Pi;
}

double frac_normalizer(const std::vector<int>& cols, const RowData& d, double sigma2, double b) {
  const double q = static_cast<double>(cols.size());
  double ssr = d.yy, log_det_V = 0.0;
  if (!cols.empty()) {
    const auto llt = factorize(d.XtX);
    const Vector x = llt.matrixL().solve(d.Xty);
    ssr = std::max(d.yy - x.squaredNorm(), 0.0);
    log_det_V = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }
  return 0.5 * (q - d.T * b) * (kLog2Pi + std::log(sigma2)) - 0.5 * q * std::log(b) + 0.5 * log_det_V -
         0.5 * b * ssr / sigma2;
}

}  // namespace

FactorGram FactorGram::build(const Matrix& F, const Matrix& Y) {
  FactorGram g;
  g.G.noalias() = F * F.transpose();
  g.Fy.noalias() = F * Y;
  g.yy = Y.colwise().squaredNorm().transpose();
  g.T = static_cast<int>(Y.rows());
  return g;
}

SlabMoments posterior_row_moments(const std::vector<int>& cols, const FactorGram& g, int i, const PriorConfig& prior) {
  return moments(cols, row_data(cols, g, i, prior.C0[i]), prior);
}

SlabMoments posterior_row_moments(const std::vector<int>& cols, const Matrix& F, const Vector& y_i,
                                  const PriorConfig& prior, double C0_i) {
  return moments(cols, row_data(cols, F, y_i, C0_i), prior);
}

double log_marglik_row(const std::vector<int>& cols, const FactorGram& g, int i, const PriorConfig& prior) {
  return marglik(cols, row_data(cols, g, i, prior.C0[i]), prior);
}

double log_marglik_row(const std::vector<int>& cols, const Matrix& F, const Vector& y_i, const PriorConfig& prior,
                       double C0_i) {
  return marglik(cols, row_data(cols, F, y_i, C0_i), prior);
}

double log_fractional_normalizer(const std::vector<int>& cols, const FactorGram& g, int i, double sigma2, double b) {
  return frac_normalizer(cols, row_data(cols, g, i, 1.0), sigma2, b);
}

double log_fractional_normalizer(const std::vector<int>& cols, const Matrix& F, const Vector& y_i, double sigma2,
                                 double b) {
  return frac_normalizer(cols, row_data(cols, F, y_i, 1.0), sigma2, b);
}

Vector column_odds_batch(int j, const std::vector<int>& rows, const IndicatorMatrix& delta, const FactorGram& g,
                         const PriorConfig& prior) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  const bool frac = prior.family == PriorFamily::fractional;
  const double f = ssr_factor(prior);
  const double cT = shape_T(prior, g.T, false);
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const int i = rows[n];
    // Column j goes last so its contribution sits in the last Cholesky entry.
    std::vector<int> ord;
    for (int l = 0; l < delta.k(); ++l)
      if (l != j && delta(i, l)) ord.push_back(l);
    const bool dedicated = ord.empty();
    ord.push_back(j);
    const RowData d = row_data(ord, g, i, prior.C0[i]);
    const auto llt = factorize(information(d, prior));
    const Vector x = llt.matrixL().solve(d.Xty);
    const int q = static_cast<int>(ord.size());
    const double x_last = x[q - 1];
    const double L_last = llt.matrixLLT()(q - 1, q - 1);
    const double C1 = d.C0 + f * std::max(d.yy - x.squaredNorm(), 0.0);
    if (dedicated && frac) {
      // Dedicated row against the null model, whose likelihood is not fractional.
      const double cTn = prior.c0 + 0.5 * g.T;
      const double Cn = d.C0 + 0.5 * d.yy;
      out[n] = std::lgamma(cT) - std::lgamma(cTn) + cTn * std::log(Cn) - cT * std::log(C1) +
               0.5 * std::log(prior.b) + 0.5 * prior.b * g.T * kLog2Pi;
      continue;
    }
    const double C0row = C1 + f * x_last * x_last;
    const double D = frac ? 0.5 * std::log(prior.b) : -std::log(L_last) - 0.5 * std::log(prior.A0);
    out[n] = cT * (std::log(C0row) - std::log(C1)) + D;
  }
  return out;
}

Matrix sample_factors(const ModelState& state, const Matrix& Y, Rng& rng) {
  const int k = state.k(), T = static_cast<int>(Y.rows());
  const std::vector<int> nz = state.delta.nonzero_columns();
  const int r = static_cast<int>(nz.size());
  Matrix F(k, T);
  if (r > 0) {
    Matrix beta(state.m(), r);
    for (int a = 0; a < r; ++a) beta.col(a) = state.lambda.col(nz[a]);
    const Vector w = state.sigma2.cwiseInverse();
    const Matrix bw = beta.transpose() * w.asDiagonal();  // r x m
    Matrix Q = Matrix::Identity(r, r);
    Q.noalias() += bw * beta;
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success) throw NumericalError("factor precision matrix is not positive definite");
    Matrix mean = llt.solve(bw * Y.transpose());  // r x T
    Matrix Z(r, T);
    for (int t = 0; t < T; ++t)
      for (int a = 0; a < r; ++a) Z(a, t) = rng.normal();
    mean += llt.matrixU().solve(Z);
    for (int a = 0; a < r; ++a) F.row(nz[a]) = mean.row(a);
  }
  for (int j = 0; j < k; ++j) {
    if (state.delta.leading_row(j) >= 0) continue;
    for (int t = 0; t < T; ++t) F(j, t) = rng.normal();
  }
  return F;
}

int BandSystem::bandwidth() const {
  int w = 0;
  for (const auto& c : cols) w = std::max(w, static_cast<int>(c.size()));
  return w;
}

Matrix BandSystem::dense_info() const {
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t b = 0; b < info.size(); ++b)
    out.block(offset[b], offset[b], info[b].rows(), info[b].cols()) = info[b];
  return out;
}

Matrix BandSystem::dense_chol() const {
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t b = 0; b < chol.size(); ++b)
    out.block(offset[b], offset[b], chol[b].rows(), chol[b].cols()) = chol[b];
  return out;
}

BandSystem build_band_system(const IndicatorMatrix& delta, const FactorGram& g, const PriorConfig& prior) {
  BandSystem sys;
  for (int i = 0; i < delta.m(); ++i) {
    auto cols = delta.cols_in_row(i);
    if (cols.empty()) continue;
    sys.rows.push_back(i);
    sys.offset.push_back(sys.dim);
    sys.dim += static_cast<int>(cols.size());
    sys.cols.push_back(std::move(cols));
  }
  sys.c.resize(sys.dim);
  sys.x.resize(sys.dim);
  for (std::size_t b = 0; b < sys.rows.size(); ++b) {
    const RowData d = row_data(sys.cols[b], g, sys.rows[b], prior.C0[sys.rows[b]]);
    Matrix info = information(d, prior);
    const auto llt = factorize(info);
    Matrix L = llt.matrixL();
    const int q = static_cast<int>(info.rows());
    sys.c.segment(sys.offset[b], q) = d.Xty;
    sys.x.segment(sys.offset[b], q) = L.triangularView<Eigen::Lower>().solve(d.Xty);
    sys.info.push_back(std::move(info));
    sys.chol.push_back(std::move(L));
  }
  return sys;
}

ParamDraw sample_params_block(const IndicatorMatrix& delta, const FactorGram& g, const PriorConfig& prior, Rng& rng) {
  const int m = delta.m(), k = delta.k();
  ParamDraw out{Matrix::Zero(m, k), Vector(m)};
  const BandSystem sys = build_band_system(delta, g, prior);
  const double f = ssr_factor(prior);
  const double cT = shape_T(prior, g.T, false);
  std::vector<char> nonzero(m, 0);
  for (std::size_t b = 0; b < sys.rows.size(); ++b) {
    const int i = sys.rows[b];
    nonzero[i] = 1;
    const int q = static_cast<int>(sys.cols[b].size());
    const Vector x = sys.x.segment(sys.offset[b], q);
    const double ssr = std::max(g.yy[i] - x.squaredNorm(), 0.0);
    const double s2 = rng.inv_gamma(cT, prior.C0[i] + f * ssr);
    Vector z(q);
    for (int a = 0; a < q; ++a) z[a] = std::sqrt(s2) * rng.normal();
    const Vector lam = sys.chol[b].transpose().triangularView<Eigen::Upper>().solve(x + z);
    out.sigma2[i] = s2;
    for (int a = 0; a < q; ++a) out.lambda(i, sys.cols[b][a]) = lam[a];
  }
  for (int i = 0; i < m; ++i) {
    if (nonzero[i]) continue;
    out.sigma2[i] = rng.inv_gamma(prior.c0 + 0.5 * g.T, prior.C0[i] + 0.5 * g.yy[i]);
  }
  return out;
}

}  // namespace glt
