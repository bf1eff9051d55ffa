#pragma once

#include "glt/rng.hpp"
#include "glt/types.hpp"

#include <vector>

namespace glt {

// Cross products shared by all row regressions while the factors are fixed.
struct FactorGram {
  Matrix G;   // k x k, F F'
  Matrix Fy;  // k x m, F Y
  Vector yy;  // m, per-variable sum of squares
  int T = 0;

  // F is k x T, Y is T x m.
  static FactorGram build(const Matrix& F, const Matrix& Y);
};

// Posterior moments of one row regression y_i = X_i lambda_i + e_i.
struct SlabMoments {
  std::vector<int> cols;  // regressors (factor indices), in the order used
  Matrix V_inv;           // posterior information, q x q
  Matrix V;               // posterior covariance scale V_iT
  Vector c;               // X'y
  Vector mean;            // V c
  double ssr = 0.0;       // y'y - c'V c
  double cT = 0.0;        // IG shape
  double CT = 0.0;        // IG scale
  double log_det_V = 0.0;
};

SlabMoments posterior_row_moments(const std::vector<int>& cols, const FactorGram& g, int i, const PriorConfig& prior);
SlabMoments posterior_row_moments(const std::vector<int>& cols, const Matrix& F, const Vector& y_i,
                                  const PriorConfig& prior, double C0_i);

// Log marginal likelihood of row i given its regressor set (empty = null model).
double log_marglik_row(const std::vector<int>& cols, const FactorGram& g, int i, const PriorConfig& prior);
double log_marglik_row(const std::vector<int>& cols, const Matrix& F, const Vector& y_i, const PriorConfig& prior,
                       double C0_i);

// Log likelihood odds of delta_ij = 1 versus 0 for each row in `rows`, holding the
// rest of each row at its current pattern.
Vector column_odds_batch(int j, const std::vector<int>& rows, const IndicatorMatrix& delta, const FactorGram& g,
                         const PriorConfig& prior);

// Log of the normalizing constant of the fractional slab, ∫ p(y_i | lambda, sigma2)^b d lambda.
double log_fractional_normalizer(const std::vector<int>& cols, const FactorGram& g, int i, double sigma2, double b);
double log_fractional_normalizer(const std::vector<int>& cols, const Matrix& F, const Vector& y_i, double sigma2,
                                 double b);

// Draws all factors given loadings and variances; zero columns get N(0,1).
Matrix sample_factors(const ModelState& state, const Matrix& Y, Rng& rng);

// Block-diagonal information system over the stacked nonzero loadings.
struct BandSystem {
  std::vector<int> rows;               // nonzero rows of delta
  std::vector<std::vector<int>> cols;  // regressors of each nonzero row
  std::vector<int> offset;             // start of each row block
  std::vector<Matrix> info;            // per-row information blocks
  std::vector<Matrix> chol;            // lower Cholesky factor of each block
  Vector c;                            // stacked covector
  Vector x;                            // solves L x = c
  int dim = 0;

  int bandwidth() const;
  Matrix dense_info() const;
  Matrix dense_chol() const;
};

BandSystem build_band_system(const IndicatorMatrix& delta, const FactorGram& g, const PriorConfig& prior);

struct ParamDraw {
  Matrix lambda;
  Vector sigma2;
};

// Joint draw of all variances and loadings given delta and the factors.
ParamDraw sample_params_block(const IndicatorMatrix& delta, const FactorGram& g, const PriorConfig& prior, Rng& rng);

}  // namespace glt
