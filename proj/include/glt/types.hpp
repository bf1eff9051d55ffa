#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace glt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Observations: rows are time points t, columns are variables i.
struct Dataset {
  Matrix y;
  bool standardized = false;
  std::vector<std::string> names;

  int T() const { return static_cast<int>(y.rows()); }
  int m() const { return static_cast<int>(y.cols()); }

  // Throws DataError when T < 1, m < 3, or a column is constant.
  static Dataset from_matrix(Matrix y, bool standardize, std::vector<std::string> names = {});
};

class IndicatorMatrix {
 public:
  using Storage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

  IndicatorMatrix() = default;
  IndicatorMatrix(int m, int k) : d_(Storage::Zero(m, k)) {}
  explicit IndicatorMatrix(Storage d) : d_(std::move(d)) {}
  // Rows of 0/1 values; throws DataError on ragged input or other values.
  static IndicatorMatrix from_rows(const std::vector<std::vector<int>>& rows);

  int m() const { return static_cast<int>(d_.rows()); }
  int k() const { return static_cast<int>(d_.cols()); }
  bool operator()(int i, int j) const { return d_(i, j) != 0; }
  void set(int i, int j, bool v) { d_(i, j) = v ? 1 : 0; }
  const Storage& storage() const { return d_; }

  int col_count(int j) const;
  int row_count(int i) const;
  // First row with a one, or -1 for a zero column.
  int leading_row(int j) const;
  std::vector<int> rows_in_col(int j) const;
  std::vector<int> cols_in_row(int i) const;
  std::vector<int> nonzero_columns() const;
  IndicatorMatrix select_columns(const std::vector<int>& cols) const;
  int total() const;

  bool operator==(const IndicatorMatrix& o) const { return d_ == o.d_; }

 private:
  Storage d_;
};

// Leading rows of the nonzero columns, listed in column order.
struct LeadingIndexSet {
  std::vector<int> rows;
  std::vector<int> cols;

  int r() const { return static_cast<int>(rows.size()); }
  std::vector<int> ordered() const;
  bool distinct() const;
};

struct Counts {
  std::vector<int> d;  // column sums
  std::vector<int> q;  // row sums
  int r = 0;           // nonzero columns
  LeadingIndexSet leading;
};

Counts derive_counts(const IndicatorMatrix& delta);

enum class PriorFamily { fractional, standard };

struct PriorConfig {
  PriorFamily family = PriorFamily::fractional;
  double b = 0.0;   // fraction, fractional family only
  double A0 = 1.0;  // slab variance scale, standard family only
  double a0 = 1.0;
  double b0 = 1.0;
  double c0 = 2.5;
  Vector C0;  // one inverted-Gamma scale per variable
  int S = 0;
  int k = 1;
  // When false, k may exceed (m-S-1)/2; the extra columns can only stay zero or spurious.
  bool enforce_k_bound = true;

  // Throws ConfigError when any field is out of range for m variables.
  void validate(int m) const;
};

struct ModelState {
  Matrix lambda;   // m x k
  Vector sigma2;   // m
  Matrix factors;  // k x T
  IndicatorMatrix delta;
  Vector tau;      // k

  int m() const { return static_cast<int>(lambda.rows()); }
  int k() const { return static_cast<int>(lambda.cols()); }
  int T() const { return static_cast<int>(factors.cols()); }

  // Empty string when the state is valid for overfit budget S, else a description.
  std::string invariant_violation(int S) const;
};

// A column with exactly one nonzero loading.
inline bool is_spurious(const IndicatorMatrix& delta, int j) { return delta.col_count(j) == 1; }

struct ColumnClasses {
  int r_active = 0;  // columns with at least two ones
  int r_sp = 0;      // spurious columns
  int zero = 0;
};
ColumnClasses classify_columns(const IndicatorMatrix& delta);

}  // namespace glt
