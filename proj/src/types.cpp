#include "glt/types.hpp"

#include "glt/errors.hpp"
#include "glt/identification.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace glt {

Dataset Dataset::from_matrix(Matrix y, bool standardize, std::vector<std::string> names) {
  if (y.rows() < 1) throw DataError("dataset needs at least one observation");
  if (y.cols() < 3) throw DataError("dataset needs at least three variables");
  if (!y.allFinite()) throw DataError("dataset contains non-finite values");
  if (standardize) {
    const double T = static_cast<double>(y.rows());
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      auto col = y.col(i);
      const double mean = col.mean();
      col.array() -= mean;
      const double var = T > 1 ? col.squaredNorm() / (T - 1) : 0.0;
      if (!(var > 1e-300)) {
        std::string name = i < static_cast<Eigen::Index>(names.size()) ? names[i] : std::to_string(i + 1);
        throw DataError("DegenerateColumn: column " + name + " is constant");
      }
      col /= std::sqrt(var);
    }
  }
  Dataset d;
  d.y = std::move(y);
  d.standardized = standardize;
  d.names = std::move(names);
  return d;
}

IndicatorMatrix IndicatorMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) return IndicatorMatrix(0, 0);
  const std::size_t k = rows.front().size();
  IndicatorMatrix out(static_cast<int>(rows.size()), static_cast<int>(k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) throw DataError("indicator rows have unequal length");
    for (std::size_t j = 0; j < k; ++j) {
      const int v = rows[i][j];
      if (v != 0 && v != 1) throw DataError("indicator entries must be 0 or 1");
      out.set(static_cast<int>(i), static_cast<int>(j), v == 1);
    }
  }
  return out;
}

int IndicatorMatrix::col_count(int j) const {
  int n = 0;
  for (int i = 0; i < m(); ++i) n += d_(i, j);
  return n;
}

int IndicatorMatrix::row_count(int i) const {
  int n = 0;
  for (int j = 0; j < k(); ++j) n += d_(i, j);
  return n;
}

int IndicatorMatrix::leading_row(int j) const {
  for (int i = 0; i < m(); ++i)
    if (d_(i, j)) return i;
  return -1;
}

std::vector<int> IndicatorMatrix::rows_in_col(int j) const {
  std::vector<int> out;
  for (int i = 0; i < m(); ++i)
    if (d_(i, j)) out.push_back(i);
  return out;
}

std::vector<int> IndicatorMatrix::cols_in_row(int i) const {
  std::vector<int> out;
  for (int j = 0; j < k(); ++j)
    if (d_(i, j)) out.push_back(j);
  return out;
}

std::vector<int> IndicatorMatrix::nonzero_columns() const {
  std::vector<int> out;
  for (int j = 0; j < k(); ++j)
    if (leading_row(j) >= 0) out.push_back(j);
  return out;
}

IndicatorMatrix IndicatorMatrix::select_columns(const std::vector<int>& cols) const {
  IndicatorMatrix out(m(), static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.d_.col(static_cast<Eigen::Index>(c)) = d_.col(cols[c]);
  return out;
}

int IndicatorMatrix::total() const { return d_.cast<int>().sum(); }

std::vector<int> LeadingIndexSet::ordered() const {
  std::vector<int> out = rows;
  std::sort(out.begin(), out.end());
  return out;
}

bool LeadingIndexSet::distinct() const {
  return std::set<int>(rows.begin(), rows.end()).size() == rows.size();
}

Counts derive_counts(const IndicatorMatrix& delta) {
  Counts c;
  c.d.resize(delta.k());
  c.q.resize(delta.m());
  for (int j = 0; j < delta.k(); ++j) c.d[j] = delta.col_count(j);
  for (int i = 0; i < delta.m(); ++i) c.q[i] = delta.row_count(i);
  for (int j = 0; j < delta.k(); ++j) {
    const int l = delta.leading_row(j);
    if (l < 0) continue;
    c.leading.rows.push_back(l);
    c.leading.cols.push_back(j);
  }
  c.r = c.leading.r();
  return c;
}

ColumnClasses classify_columns(const IndicatorMatrix& delta) {
  ColumnClasses cc;
  for (int j = 0; j < delta.k(); ++j) {
    const int d = delta.col_count(j);
    if (d == 0)
      ++cc.zero;
    else if (d == 1)
      ++cc.r_sp;
    else
      ++cc.r_active;
  }
  return cc;
}

void PriorConfig::validate(int m) const {
  std::ostringstream err;
  if (k < 1) err << "k must be at least 1; ";
  if (S < 0) err << "S must be non-negative; ";
  if (enforce_k_bound && 2 * k > m - S - 1) err << "k=" << k << " exceeds the bound (m-S-1)/2 for m=" << m << ", S=" << S << "; ";
  if (!(a0 > 0) || !(b0 > 0) || !(c0 > 0)) err << "a0, b0, c0 must be positive; ";
  if (C0.size() != m) err << "C0 must have one entry per variable; ";
  else if (!(C0.array() > 0).all()) err << "all C0 entries must be positive; ";
  if (family == PriorFamily::fractional && !(b > 0 && b < 1)) err << "fraction b must lie in (0,1); ";
  if (family == PriorFamily::standard && !(A0 > 0)) err << "A0 must be positive; ";
  const std::string s = err.str();
  if (!s.empty()) throw ConfigError(s.substr(0, s.size() - 2));
}

std::string ModelState::invariant_violation(int S) const {
  std::ostringstream err;
  const int m_ = m(), k_ = k();
  if (delta.m() != m_ || delta.k() != k_) return "delta has wrong shape";
  if (sigma2.size() != m_ || tau.size() != k_ || factors.rows() != k_) return "component sizes disagree";
  for (int i = 0; i < m_; ++i) {
    if (!(sigma2[i] > 0)) err << "sigma2[" << i << "] not positive; ";
    for (int j = 0; j < k_; ++j)
      if (!delta(i, j) && lambda(i, j) != 0.0) err << "nonzero loading at delta=0 cell (" << i << "," << j << "); ";
  }
  for (int j = 0; j < k_; ++j)
    if (!(tau[j] > 0 && tau[j] < 1)) err << "tau[" << j << "] outside (0,1); ";
  const Counts c = derive_counts(delta);
  if (!c.leading.distinct()) err << "leading indices not distinct; ";
  else if (!check_GLT_TS(c.leading.rows, m_, S)) err << "leading indices violate GLT-TS; ";
  return err.str();
}

}  // namespace glt
