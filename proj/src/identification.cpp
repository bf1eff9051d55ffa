#include "glt/identification.hpp"

#include "glt/errors.hpp"
#include "glt/rng.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace glt {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "undetermined";
  }
}

std::string to_string(VarIdMethod m) {
  switch (m) {
    case VarIdMethod::simple_rules: return "simple_rules";
    case VarIdMethod::full_NC: return "full_NC";
    case VarIdMethod::block_decomposition: return "block_decomposition";
    default: return "brute_force";
  }
}

namespace {

class Bits {
 public:
  explicit Bits(int n = 0) : w_((n + 63) / 64, 0) {}
  void set(int i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  int count() const {
    int n = 0;
    for (auto x : w_) n += std::popcount(x);
    return n;
  }
  void assign_or(const Bits& a, const Bits& b) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = a.w_[i] | b.w_[i];
  }

 private:
  std::vector<std::uint64_t> w_;
};

// Row cover of each column.
struct ColumnCover {
  int m = 0;
  std::vector<Bits> cols;

  explicit ColumnCover(const IndicatorMatrix& nz) : m(nz.m()) {
    for (int j = 0; j < nz.k(); ++j) {
      Bits b(m);
      for (int i = 0; i < m; ++i)
        if (nz(i, j)) b.set(i);
      cols.push_back(std::move(b));
    }
  }
  int r() const { return static_cast<int>(cols.size()); }
};

// First q-subset (lexicographic) whose union covers fewer than 2q+1 rows.
std::optional<std::vector<int>> first_violation(const ColumnCover& c, int q) {
  const int r = c.r();
  if (q < 1 || q > r) return std::nullopt;
  std::vector<int> pick(q);
  std::vector<Bits> acc(q + 1, Bits(c.m));
  const int need = 2 * q + 1;
  std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
    if (depth == q) return acc[depth].count() < need;
    for (int j = start; j <= r - (q - depth); ++j) {
      pick[depth] = j;
      acc[depth + 1].assign_or(acc[depth], c.cols[j]);
      if (rec(j + 1, depth + 1)) return true;
    }
    return false;
  };
  if (rec(0, 0)) return pick;
  return std::nullopt;
}

std::vector<int> simple_rule_orders(int r) {
  std::vector<int> qs;
  for (int q : {1, 2, r - 1, r})
    if (q >= 1 && q <= r && std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  std::sort(qs.begin(), qs.end());
  return qs;
}

std::optional<std::vector<int>> first_simple_violation(const ColumnCover& c) {
  for (int q : simple_rule_orders(c.r()))
    if (auto v = first_violation(c, q)) return v;
  return std::nullopt;
}

std::optional<std::vector<int>> first_nc_violation(const ColumnCover& c) {
  for (int q = 1; q <= c.r(); ++q)
    if (auto v = first_violation(c, q)) return v;
  return std::nullopt;
}

std::vector<int> map_subset(const std::vector<int>& sub, const std::vector<int>& ids) {
  std::vector<int> out;
  for (int s : sub) out.push_back(ids[s]);
  return out;
}

// Residual block: rows and original column ids still in play.
struct Block {
  std::vector<int> rows;
  std::vector<int> cols;

  IndicatorMatrix extract(const IndicatorMatrix& nz) const {
    IndicatorMatrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = 0; b < cols.size(); ++b) out.set(a, b, nz(rows[a], cols[b]));
    return out;
  }
};

// Smallest set of s < r_B columns (s <= 4) with at least 2s+1 rows dedicated to it.
std::optional<std::vector<int>> find_dedicated_block(const IndicatorMatrix& B) {
  const int r = B.k();
  std::vector<std::vector<int>> row_cols(B.m());
  for (int i = 0; i < B.m(); ++i) row_cols[i] = B.cols_in_row(i);
  for (int s = 1; s <= std::min(4, r - 1); ++s) {
    std::vector<int> pick(s);
    std::vector<char> in(r, 0);
    std::optional<std::vector<int>> hit;
    std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
      if (depth == s) {
        std::vector<int> ded;
        for (int i = 0; i < B.m(); ++i) {
          const auto& rc = row_cols[i];
          if (rc.empty()) continue;
          if (std::all_of(rc.begin(), rc.end(), [&](int j) { return in[j] != 0; })) ded.push_back(i);
        }
        if (static_cast<int>(ded.size()) < 2 * s + 1) return false;
        IndicatorMatrix A(static_cast<int>(ded.size()), s);
        for (std::size_t a = 0; a < ded.size(); ++a)
          for (int b = 0; b < s; ++b) A.set(a, b, B(ded[a], pick[b]));
        if (!check_simple_rules(A)) return false;
        hit = pick;
        return true;
      }
      for (int j = start; j <= r - (s - depth); ++j) {
        pick[depth] = j;
        in[j] = 1;
        const bool done = rec(j + 1, depth + 1);
        in[j] = 0;
        if (done) return true;
      }
      return false;
    };
    if (rec(0, 0)) return hit;
  }
  return std::nullopt;
}

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 14, 5>;

int numerical_rank(const SmallMat& a) {
  if (a.rows() == 0) return 0;
  Eigen::JacobiSVD<SmallMat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-8 * s[0]) ++rank;
  return rank;
}

SmallMat take_rows(const SmallMat& L, std::uint32_t mask) {
  SmallMat out(std::popcount(mask), L.cols());
  int a = 0;
  for (int i = 0; i < L.rows(); ++i)
    if (mask >> i & 1u) out.row(a++) = L.row(i);
  return out;
}

bool ar_holds(const SmallMat& L) {
  const int m = static_cast<int>(L.rows());
  const int r = static_cast<int>(L.cols());
  if (2 * r > m - 1) return false;
  const std::uint32_t all = (std::uint32_t{1} << m) - 1;
  // Rank-r status of every r-row subset, reused across deleted rows.
  std::vector<std::uint32_t> full_rank_sets;
  std::vector<int> pick(r);
  std::function<void(int, int, std::uint32_t)> rec = [&](int start, int depth, std::uint32_t mask) {
    if (depth == r) {
      if (numerical_rank(take_rows(L, mask)) == r) full_rank_sets.push_back(mask);
      return;
    }
    for (int i = start; i <= m - (r - depth); ++i) rec(i + 1, depth + 1, mask | (std::uint32_t{1} << i));
  };
  rec(0, 0, 0);
  for (int del = 0; del < m; ++del) {
    const std::uint32_t rest = all & ~(std::uint32_t{1} << del);
    if (numerical_rank(take_rows(L, rest)) < r) return false;
    bool found = false;
    for (std::uint32_t a : full_rank_sets) {
      if (a >> del & 1u) continue;
      if (numerical_rank(take_rows(L, rest & ~a)) == r) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool check_simple_rules(const IndicatorMatrix& nz) {
  const ColumnCover c(nz);
  if (c.r() == 0) return true;
  return !first_simple_violation(c).has_value();
}

VarIdVerdict check_NC(const IndicatorMatrix& nz) {
  const ColumnCover c(nz);
  VarIdVerdict v;
  v.method = c.r() <= 4 ? VarIdMethod::simple_rules : VarIdMethod::full_NC;
  auto viol = first_nc_violation(c);
  v.identified = viol ? Verdict::no : Verdict::yes;
  v.violating_column_subset = std::move(viol);
  return v;
}

VarIdVerdict block_decompose_verify(const IndicatorMatrix& nz) {
  const ColumnCover c(nz);
  VarIdVerdict v;
  const int r = c.r();
  v.method = r <= 4 ? VarIdMethod::simple_rules : VarIdMethod::block_decomposition;
  if (auto viol = first_simple_violation(c)) {
    v.identified = Verdict::no;
    v.violating_column_subset = std::move(viol);
    return v;
  }
  if (r <= 4) {
    v.identified = Verdict::yes;
    return v;
  }
  Block B;
  for (int i = 0; i < nz.m(); ++i)
    if (nz.row_count(i) > 0) B.rows.push_back(i);
  for (int j = 0; j < r; ++j) B.cols.push_back(j);
  while (true) {
    const IndicatorMatrix sub = B.extract(nz);
    const auto blk = find_dedicated_block(sub);
    if (!blk) {
      // No further blocks: the remaining counting rules settle the residual.
      auto viol = first_nc_violation(ColumnCover(sub));
      v.identified = viol ? Verdict::no : Verdict::yes;
      if (viol) v.violating_column_subset = map_subset(*viol, B.cols);
      return v;
    }
    std::vector<char> drop(B.cols.size(), 0);
    for (int b : *blk) drop[b] = 1;
    Block next;
    for (std::size_t b = 0; b < B.cols.size(); ++b)
      if (!drop[b]) next.cols.push_back(B.cols[b]);
    for (int i : B.rows) {
      bool keep = false;
      for (int j : next.cols) keep = keep || nz(i, j);
      if (keep) next.rows.push_back(i);
    }
    B = std::move(next);
    const IndicatorMatrix residual = B.extract(nz);
    if (auto viol = first_simple_violation(ColumnCover(residual))) {
      v.identified = Verdict::no;
      v.violating_column_subset = map_subset(*viol, B.cols);
      return v;
    }
    if (residual.k() <= 4) {
      v.identified = Verdict::yes;
      return v;
    }
  }
}

VarIdVerdict verify_variance_identification(const IndicatorMatrix& nz) {
  if (nz.k() <= 4) {
    VarIdVerdict v;
    v.method = VarIdMethod::simple_rules;
    const ColumnCover c(nz);
    auto viol = c.r() == 0 ? std::nullopt : first_simple_violation(c);
    v.identified = viol ? Verdict::no : Verdict::yes;
    v.violating_column_subset = std::move(viol);
    return v;
  }
  return block_decompose_verify(nz);
}

bool verify_AR_bruteforce(const IndicatorMatrix& pattern, int trials, std::uint64_t seed) {
  const int m = pattern.m(), r = pattern.k();
  if (m > 14 || r > 5) throw InstanceTooLarge("brute-force oracle limited to m <= 14 and r <= 5");
  if (r == 0) return true;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    SmallMat L(m, r);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < r; ++j) L(i, j) = pattern(i, j) ? rng.normal() : 0.0;
    if (!ar_holds(L)) return false;
  }
  return true;
}

bool check_GLT_TS(const std::vector<int>& leading_rows, int m, int S) {
  std::vector<int> l = leading_rows;
  std::sort(l.begin(), l.end());
  const int r = static_cast<int>(l.size());
  for (int z = 1; z <= r; ++z) {
    const int lj = l[z - 1] + 1;
    if (m - lj - S < 2 * (r - z + 1)) return false;
  }
  return true;
}

std::vector<int> admissible_leading_rows(const std::vector<int>& l_minus_j, int m, int S) {
  std::vector<int> out;
  std::vector<int> cand = l_minus_j;
  cand.push_back(0);
  for (int i = 0; i + 1 <= m - S - 2; ++i) {
    if (std::find(l_minus_j.begin(), l_minus_j.end(), i) != l_minus_j.end()) continue;
    cand.back() = i;
    if (check_GLT_TS(cand, m, S)) out.push_back(i);
  }
  return out;
}

}  // namespace glt
