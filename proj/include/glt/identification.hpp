#pragma once

#include "glt/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glt {

enum class Verdict { yes, no, undetermined };
enum class VarIdMethod { simple_rules, full_NC, block_decomposition, brute_force };

std::string to_string(Verdict v);
std::string to_string(VarIdMethod m);

struct VarIdVerdict {
  Verdict identified = Verdict::undetermined;
  VarIdMethod method = VarIdMethod::simple_rules;
  // Columns (indices into the matrix passed in) of the first violating subset.
  std::optional<std::vector<int>> violating_column_subset;

  bool yes() const { return identified == Verdict::yes; }
};

// All functions below expect an indicator matrix restricted to its nonzero columns.

// Column sizes >= 3, pair unions >= 5, all-column union >= 2r+1, (r-1)-unions >= 2r-1.
bool check_simple_rules(const IndicatorMatrix& nz);

// Every q-column subset covers at least 2q+1 nonzero rows. Subsets are visited in
// ascending q, lexicographic order; the first violation is reported.
VarIdVerdict check_NC(const IndicatorMatrix& nz);

// Sequential extraction of dedicated sub-blocks, then counting rules on the residual.
VarIdVerdict block_decompose_verify(const IndicatorMatrix& nz);

// Preferred check: simple rules when r <= 4, block decomposition otherwise.
VarIdVerdict verify_variance_identification(const IndicatorMatrix& nz);

// Generic-loadings oracle for the row deletion property. For every trial, draws
// N(0,1) loadings on the pattern, deletes each row in turn and searches all
// disjoint row splits for two rank-r blocks. Limited to m <= 14, r <= 5.
bool verify_AR_bruteforce(const IndicatorMatrix& pattern, int trials, std::uint64_t seed);

// Leading rows are 0-based. True iff m - l - S >= 2(r - z + 1) for every leading
// row (1-based l) of rank z among the sorted leading rows.
bool check_GLT_TS(const std::vector<int>& leading_rows, int m, int S);

// Rows i not in l_minus_j such that l_minus_j plus i satisfies GLT-TS.
std::vector<int> admissible_leading_rows(const std::vector<int>& l_minus_j, int m, int S);

}  // namespace glt
