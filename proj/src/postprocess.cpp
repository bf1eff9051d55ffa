#include "glt/postprocess.hpp"

#include "glt/errors.hpp"
#include "glt/identification.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace glt {
namespace {

std::string pattern_key(const IndicatorMatrix& d) {
  const auto& s = d.storage();
  return std::string(reinterpret_cast<const char*>(s.data()), static_cast<std::size_t>(s.size()));
}

bool identified_uncached(const IndicatorMatrix& delta) {
  const auto nz = delta.nonzero_columns();
  if (nz.empty()) return true;
  return verify_variance_identification(delta.select_columns(nz)).yes();
}

std::vector<int> leading_tuple(const IndicatorMatrix& delta) {
  std::vector<int> out;
  for (int j = 0; j < delta.k(); ++j)
    if (delta.leading_row(j) >= 0) out.push_back(delta.leading_row(j));
  return out;
}

std::vector<double> series_if_by_chain(const DrawStore& store, int which) {
  // Chains in a merged store are separated where the sweep counter restarts.
  std::vector<double> ifs, seg;
  long prev = -1;
  auto flush = [&] {
    if (seg.size() >= 4) ifs.push_back(inefficiency_factor(seg));
    seg.clear();
  };
  for (const Draw& d : store.draws) {
    if (d.sweep <= prev) flush();
    prev = d.sweep;
    seg.push_back(which == 0 ? d.delta.total() : static_cast<double>(d.delta.nonzero_columns().size()));
  }
  flush();
  return ifs;
}

double mean_or_one(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ScreenResult screen_variance_identified(const DrawStore& store) {
  ScreenResult out;
  out.mask.reserve(store.draws.size());
  std::map<std::string, bool> cache;
  long hits = 0;
  for (const Draw& d : store.draws) {
    const std::string key = pattern_key(d.delta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, identified_uncached(d.delta)).first;
    out.mask.push_back(it->second);
    if (it->second) ++hits;
    LeadingIndexSet lead = derive_counts(d.delta).leading;
    if (!lead.distinct()) spdlog::warn("draw at sweep {} has colliding leading rows", d.sweep);
  }
  out.p_V = store.draws.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(store.draws.size());
  return out;
}

NumFactors posterior_num_factors(const DrawStore& store, const std::vector<bool>& mask) {
  NumFactors out;
  std::map<int, long> counts;
  long n = 0;
  for (std::size_t i = 0; i < store.draws.size(); ++i) {
    if (!mask[i]) continue;
    ++counts[static_cast<int>(store.draws[i].delta.nonzero_columns().size())];
    ++n;
  }
  if (n == 0) throw EmptySample("no variance-identified draws");
  long best = -1;
  for (const auto& [r, c] : counts) {
    out.pmf[r] = static_cast<double>(c) / static_cast<double>(n);
    if (c > best) {
      best = c;
      out.mode = r;
    }
  }
  return out;
}

Draw resolve_trivial_rotation(const Draw& d) {
  const int k = d.delta.k();
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const int la = d.delta.leading_row(a), lb = d.delta.leading_row(b);
    if (la < 0 || lb < 0) return la >= 0 && lb < 0;
    return la < lb;
  });
  Draw out;
  out.sweep = d.sweep;
  out.sigma2 = d.sigma2;
  out.delta = d.delta.select_columns(order);
  out.lambda.resize(d.lambda.rows(), k);
  out.tau.resize(k);
  const bool has_f = d.factors.size() > 0;
  if (has_f) out.factors.resize(k, d.factors.cols());
  for (int n = 0; n < k; ++n) {
    const int j = order[n];
    const int l = d.delta.leading_row(j);
    const double sign = (l >= 0 && d.lambda(l, j) < 0) ? -1.0 : 1.0;
    out.lambda.col(n) = sign * d.lambda.col(j);
    out.tau[n] = d.tau[j];
    if (has_f) out.factors.row(n) = sign * d.factors.row(j);
  }
  return out;
}

double inefficiency_factor(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return 1.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  auto acov = [&](std::size_t h) {
    double s = 0.0;
    for (std::size_t t = 0; t + h < n; ++t) s += (x[t] - mean) * (x[t + h] - mean);
    return s / static_cast<double>(n);
  };
  const double g0 = acov(0);
  if (!(g0 > 0)) return 1.0;
  double sum = 0.0;  // sum of Gamma_k = gamma_{2k} + gamma_{2k+1}
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double G = acov(2 * k) + acov(2 * k + 1);
    if (G <= 0) break;
    G = std::min(G, prev);
    sum += G;
    prev = G;
  }
  return std::max((2.0 * sum - g0) / g0, 1e-12);
}

PosteriorSummary summarize(const DrawStore& store, const std::vector<bool>& mask) {
  PosteriorSummary s;
  const int m = store.m, k = store.k;
  s.n_draws = static_cast<int>(store.draws.size());
  const NumFactors nf = posterior_num_factors(store, mask);
  s.p_r = nf.pmf;
  s.r_mode = nf.mode;
  s.diagnostics = store.diagnostics;

  std::vector<Draw> kept;
  for (std::size_t i = 0; i < store.draws.size(); ++i)
    if (mask[i]) kept.push_back(resolve_trivial_rotation(store.draws[i]));
  s.n_identified = static_cast<int>(kept.size());
  const double n = static_cast<double>(kept.size());
  s.p_V = static_cast<double>(kept.size()) / static_cast<double>(store.draws.size());

  std::map<std::vector<int>, long> lead_counts;
  std::map<std::string, std::pair<long, std::size_t>> pattern_counts;
  s.communalities = Matrix::Zero(m, k);
  s.communality_totals = Vector::Zero(m);
  s.p_zero_row = Vector::Zero(m);
  for (std::size_t n_i = 0; n_i < kept.size(); ++n_i) {
    const Draw& d = kept[n_i];
    ++lead_counts[leading_tuple(d.delta)];
    auto& pc = pattern_counts[pattern_key(d.delta)];
    if (pc.first++ == 0) pc.second = n_i;
    s.d_mean += d.delta.total();
    for (int i = 0; i < m; ++i) {
      const double common = d.lambda.row(i).squaredNorm();
      const double total = common + d.sigma2[i];
      for (int j = 0; j < k; ++j) s.communalities(i, j) += d.lambda(i, j) * d.lambda(i, j) / total;
      s.communality_totals[i] += common / total;
      if (d.delta.row_count(i) == 0) s.p_zero_row[i] += 1.0;
    }
  }
  s.communalities /= n;
  s.communality_totals /= n;
  s.p_zero_row /= n;
  s.d_mean /= n;

  long best = -1;
  for (const auto& [tuple, c] : lead_counts)
    if (c > best) {
      best = c;
      s.l_star = tuple;
    }
  s.p_L = static_cast<double>(best) / n;

  // Most visited pattern; ties go to the earliest visit.
  long hbest = -1;
  std::size_t hidx = 0;
  for (const auto& [key, v] : pattern_counts)
    if (v.first > hbest || (v.first == hbest && v.second < hidx)) {
      hbest = v.first;
      hidx = v.second;
    }
  s.hpm = kept[hidx].delta;
  s.p_H = static_cast<double>(hbest) / n;
  s.d_H = s.hpm.total();
  s.l_H = leading_tuple(s.hpm);

  s.inclusion_probs = Matrix::Zero(m, k);
  s.loading_means = Matrix::Zero(m, k);
  s.sigma2_means = Vector::Zero(m);
  long nl = 0;
  for (const Draw& d : kept) {
    if (leading_tuple(d.delta) != s.l_star) continue;
    ++nl;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) s.inclusion_probs(i, j) += d.delta(i, j) ? 1.0 : 0.0;
    s.loading_means += d.lambda;
    s.sigma2_means += d.sigma2;
  }
  s.inclusion_probs /= static_cast<double>(nl);
  s.loading_means /= static_cast<double>(nl);
  s.sigma2_means /= static_cast<double>(nl);
  s.mpm = IndicatorMatrix(m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) s.mpm.set(i, j, s.inclusion_probs(i, j) >= 0.5);
  s.d_M = s.mpm.total();

  s.if_d = mean_or_one(series_if_by_chain(store, 0));
  s.if_r = mean_or_one(series_if_by_chain(store, 1));
  return s;
}

DrawStore merge_stores(const std::vector<DrawStore>& stores) {
  if (stores.empty()) throw EmptySample("no chains to merge");
  DrawStore out;
  out.m = stores.front().m;
  out.k = stores.front().k;
  out.seed = stores.front().seed;
  for (const DrawStore& s : stores) {
    if (s.m != out.m || s.k != out.k) throw DataError("chains have different dimensions");
    out.draws.insert(out.draws.end(), s.draws.begin(), s.draws.end());
    out.diagnostics.add(s.diagnostics);
  }
  return out;
}

}  // namespace glt
