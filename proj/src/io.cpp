#include "glt/io.hpp"

#include "glt/errors.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace glt {
namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\"");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("ParseError: cannot open '" + path + "'");
  Table t;
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    std::vector<double> vals(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) numeric = parse_double(cells[c], vals[c]) && numeric;
    if (first) {
      width = cells.size();
      first = false;
      if (!numeric) {
        t.header = cells;
        continue;
      }
    }
    if (cells.size() != width)
      throw DataError("NonRectangular: row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(width));
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_double(cells[c], vals[c]))
        throw DataError("NonNumericCell: row " + std::to_string(lineno) + ", column " + std::to_string(c + 1) +
                        ": '" + cells[c] + "'");
    t.rows.push_back(std::move(vals));
  }
  if (t.rows.empty()) throw DataError("ParseError: '" + path + "' has no data rows");
  return t;
}

// Counter names shared by the binary, CSV and JSON writers.
const std::vector<std::pair<const char*, long SweepDiagnostics::*>>& counters() {
  static const std::vector<std::pair<const char*, long SweepDiagnostics::*>> c = {
      {"split_proposed", &SweepDiagnostics::split_proposed},   {"split_accepted", &SweepDiagnostics::split_accepted},
      {"merge_proposed", &SweepDiagnostics::merge_proposed},   {"merge_accepted", &SweepDiagnostics::merge_accepted},
      {"shift_proposed", &SweepDiagnostics::shift_proposed},   {"shift_accepted", &SweepDiagnostics::shift_accepted},
      {"switch_proposed", &SweepDiagnostics::switch_proposed}, {"switch_accepted", &SweepDiagnostics::switch_accepted},
      {"add_proposed", &SweepDiagnostics::add_proposed},       {"add_accepted", &SweepDiagnostics::add_accepted},
      {"delete_proposed", &SweepDiagnostics::delete_proposed}, {"delete_accepted", &SweepDiagnostics::delete_accepted},
      {"flips_proposed", &SweepDiagnostics::flips_proposed},   {"flips_accepted", &SweepDiagnostics::flips_accepted},
  };
  return c;
}

constexpr char kMagic[8] = {'G', 'L', 'T', 'D', 'R', 'A', 'W', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& i) {
  T v{};
  i.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!i) throw DataError("ParseError: truncated draw file");
  return v;
}
void put_doubles(std::ostream& o, const double* p, std::size_t n) {
  o.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}
void get_doubles(std::istream& i, double* p, std::size_t n) {
  i.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!i) throw DataError("ParseError: truncated draw file");
}

DrawStore read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw DataError("ParseError: not a draw file");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw DataError("ParseError: unsupported draw file version " + std::to_string(version));
  DrawStore s;
  s.m = get<std::int32_t>(in);
  s.k = get<std::int32_t>(in);
  s.seed = get<std::uint64_t>(in);
  for (const auto& [name, field] : counters()) s.diagnostics.*field = get<std::int64_t>(in);
  s.diagnostics.r_active = get<std::int32_t>(in);
  s.diagnostics.d_total = get<std::int32_t>(in);
  const auto n = get<std::uint64_t>(in);
  if (s.m < 0 || s.k < 0) throw DataError("ParseError: bad dimensions in draw file");
  s.draws.resize(n);
  for (Draw& d : s.draws) {
    d.sweep = get<std::int64_t>(in);
    IndicatorMatrix::Storage st(s.m, s.k);
    in.read(reinterpret_cast<char*>(st.data()), st.size());
    if (!in) throw DataError("ParseError: truncated draw file");
    d.delta = IndicatorMatrix(st);
    d.lambda.resize(s.m, s.k);
    get_doubles(in, d.lambda.data(), d.lambda.size());
    d.sigma2.resize(s.m);
    get_doubles(in, d.sigma2.data(), s.m);
    d.tau.resize(s.k);
    get_doubles(in, d.tau.data(), s.k);
    const auto fr = get<std::int32_t>(in);
    const auto fc = get<std::int32_t>(in);
    d.factors.resize(fr, fc);
    get_doubles(in, d.factors.data(), d.factors.size());
  }
  return s;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DrawStore read_csv_store(std::istream& in) {
  DrawStore s;
  std::string line;
  std::getline(in, line);
  unsigned long long seed = 0;
  if (std::sscanf(line.c_str(), "# glt-draws v1 m=%d k=%d seed=%llu", &s.m, &s.k, &seed) != 3)
    throw DataError("ParseError: bad draw CSV header");
  s.seed = seed;
  std::getline(in, line);
  {
    std::stringstream ss(line.substr(line.find(' ') + 1));
    std::string tok;
    while (ss >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq);
      const long v = std::stol(tok.substr(eq + 1));
      for (const auto& [name, field] : counters())
        if (key == name) s.diagnostics.*field = v;
      if (key == "r_active") s.diagnostics.r_active = static_cast<int>(v);
      if (key == "d_total") s.diagnostics.d_total = static_cast<int>(v);
    }
  }
  std::getline(in, line);  // column names
  const int m = s.m, k = s.k;
  const std::size_t width = 4 + 2 * static_cast<std::size_t>(m * k) + m + k;
  int lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != width) throw DataError("NonRectangular: draw CSV row " + std::to_string(lineno));
    std::vector<double> v(width);
    for (std::size_t c = 0; c < width; ++c)
      if (c != 3 && !parse_double(cells[c], v[c]))
        throw DataError("NonNumericCell: draw CSV row " + std::to_string(lineno) + ", column " +
                        std::to_string(c + 1));
    Draw d;
    d.sweep = static_cast<long>(v[0]);
    d.delta = IndicatorMatrix(m, k);
    d.lambda.resize(m, k);
    std::size_t c = 4;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) d.delta.set(i, j, v[c++] != 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) d.lambda(i, j) = v[c++];
    d.sigma2.resize(m);
    for (int i = 0; i < m; ++i) d.sigma2[i] = v[c++];
    d.tau.resize(k);
    for (int j = 0; j < k; ++j) d.tau[j] = v[c++];
    s.draws.push_back(std::move(d));
  }
  return s;
}

json matrix_json(const Matrix& a) {
  json out = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    out.push_back(row);
  }
  return out;
}

json indicator_json(const IndicatorMatrix& d) {
  json out = json::array();
  for (int i = 0; i < d.m(); ++i) {
    json row = json::array();
    for (int j = 0; j < d.k(); ++j) row.push_back(d(i, j) ? 1 : 0);
    out.push_back(row);
  }
  return out;
}

json one_based(const std::vector<int>& v) {
  json out = json::array();
  for (int x : v) out.push_back(x + 1);
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, bool standardize) {
  Table t = read_table(path);
  const int T = static_cast<int>(t.rows.size());
  const int m = static_cast<int>(t.rows.front().size());
  Matrix y(T, m);
  for (int r = 0; r < T; ++r)
    for (int c = 0; c < m; ++c) y(r, c) = t.rows[r][c];
  return Dataset::from_matrix(std::move(y), standardize, t.header);
}

IndicatorMatrix load_indicator_csv(const std::string& path) {
  Table t = read_table(path);
  std::vector<std::vector<int>> rows;
  for (const auto& r : t.rows) {
    std::vector<int> out;
    for (double v : r) out.push_back(v == 0.0 ? 0 : (v == 1.0 ? 1 : -1));
    rows.push_back(std::move(out));
  }
  return IndicatorMatrix::from_rows(rows);
}

std::uint64_t pattern_hash(const IndicatorMatrix& delta) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int j = 0; j < delta.k(); ++j)
    for (int i = 0; i < delta.m(); ++i) {
      h ^= delta(i, j) ? 1u : 0u;
      h *= 1099511628211ULL;
    }
  return h;
}

void write_draws_binary(const std::string& path, const DrawStore& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(kMagic, 8);
  put<std::uint32_t>(out, kVersion);
  put<std::int32_t>(out, s.m);
  put<std::int32_t>(out, s.k);
  put<std::uint64_t>(out, s.seed);
  for (const auto& [name, field] : counters()) put<std::int64_t>(out, s.diagnostics.*field);
  put<std::int32_t>(out, s.diagnostics.r_active);
  put<std::int32_t>(out, s.diagnostics.d_total);
  put<std::uint64_t>(out, s.draws.size());
  for (const Draw& d : s.draws) {
    put<std::int64_t>(out, d.sweep);
    out.write(reinterpret_cast<const char*>(d.delta.storage().data()), d.delta.storage().size());
    put_doubles(out, d.lambda.data(), d.lambda.size());
    put_doubles(out, d.sigma2.data(), d.sigma2.size());
    put_doubles(out, d.tau.data(), d.tau.size());
    put<std::int32_t>(out, static_cast<std::int32_t>(d.factors.rows()));
    put<std::int32_t>(out, static_cast<std::int32_t>(d.factors.cols()));
    put_doubles(out, d.factors.data(), d.factors.size());
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

void write_draws_csv(const std::string& path, const DrawStore& s) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "# glt-draws v1 m=" << s.m << " k=" << s.k << " seed=" << s.seed << "\n# diagnostics";
  for (const auto& [name, field] : counters()) out << ' ' << name << '=' << s.diagnostics.*field;
  out << " r_active=" << s.diagnostics.r_active << " d_total=" << s.diagnostics.d_total << '\n';
  out << "sweep,r,d,delta_hash";
  for (const char* prefix : {"delta", "lambda"})
    for (int i = 0; i < s.m; ++i)
      for (int j = 0; j < s.k; ++j) out << ',' << prefix << '_' << i + 1 << '_' << j + 1;
  for (int i = 0; i < s.m; ++i) out << ",sigma2_" << i + 1;
  for (int j = 0; j < s.k; ++j) out << ",tau_" << j + 1;
  out << '\n';
  for (const Draw& d : s.draws) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(pattern_hash(d.delta)));
    out << d.sweep << ',' << d.delta.nonzero_columns().size() << ',' << d.delta.total() << ',' << hash;
    for (int i = 0; i < s.m; ++i)
      for (int j = 0; j < s.k; ++j) out << ',' << (d.delta(i, j) ? 1 : 0);
    for (int i = 0; i < s.m; ++i)
      for (int j = 0; j < s.k; ++j) out << ',' << fmt17(d.lambda(i, j));
    for (int i = 0; i < s.m; ++i) out << ',' << fmt17(d.sigma2[i]);
    for (int j = 0; j < s.k; ++j) out << ',' << fmt17(d.tau[j]);
    out << '\n';
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

DrawStore read_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("ParseError: cannot open '" + path + "'");
  const int c = in.peek();
  if (c == 'G') return read_binary(in);
  if (c == '#') return read_csv_store(in);
  throw DataError("ParseError: '" + path + "' is not a draw store");
}

std::string summary_to_json(const PosteriorSummary& s, const std::vector<std::string>& names) {
  json j;
  j["n_draws"] = s.n_draws;
  j["n_identified"] = s.n_identified;
  j["p_V"] = s.p_V;
  json pr = json::object();
  for (const auto& [r, p] : s.p_r) pr[std::to_string(r)] = p;
  j["p_r"] = pr;
  j["r_mode"] = s.r_mode;
  j["l_star"] = one_based(s.l_star);
  j["p_L"] = s.p_L;
  j["hpm"] = {{"delta", indicator_json(s.hpm)}, {"p_H", s.p_H}, {"d_H", s.d_H}, {"l_H", one_based(s.l_H)}};
  j["mpm"] = {{"delta", indicator_json(s.mpm)}, {"d_M", s.d_M}};
  j["inclusion_probs"] = matrix_json(s.inclusion_probs);
  j["loading_means"] = matrix_json(s.loading_means);
  j["sigma2_means"] = std::vector<double>(s.sigma2_means.data(), s.sigma2_means.data() + s.sigma2_means.size());
  j["communalities"] = matrix_json(s.communalities);
  j["communality_totals"] =
      std::vector<double>(s.communality_totals.data(), s.communality_totals.data() + s.communality_totals.size());
  j["p_zero_row"] = std::vector<double>(s.p_zero_row.data(), s.p_zero_row.data() + s.p_zero_row.size());
  j["d_mean"] = s.d_mean;
  j["inefficiency"] = {{"d", s.if_d}, {"r", s.if_r}};
  json diag;
  for (const auto& [name, field] : counters()) diag[name] = s.diagnostics.*field;
  auto rate = [](long a, long p) { return p > 0 ? static_cast<double>(a) / static_cast<double>(p) : 0.0; };
  diag["split_rate"] = rate(s.diagnostics.split_accepted, s.diagnostics.split_proposed);
  diag["merge_rate"] = rate(s.diagnostics.merge_accepted, s.diagnostics.merge_proposed);
  j["diagnostics"] = diag;
  if (!names.empty()) j["variables"] = names;
  return j.dump(2);
}

std::string verdict_to_json(const VarIdVerdict& v, const IndicatorMatrix& pattern) {
  json j;
  j["identified"] = to_string(v.identified);
  j["method"] = to_string(v.method);
  j["m"] = pattern.m();
  j["r"] = pattern.k();
  if (v.violating_column_subset)
    j["violating_column_subset"] = one_based(*v.violating_column_subset);
  else
    j["violating_column_subset"] = nullptr;
  return j.dump(2);
}

void write_trace_csv(const std::string& path, const DrawStore& store, const std::vector<bool>& mask) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "sweep,r,d,identified\n";
  for (std::size_t n = 0; n < store.draws.size(); ++n) {
    const Draw& d = store.draws[n];
    out << d.sweep << ',' << d.delta.nonzero_columns().size() << ',' << d.delta.total() << ','
        << (mask[n] ? 1 : 0) << '\n';
  }
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  try {
    c.data_path = j.value("data", c.data_path);
    c.standardize = j.value("standardize", c.standardize);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.chains = j.value("chains", c.chains);
    c.format = j.value("format", c.format);
    if (j.contains("prior")) {
      const json& p = j["prior"];
      const std::string fam = p.value("family", std::string("fractional"));
      if (fam != "fractional" && fam != "standard") throw ConfigError("unknown prior family '" + fam + "'");
      c.prior.family = fam == "standard" ? PriorFamily::standard : PriorFamily::fractional;
      if (p.contains("b")) c.b = p["b"].is_string() ? p["b"].get<std::string>() : fmt17(p["b"].get<double>());
      c.prior.A0 = p.value("A0", c.prior.A0);
      c.prior.a0 = p.value("a0", c.prior.a0);
      c.prior.b0 = p.value("b0", c.prior.b0);
      c.prior.c0 = p.value("c0", c.prior.c0);
      c.prior.S = p.value("S", c.prior.S);
      c.prior.k = p.value("k", c.prior.k);
      c.prior.enforce_k_bound = !p.value("allow_large_k", false);
      c.E_q = p.value("E_q", c.E_q);
      c.nu0 = p.value("nu0", c.nu0);
    }
    if (j.contains("sampler")) {
      const json& s = j["sampler"];
      SamplerConfig& x = c.sampler;
      x.M = s.value("draws", x.M);
      x.M0 = s.value("burnin", x.M0);
      x.thin = s.value("thin", x.thin);
      x.seed = s.value("seed", x.seed);
      if (s.contains("boost")) x.boost = parse_boost_mode(s["boost"].get<std::string>());
      if (s.contains("u_proposal")) x.u_proposal = parse_u_proposal(s["u_proposal"].get<std::string>());
      x.u0 = s.value("u0", x.u0);
      x.v0 = s.value("v0", x.v0);
      x.p0 = s.value("p0", x.p0);
      x.ps = s.value("ps", x.ps);
      x.p_shift = s.value("p_shift", x.p_shift);
      x.p_switch = s.value("p_switch", x.p_switch);
      x.p_a = s.value("p_a", x.p_a);
      x.init_r = s.value("init_r", x.init_r);
      x.keep_factors = s.value("keep_factors", x.keep_factors);
      x.log_every = s.value("log_every", x.log_every);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["data"] = c.data_path;
  j["standardize"] = c.standardize;
  j["output_dir"] = c.output_dir;
  j["chains"] = c.chains;
  j["format"] = c.format;
  j["prior"] = {{"family", c.prior.family == PriorFamily::standard ? "standard" : "fractional"},
                {"b", c.b},
                {"A0", c.prior.A0},
                {"a0", c.prior.a0},
                {"b0", c.prior.b0},
                {"c0", c.prior.c0},
                {"S", c.prior.S},
                {"k", c.prior.k},
                {"allow_large_k", !c.prior.enforce_k_bound},
                {"E_q", c.E_q},
                {"nu0", c.nu0}};
  const SamplerConfig& s = c.sampler;
  j["sampler"] = {{"draws", s.M},           {"burnin", s.M0},        {"thin", s.thin},
                  {"seed", s.seed},         {"boost", to_string(s.boost)}, {"u_proposal", to_string(s.u_proposal)},
                  {"u0", s.u0},             {"v0", s.v0},            {"p0", s.p0},
                  {"ps", s.ps},             {"p_shift", s.p_shift},  {"p_switch", s.p_switch},
                  {"p_a", s.p_a},           {"init_r", s.init_r},    {"keep_factors", s.keep_factors},
                  {"log_every", s.log_every}};
  return j.dump(2);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace glt
