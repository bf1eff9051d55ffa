#pragma once

#include "glt/draws.hpp"
#include "glt/identification.hpp"
#include "glt/mcmc.hpp"
#include "glt/postprocess.hpp"
#include "glt/types.hpp"

#include <string>
#include <vector>

namespace glt {

// Numeric CSV with an optional header row; rows are observations. Errors carry a
// "ParseError", "NonRectangular" or "NonNumericCell" tag and the 1-based location.
Dataset load_csv(const std::string& path, bool standardize);
IndicatorMatrix load_indicator_csv(const std::string& path);

// Binary store with a versioned header; keeps factors when present.
void write_draws_binary(const std::string& path, const DrawStore& store);
// CSV export: one line per draw with sweep, r, d, pattern hash, delta, Lambda, sigma2, tau.
void write_draws_csv(const std::string& path, const DrawStore& store);
// Reads either format, chosen from the file's first bytes.
DrawStore read_draws(const std::string& path);

std::uint64_t pattern_hash(const IndicatorMatrix& delta);

std::string summary_to_json(const PosteriorSummary& s, const std::vector<std::string>& names = {});
std::string verdict_to_json(const VarIdVerdict& v, const IndicatorMatrix& pattern);
// sweep, r, d, identified per draw.
void write_trace_csv(const std::string& path, const DrawStore& store, const std::vector<bool>& mask);

struct RunConfig {
  std::string data_path;
  bool standardize = true;
  std::string output_dir = "glt-out";
  int chains = 2;
  std::string format = "binary";  // or "csv"

  PriorConfig prior;
  std::string b = "auto-n";  // auto-n, auto-r or a literal fraction
  double E_q = 0.0;          // > 0 derives a0 from the expected row simplicity
  double nu0 = 3.0;          // inverted Wishart weight for the C0 estimate

  SamplerConfig sampler;
};

RunConfig read_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& c);

void write_text(const std::string& path, const std::string& text);

}  // namespace glt
