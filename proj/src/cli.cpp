#include "glt/cli.hpp"

#include "glt/errors.hpp"
#include "glt/identification.hpp"
#include "glt/io.hpp"
#include "glt/mcmc.hpp"
#include "glt/postprocess.hpp"
#include "glt/priors.hpp"
#include "glt/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

namespace glt {
namespace {

namespace fs = std::filesystem;

std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok) - 1);
    } catch (const std::exception&) {
      throw ConfigError("bad index list '" + s + "'");
    }
  }
  return out;
}

double resolve_fraction(const std::string& spec, int T, int m, int k) {
  const FractionDefaults fd = fraction_defaults(T, m, k);
  if (spec == "auto-n") return fd.b_N;
  if (spec == "auto-r") return fd.b_R;
  try {
    std::size_t pos = 0;
    const double b = std::stod(spec, &pos);
    if (pos == spec.size()) return b;
  } catch (const std::exception&) {
  }
  throw ConfigError("--b expects auto-n, auto-r or a number, got '" + spec + "'");
}

// Fills the data-dependent prior fields.
PriorConfig finalize_prior(const RunConfig& rc, const Dataset& data, bool k_given) {
  PriorConfig p = rc.prior;
  const int m = data.m();
  if (!k_given) p.k = std::max(1, (m - p.S - 1) / 2);
  if (rc.E_q > 0) p.a0 = hyperparams_from_simplicity(rc.E_q, p.k, p.b0).a0;
  if (p.family == PriorFamily::fractional) {
    p.b = resolve_fraction(rc.b, data.T(), m, p.k);
    const FractionDefaults fd = fraction_defaults(data.T(), m, p.k);
    spdlog::info("fraction b = {:.6g} (b_N = {:.6g}, b_R = {:.6g}, d(k,m) = {})", p.b, fd.b_N, fd.b_R, fd.d_free);
  }
  if (!(p.c0 > 1.0)) throw ConfigError("c0 must exceed 1");
  const Matrix inv_omega = estimate_inv_omega(data.y, rc.nu0, Matrix::Identity(m, m));
  p.C0 = idio_prior_scale(p.c0, inv_omega.diagonal());
  p.validate(m);
  return p;
}

nlohmann::json chain_report(const DrawStore& s, const std::vector<bool>& mask) {
  nlohmann::json j;
  j["seed"] = s.seed;
  j["draws"] = s.draws.size();
  std::map<int, long> counts;
  long n = 0;
  std::vector<double> d_series;
  for (std::size_t i = 0; i < s.draws.size(); ++i) {
    d_series.push_back(s.draws[i].delta.total());
    if (!mask[i]) continue;
    ++counts[static_cast<int>(s.draws[i].delta.nonzero_columns().size())];
    ++n;
  }
  nlohmann::json pr = nlohmann::json::object();
  for (const auto& [r, c] : counts) pr[std::to_string(r)] = static_cast<double>(c) / static_cast<double>(n);
  j["p_r"] = pr;
  j["p_V"] = s.draws.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(s.draws.size());
  j["inefficiency_d"] = inefficiency_factor(d_series);
  const SweepDiagnostics& g = s.diagnostics;
  auto rate = [](long a, long p) { return p > 0 ? static_cast<double>(a) / static_cast<double>(p) : 0.0; };
  j["acceptance"] = {{"split", rate(g.split_accepted, g.split_proposed)},
                     {"merge", rate(g.merge_accepted, g.merge_proposed)},
                     {"shift", rate(g.shift_accepted, g.shift_proposed)},
                     {"switch", rate(g.switch_accepted, g.switch_proposed)},
                     {"add", rate(g.add_accepted, g.add_proposed)},
                     {"delete", rate(g.delete_accepted, g.delete_proposed)},
                     {"flip", rate(g.flips_accepted, g.flips_proposed)}};
  return j;
}

int cmd_run(RunConfig rc, bool k_given) {
  if (rc.data_path.empty()) throw ConfigError("run needs --data or a config with \"data\"");
  if (rc.chains < 1) throw ConfigError("--chains must be at least 1");
  if (rc.format != "binary" && rc.format != "csv") throw ConfigError("--format must be binary or csv");
  const Dataset data = load_csv(rc.data_path, rc.standardize);
  spdlog::info("loaded {}: T = {}, m = {}", rc.data_path, data.T(), data.m());
  const PriorConfig prior = finalize_prior(rc, data, k_given);
  rc.prior = prior;
  rc.sampler.validate();

  fs::create_directories(rc.output_dir);
  write_text((fs::path(rc.output_dir) / "config.json").string(), run_config_to_json(rc));

  std::vector<DrawStore> stores(rc.chains);
  std::vector<std::exception_ptr> errors(rc.chains);
  std::vector<std::thread> threads;
  for (int c = 0; c < rc.chains; ++c)
    threads.emplace_back([&, c] {
      try {
        SamplerConfig sc = rc.sampler;
        sc.seed = derive_seed(rc.sampler.seed, static_cast<std::uint64_t>(c));
        stores[c] = run_chain(data, prior, sc);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (int c = 0; c < rc.chains; ++c)
    if (errors[c]) {
      write_text((fs::path(rc.output_dir) / "INCOMPLETE").string(), "chain " + std::to_string(c) + " failed");
      std::rethrow_exception(errors[c]);
    }

  nlohmann::json report;
  report["chains"] = nlohmann::json::array();
  for (int c = 0; c < rc.chains; ++c) {
    const std::string base = (fs::path(rc.output_dir) / ("chain" + std::to_string(c))).string();
    if (rc.format == "csv")
      write_draws_csv(base + ".csv", stores[c]);
    else
      write_draws_binary(base + ".bin", stores[c]);
    const ScreenResult scr = screen_variance_identified(stores[c]);
    write_trace_csv(base + "_trace.csv", stores[c], scr.mask);
    report["chains"].push_back(chain_report(stores[c], scr.mask));
  }
  write_text((fs::path(rc.output_dir) / "diagnostics.json").string(), report.dump(2));

  const DrawStore merged = merge_stores(stores);
  const ScreenResult scr = screen_variance_identified(merged);
  const PosteriorSummary summary = summarize(merged, scr.mask);
  write_text((fs::path(rc.output_dir) / "summary.json").string(), summary_to_json(summary, data.names));
  spdlog::info("r mode {} (p_V = {:.3f}), output in {}", summary.r_mode, summary.p_V, rc.output_dir);
  return 0;
}

int cmd_identify(const std::string& path) {
  const IndicatorMatrix delta = load_indicator_csv(path);
  const auto nz = delta.nonzero_columns();
  const IndicatorMatrix reduced = delta.select_columns(nz);
  VarIdVerdict v;
  if (nz.empty()) {
    v.identified = Verdict::yes;
  } else {
    v = verify_variance_identification(reduced);
    if (v.violating_column_subset)
      for (int& c : *v.violating_column_subset) c = nz[c];
  }
  std::cout << verdict_to_json(v, reduced) << '\n';
  return 0;
}

int cmd_summarize(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<DrawStore> stores;
  for (const auto& p : paths) stores.push_back(read_draws(p));
  const DrawStore merged = merge_stores(stores);
  const ScreenResult scr = screen_variance_identified(merged);
  const std::string text = summary_to_json(summarize(merged, scr.mask));
  if (out.empty())
    std::cout << text << '\n';
  else
    write_text(out, text);
  return 0;
}

int cmd_simulate(SimulationSpec spec, const std::string& leading, std::uint64_t seed, const std::string& out,
                 const std::string& truth) {
  if (!leading.empty()) spec.leading = parse_index_list(leading);
  Rng rng(seed);
  const SimulatedData sim = simulate(spec, rng);
  std::ostringstream csv;
  csv.precision(17);
  for (int i = 0; i < spec.m; ++i) csv << (i ? "," : "") << "y" << i + 1;
  csv << '\n';
  for (int t = 0; t < spec.T; ++t) {
    for (int i = 0; i < spec.m; ++i) csv << (i ? "," : "") << sim.y(t, i);
    csv << '\n';
  }
  if (out.empty())
    std::cout << csv.str();
  else
    write_text(out, csv.str());
  if (!truth.empty()) {
    nlohmann::json j;
    j["seed"] = seed;
    j["leading"] = nlohmann::json::array();
    for (int l : spec.leading) j["leading"].push_back(l + 1);
    j["lambda"] = nlohmann::json::array();
    for (int i = 0; i < spec.m; ++i) {
      std::vector<double> row(sim.lambda.cols());
      for (int c = 0; c < sim.lambda.cols(); ++c) row[c] = sim.lambda(i, c);
      j["lambda"].push_back(row);
    }
    j["sigma2"] = std::vector<double>(sim.sigma2.data(), sim.sigma2.data() + sim.sigma2.size());
    write_text(truth, j.dump(2));
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  static auto logger = spdlog::stderr_color_mt("glt-factor");
  spdlog::set_default_logger(logger);

  CLI::App app{"Sparse Bayesian factor analysis with generalized lower triangular loadings"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  // run
  auto* run = app.add_subcommand("run", "Sample the posterior and write draws and summaries");
  RunConfig rc;
  std::string config_path, prior_family = "fractional", boost, u_prop;
  bool no_standardize = false;
  run->add_option("--config", config_path, "JSON run configuration; flags override its values");
  auto* o_data = run->add_option("--data", rc.data_path, "CSV with one row per observation");
  auto* o_k = run->add_option("--k", rc.prior.k, "Maximum number of factors");
  auto* o_S = run->add_option("--S", rc.prior.S, "Maximum overfitting degree");
  auto* o_prior = run->add_option("--prior", prior_family, "fractional or standard");
  auto* o_b = run->add_option("--b", rc.b, "Fraction: auto-n, auto-r or a number");
  auto* o_A0 = run->add_option("--A0", rc.prior.A0, "Slab variance scale (standard prior)");
  auto* o_a0 = run->add_option("--a0", rc.prior.a0, "Beta prior a0 on tau");
  auto* o_b0 = run->add_option("--b0", rc.prior.b0, "Beta prior b0 on tau");
  auto* o_c0 = run->add_option("--c0", rc.prior.c0, "Inverted Gamma shape of the variances");
  auto* o_Eq = run->add_option("--Eq", rc.E_q, "Expected row simplicity; sets a0 from b0");
  auto* o_nu0 = run->add_option("--nu0", rc.nu0, "Inverted Wishart weight for C0");
  auto* o_M = run->add_option("--draws", rc.sampler.M, "Sweeps after burn-in");
  auto* o_M0 = run->add_option("--burnin", rc.sampler.M0, "Burn-in sweeps");
  auto* o_thin = run->add_option("--thin", rc.sampler.thin, "Keep every n-th sweep");
  auto* o_chains = run->add_option("--chains", rc.chains, "Independent chains");
  auto* o_seed = run->add_option("--seed", rc.sampler.seed, "Base seed");
  auto* o_out = run->add_option("--out", rc.output_dir, "Output directory");
  auto* o_format = run->add_option("--format", rc.format, "Draw store format: binary or csv");
  auto* o_boost = run->add_option("--boost", boost, "none, asis_max, asis_leading or mda");
  auto* o_u = run->add_option("--u-proposal", u_prop, "uniform, beta_on_U, uniform_on_U2 or beta_on_U2");
  auto* o_init = run->add_option("--init-r", rc.sampler.init_r, "Initial number of factors (-1 random)");
  auto* o_log = run->add_option("--log-every", rc.sampler.log_every, "Progress interval in sweeps");
  auto* o_nostd = run->add_flag("--no-standardize", no_standardize, "Use the data as given");
  auto* o_keep = run->add_flag("--keep-factors", rc.sampler.keep_factors, "Store factor draws");
  bool allow_large_k = false;
  auto* o_large = run->add_flag("--allow-large-k", allow_large_k, "Permit k above (m-S-1)/2");

  // identify
  auto* identify = app.add_subcommand("identify", "Check variance identification of an indicator matrix");
  std::string matrix_path;
  identify->add_option("--matrix", matrix_path, "CSV of 0/1 entries")->required();

  // summarize
  auto* summ = app.add_subcommand("summarize", "Summarize stored draws");
  std::vector<std::string> draw_paths;
  std::string summary_out;
  summ->add_option("--draws", draw_paths, "Draw stores, one per chain")->required();
  summ->add_option("--out", summary_out, "Summary JSON path (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic GLT data set");
  SimulationSpec spec;
  std::string leading, sim_out, truth_out;
  std::uint64_t sim_seed = 1;
  sim->add_option("--m", spec.m, "Variables");
  sim->add_option("--T", spec.T, "Observations");
  sim->add_option("--leading", leading, "Comma separated 1-based leading rows, one per factor");
  sim->add_option("--load-lo", spec.load_lo, "Smallest loading magnitude");
  sim->add_option("--load-hi", spec.load_hi, "Largest loading magnitude");
  sim->add_option("--sigma2-lo", spec.sigma2_lo, "Smallest idiosyncratic variance");
  sim->add_option("--sigma2-hi", spec.sigma2_hi, "Largest idiosyncratic variance");
  sim->add_option("--density", spec.density, "Inclusion probability below the leading rows");
  sim->add_option("--seed", sim_seed, "Seed");
  sim->add_option("--out", sim_out, "CSV path (default stdout)");
  sim->add_option("--truth", truth_out, "JSON path for the true parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? 0 : static_cast<int>(ExitCode::config);
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (*run) {
      RunConfig merged = config_path.empty() ? RunConfig{} : read_run_config(config_path);
      auto take = [](CLI::Option* o, auto& dst, const auto& src) {
        if (o->count() > 0) dst = src;
      };
      take(o_data, merged.data_path, rc.data_path);
      take(o_k, merged.prior.k, rc.prior.k);
      take(o_S, merged.prior.S, rc.prior.S);
      take(o_b, merged.b, rc.b);
      take(o_A0, merged.prior.A0, rc.prior.A0);
      take(o_a0, merged.prior.a0, rc.prior.a0);
      take(o_b0, merged.prior.b0, rc.prior.b0);
      take(o_c0, merged.prior.c0, rc.prior.c0);
      take(o_Eq, merged.E_q, rc.E_q);
      take(o_nu0, merged.nu0, rc.nu0);
      take(o_M, merged.sampler.M, rc.sampler.M);
      take(o_M0, merged.sampler.M0, rc.sampler.M0);
      take(o_thin, merged.sampler.thin, rc.sampler.thin);
      take(o_chains, merged.chains, rc.chains);
      take(o_seed, merged.sampler.seed, rc.sampler.seed);
      take(o_out, merged.output_dir, rc.output_dir);
      take(o_format, merged.format, rc.format);
      take(o_init, merged.sampler.init_r, rc.sampler.init_r);
      take(o_log, merged.sampler.log_every, rc.sampler.log_every);
      take(o_keep, merged.sampler.keep_factors, rc.sampler.keep_factors);
      if (o_nostd->count() > 0) merged.standardize = false;
      if (o_large->count() > 0) merged.prior.enforce_k_bound = false;
      if (o_prior->count() > 0) {
        if (prior_family != "fractional" && prior_family != "standard")
          throw ConfigError("--prior must be fractional or standard");
        merged.prior.family = prior_family == "standard" ? PriorFamily::standard : PriorFamily::fractional;
      }
      if (o_boost->count() > 0) merged.sampler.boost = parse_boost_mode(boost);
      if (o_u->count() > 0) merged.sampler.u_proposal = parse_u_proposal(u_prop);
      bool k_given = o_k->count() > 0;
      if (!config_path.empty() && !k_given) {
        std::ifstream in(config_path);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        k_given = j.is_object() && j.contains("prior") && j["prior"].contains("k");
      }
      return cmd_run(merged, k_given);
    }
    if (*identify) return cmd_identify(matrix_path);
    if (*summ) return cmd_summarize(draw_paths, summary_out);
    if (*sim) return cmd_simulate(spec, leading, sim_seed, sim_out, truth_out);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return static_cast<int>(ExitCode::numeric);
  }
  return 0;
}

}  // namespace glt
