// Batch driver: sample paths, evaluate the special functions, and run the
// small-ball / tail / moment experiments. CSV is the primary output (one
// table per run); when writing to a file, a JSON mirror with the full
// resolved configuration is written next to it. Identical flags and seed
// give byte-identical CSV for any worker count.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggbm/estimators.hpp"
#include "ggbm/grid_io.hpp"
#include "ggbm/norms.hpp"
#include "ggbm/pathgen.hpp"
#include "ggbm/report.hpp"
#include "ggbm/specfun.hpp"
#include "ggbm/version.hpp"

namespace {

using ggbm::json;

constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;
constexpr std::uint64_t kFbmStreamBase = 1ull << 32;
constexpr std::uint64_t kMixStreamBase = 2ull << 32;

std::uint64_t default_seed_from_env() {
  if (const char* env = std::getenv("GGBM_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (end && *end == '\0') return v;
    throw std::domain_error("GGBM_SEED is not an integer: " +
                            std::string(env));
  }
  return kDefaultSeed;
}

std::string json_mirror_path(const std::string& out) {
  if (out.size() > 4 && out.substr(out.size() - 4) == ".csv")
    return out.substr(0, out.size() - 4) + ".json";
  return out + ".json";
}

// CSV to --out (or stdout); JSON mirror written only for file output.
void emit(const std::string& out, const std::string& csv, const json& meta) {
  if (out.empty()) {
    std::cout << csv;
    return;
  }
  {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << csv;
  }
  std::ofstream jf(json_mirror_path(out), std::ios::binary);
  if (!jf) throw std::runtime_error("cannot write " + json_mirror_path(out));
  jf << meta.dump(2) << '\n';
}

json base_meta(const std::string& command, std::uint64_t seed,
               unsigned workers) {
  json j;
  j["tool_version"] = ggbm::version_string;
  j["command"] = command;
  json cfg;
  cfg["seed"] = seed;
  cfg["workers"] = workers;
  j["config"] = std::move(cfg);
  return j;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

std::string fmt(double v) { return ggbm::format_double(v); }

// ---------------------------------------------------------------- eval ----

struct EvalOpts {
  std::string function;
  double beta = 0.5;
  double u = 1.0, v = 1.0;
  std::vector<double> x, z, eps;
  int n_terms = 64;
  std::string out;
};

int run_eval(const EvalOpts& o) {
  Stopwatch clock;
  std::vector<std::pair<double, double>> rows;
  if (o.function == "mwright") {
    if (o.x.empty()) throw std::domain_error("eval mwright: need --x");
    const ggbm::MWrightEval eval(o.beta);
    for (const double x : o.x) rows.emplace_back(x, eval(x));
  } else if (o.function == "mlf") {
    if (o.z.empty()) throw std::domain_error("eval mlf: need --z");
    for (const double z : o.z)
      rows.emplace_back(z, ggbm::mittag_leffler({o.u, o.v}, z));
  } else if (o.function == "recip_gamma") {
    if (o.x.empty()) throw std::domain_error("eval recip_gamma: need --x");
    for (const double x : o.x) rows.emplace_back(x, ggbm::recip_gamma(x));
  } else if (o.function == "bm_cdf") {
    if (o.eps.empty()) throw std::domain_error("eval bm_cdf: need --eps");
    for (const double e : o.eps)
      rows.emplace_back(e, ggbm::bm_supnorm_cdf_exact(e, o.n_terms));
  } else {
    throw std::domain_error("eval: unknown function '" + o.function +
                            "' (mwright, mlf, recip_gamma, bm_cdf)");
  }
  std::string csv = "input,value\n";
  for (const auto& [in, val] : rows)
    csv += fmt(in) + "," + fmt(val) + "\n";
  json meta = base_meta("eval", 0, 1);
  meta["config"]["function"] = o.function;
  if (o.function == "mwright") meta["config"]["beta"] = o.beta;
  if (o.function == "mlf") {
    meta["config"]["u"] = o.u;
    meta["config"]["v"] = o.v;
  }
  if (o.function == "bm_cdf") meta["config"]["n_terms"] = o.n_terms;
  json jr = json::array();
  for (const auto& [in, val] : rows) jr.push_back({{"input", in}, {"value", val}});
  meta["rows"] = jr;
  meta["wall_time_seconds"] = clock.seconds();
  emit(o.out, csv, meta);
  return 0;
}

// -------------------------------------------------------------- sample ----

struct SampleOpts {
  std::string process;
  double hurst = 0.5;
  double alpha = 1.0, beta = 0.5;
  std::size_t n_steps = 1024, n_paths = 100000;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string out;
  std::string format = "csv";
};

int run_sample(const SampleOpts& o) {
  Stopwatch clock;
  ggbm::RngStream base(o.seed, 0);
  std::optional<ggbm::PathGrid> grid;
  if (o.process == "fbm") {
    grid.emplace(ggbm::fbm_sample(o.hurst, o.n_steps, o.n_paths, base,
                                  o.workers));
  } else if (o.process == "ggbm") {
    if (o.beta == 1.0)
      throw std::domain_error(
          "sample ggbm: beta = 1 is the fBm limit; use `sample fbm "
          "--hurst " +
          fmt(0.5 * o.alpha) + "` instead");
    grid.emplace(ggbm::ggbm_sample({o.alpha, o.beta}, o.n_steps, o.n_paths,
                                   base, o.workers));
  } else {
    throw std::domain_error("sample: process must be fbm or ggbm");
  }
  if (o.format == "bin") {
    if (o.out.empty())
      throw std::domain_error("sample: binary output needs --out");
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + o.out);
    ggbm::write_grid_binary(f, *grid);
  } else if (o.format == "csv") {
    const std::string csv = ggbm::grid_to_csv(*grid);
    if (o.out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(o.out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + o.out);
      f << csv;
    }
  } else {
    throw std::domain_error("sample: format must be csv or bin");
  }
  if (!o.out.empty()) {
    json meta = base_meta("sample", o.seed, o.workers);
    meta["config"]["process"] = o.process;
    if (o.process == "fbm")
      meta["config"]["hurst"] = o.hurst;
    else {
      meta["config"]["alpha"] = o.alpha;
      meta["config"]["beta"] = o.beta;
    }
    meta["config"]["n_steps"] = grid->n_steps();  // after round-up
    meta["config"]["n_paths"] = grid->n_paths();
    meta["config"]["format"] = o.format;
    meta["wall_time_seconds"] = clock.seconds();
    std::ofstream jf(json_mirror_path(o.out), std::ios::binary);
    jf << meta.dump(2) << '\n';
  }
  return 0;
}

// ----------------------------------------------------------- smallball ----

struct SmallballOpts {
  double alpha = 0.4, beta = 0.4;
  std::string norm = "sup";
  std::vector<double> eps;
  std::size_t n_paths = 100000, n_steps = 1024, n_mix = 100000;
  int order = 4;
  bool force_series = false;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string out;
};

int run_smallball(const SmallballOpts& o) {
  Stopwatch clock;
  const ggbm::NormSpec norm = ggbm::NormSpec::parse(o.norm);
  const auto process = ggbm::ProcessSpec::ggbm(o.alpha, o.beta);
  const std::vector<double> eps_grid =
      o.eps.empty() ? std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.25, 0.3}
                    : o.eps;
  const auto ggbm_set =
      ggbm::norm_samples(process, norm, o.n_paths, o.n_steps,
                         ggbm::RngStream(o.seed, 0), o.workers);
  const auto fbm_set = ggbm::norm_samples(
      ggbm::ProcessSpec::fbm(process.hurst()), norm, o.n_paths, o.n_steps,
      ggbm::RngStream(o.seed, kFbmStreamBase), o.workers);
  const ggbm::MomentTable moments = ggbm::neg_moments(fbm_set, 2 * o.order + 2);
  const ggbm::SeriesExpansion series =
      ggbm::series_coefficients(o.beta, moments, o.order);
  const bool series_on =
      series.validity == ggbm::SeriesExpansion::Validity::SeriesValid ||
      o.force_series;
  const std::string validity =
      series.validity == ggbm::SeriesExpansion::Validity::SeriesValid
          ? "SeriesValid"
          : "LeadingOnly";
  ggbm::RngStream mix_rng(o.seed, kMixStreamBase);
  std::vector<double> l_draws(o.n_mix);
  for (double& l : l_draws) l = ggbm::lbeta_sample(o.beta, mix_rng);
  const ggbm::MCEstimate& eta2 = moments.entries.at(2);

  std::string csv =
      "eps,p_mc,stderr_mc,p_mixed,stderr_mixed,p_series,p_leading,validity,"
      "flags\n";
  json jrows = json::array();
  for (const double eps : eps_grid) {
    const ggbm::MCEstimate mc = ggbm::small_ball_mc(ggbm_set, eps);
    const ggbm::MixedEstimate mixed =
        ggbm::small_ball_mixed_given(fbm_set, eps, l_draws, o.seed);
    std::string p_series_txt;
    double p_series = 0.0, se_series = 0.0;
    bool series_capped = false;
    bool have_series = false;
    if (eps == 0.0) {
      p_series_txt = "0";
      have_series = true;
    } else if (series_on) {
      const ggbm::SeriesValue sv =
          ggbm::small_ball_series(series, eps, 1e-12, o.force_series);
      p_series = sv.value;
      se_series = sv.std_error;
      series_capped = sv.truncated_by_order;
      p_series_txt = fmt(p_series);
      have_series = true;
    }
    const double p_leading =
        eps > 0.0 ? ggbm::leading_order(eta2, o.beta, eps).value : 0.0;
    std::string flags;
    const auto add_flag = [&flags](const char* f) {
      if (!flags.empty()) flags += ';';
      flags += f;
    };
    if (mc.unreliable) add_flag("mc_unreliable");
    if (series_capped) add_flag("series_order_cap");
    csv += fmt(eps) + "," + fmt(mc.value) + "," + fmt(mc.std_error) + "," +
           fmt(mixed.estimate.value) + "," + fmt(mixed.estimate.std_error) +
           "," + p_series_txt + "," + fmt(p_leading) + "," + validity + "," +
           flags + "\n";
    json row;
    row["eps"] = eps;
    row["p_mc"] = ggbm::to_json(mc);
    row["p_mixed"] = ggbm::to_json(mixed.estimate);
    row["fbm_bias_bound"] = mixed.fbm_bias_bound;
    if (have_series && !p_series_txt.empty() && p_series_txt != "0") {
      row["p_series"] = p_series;
      row["stderr_series"] = se_series;
    }
    row["p_leading"] = p_leading;
    row["flags"] = flags;
    jrows.push_back(std::move(row));
  }

  json meta = base_meta("smallball", o.seed, o.workers);
  meta["config"]["alpha"] = o.alpha;
  meta["config"]["beta"] = o.beta;
  meta["config"]["norm"] = ggbm::to_json(norm);
  meta["config"]["theta"] = norm.theta(process.hurst());
  meta["config"]["n_paths"] = o.n_paths;
  meta["config"]["n_steps"] = ggbm_set.n_steps;  // after round-up
  meta["config"]["n_mix"] = o.n_mix;
  meta["config"]["series_order"] = o.order;
  meta["config"]["force_series"] = o.force_series;
  meta["config"]["eps_grid"] = eps_grid;
  meta["validity"] = validity;
  meta["series"] = ggbm::to_json(series);
  meta["moments"] = ggbm::to_json(moments);
  meta["rows"] = std::move(jrows);
  meta["wall_time_seconds"] = clock.seconds();
  emit(o.out, csv, meta);
  return 0;
}

// ---------------------------------------------------------------- tails ----

struct TailsOpts {
  double alpha = 1.0, beta = 0.5;
  std::string norm = "sup";
  std::size_t n_paths = 200000, n_steps = 1024, n_grid = 25;
  double p_lo = 1e-4, p_hi = 1e-1;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string out;
};

int run_tails(const TailsOpts& o) {
  Stopwatch clock;
  if (!(o.p_lo > 0.0 && o.p_lo < o.p_hi && o.p_hi < 1.0))
    throw std::domain_error("tails: need 0 < p_lo < p_hi < 1");
  const ggbm::NormSpec norm = ggbm::NormSpec::parse(o.norm);
  const ggbm::ProcessSpec process =
      o.beta == 1.0 ? ggbm::ProcessSpec::fbm(0.5 * o.alpha)
                    : ggbm::ProcessSpec::ggbm(o.alpha, o.beta);
  const auto set = ggbm::norm_samples(process, norm, o.n_paths, o.n_steps,
                                      ggbm::RngStream(o.seed, 0), o.workers);
  const ggbm::TailFit fit =
      ggbm::tail_exponent_fit(set, o.beta, o.p_lo, o.p_hi, o.n_grid);
  std::string csv = "y,p_hat,stderr\n";
  for (const double y : fit.y_grid) {
    const ggbm::MCEstimate t = ggbm::tail_mc(set, y);
    csv += fmt(y) + "," + fmt(t.value) + "," + fmt(t.std_error) + "\n";
  }
  const json jfit = ggbm::to_json(fit);
  csv += "# fit " + jfit.dump() + "\n";
  json meta = base_meta("tails", o.seed, o.workers);
  meta["config"]["alpha"] = o.alpha;
  meta["config"]["beta"] = o.beta;
  meta["config"]["norm"] = ggbm::to_json(norm);
  meta["config"]["n_paths"] = o.n_paths;
  meta["config"]["n_steps"] = set.n_steps;
  meta["config"]["p_lo"] = o.p_lo;
  meta["config"]["p_hi"] = o.p_hi;
  meta["config"]["n_grid"] = o.n_grid;
  meta["fit"] = jfit;
  meta["wall_time_seconds"] = clock.seconds();
  emit(o.out, csv, meta);
  return 0;
}

// -------------------------------------------------------------- moments ----

struct MomentsOpts {
  double hurst = 0.5;
  std::string norm = "sup";
  int k_max = 10;
  std::size_t n_paths = 100000, n_steps = 1024;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::string out;
};

int run_moments(const MomentsOpts& o) {
  Stopwatch clock;
  if (o.k_max < 2 || o.k_max % 2 != 0)
    throw std::domain_error("moments: k-max must be even and >= 2");
  const ggbm::NormSpec norm = ggbm::NormSpec::parse(o.norm);
  const auto set = ggbm::norm_samples(ggbm::ProcessSpec::fbm(o.hurst), norm,
                                      o.n_paths, o.n_steps,
                                      ggbm::RngStream(o.seed, 0), o.workers);
  const ggbm::MomentTable table = ggbm::neg_moments(set, o.k_max);
  std::string csv = "k,eta_hat,stderr,excluded_count,growth_diag\n";
  for (const auto& [k, e] : table.entries) {
    const double growth =
        std::log(e.value) / (static_cast<double>(k) * std::log(double(k)));
    csv += std::to_string(k) + "," + fmt(e.value) + "," + fmt(e.std_error) +
           "," + std::to_string(table.excluded) + "," + fmt(growth) + "\n";
  }
  json meta = base_meta("moments", o.seed, o.workers);
  meta["config"]["hurst"] = o.hurst;
  meta["config"]["norm"] = ggbm::to_json(norm);
  meta["config"]["theta"] = norm.theta(o.hurst);
  meta["config"]["k_max"] = o.k_max;
  meta["config"]["n_paths"] = o.n_paths;
  meta["config"]["n_steps"] = set.n_steps;
  meta["moments"] = ggbm::to_json(table);
  meta["wall_time_seconds"] = clock.seconds();
  emit(o.out, csv, meta);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ggbm: generalized grey Brownian motion sampling and small-ball / "
      "tail estimation"};
  app.set_version_flag("--version", ggbm::version_string);
  app.require_subcommand(1);

  const std::uint64_t env_seed = [] {
    try {
      return default_seed_from_env();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(2);
    }
  }();

  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "evaluate a special function");
  eval->add_option("function", ev.function,
                   "mwright | mlf | recip_gamma | bm_cdf")
      ->required();
  eval->add_option("--beta", ev.beta, "M-Wright parameter");
  eval->add_option("--u", ev.u, "Mittag-Leffler u");
  eval->add_option("--v", ev.v, "Mittag-Leffler v");
  eval->add_option("--x", ev.x, "argument(s) for mwright / recip_gamma");
  eval->add_option("--z", ev.z, "argument(s) for mlf");
  eval->add_option("--eps", ev.eps, "argument(s) for bm_cdf");
  eval->add_option("--n-terms", ev.n_terms, "bm_cdf series length");
  eval->add_option("--out", ev.out, "output CSV path (default stdout)");

  SampleOpts sa;
  auto* sample = app.add_subcommand("sample", "sample paths to CSV or binary");
  sample->add_option("process", sa.process, "fbm | ggbm")->required();
  sample->add_option("--hurst", sa.hurst, "fBm Hurst index");
  sample->add_option("--alpha", sa.alpha, "ggbm alpha in (0,2)");
  sample->add_option("--beta", sa.beta, "ggbm beta in (0,1)");
  sample->add_option("--n-steps", sa.n_steps,
                     "grid steps (rounded up to a power of two)");
  sample->add_option("--n-paths", sa.n_paths, "number of paths");
  sample->add_option("--seed", sa.seed, "RNG seed")->default_val(env_seed);
  sample->add_option("--workers", sa.workers, "worker threads (0 = auto)");
  sample->add_option("--out", sa.out, "output path (default stdout)");
  sample->add_option("--format", sa.format, "csv | bin");

  SmallballOpts sb;
  auto* smallball =
      app.add_subcommand("smallball", "small-ball probability estimators");
  smallball->add_option("--alpha", sb.alpha, "ggbm alpha in (0,2)")
      ->required();
  smallball->add_option("--beta", sb.beta, "ggbm beta in (0,1)")->required();
  smallball->add_option("--norm", sb.norm, "sup | holder:<gamma> | l2");
  smallball->add_option("--eps", sb.eps, "epsilon grid (repeatable)");
  smallball->add_option("--n-paths", sb.n_paths, "paths per sample set");
  smallball->add_option("--n-steps", sb.n_steps, "grid steps");
  smallball->add_option("--n-mix", sb.n_mix, "mixture draws for p_mixed");
  smallball->add_option("--order", sb.order, "series truncation order N");
  smallball->add_flag("--force-series", sb.force_series,
                      "evaluate the series outside its validity regime "
                      "(exploratory)");
  smallball->add_option("--seed", sb.seed, "RNG seed")->default_val(env_seed);
  smallball->add_option("--workers", sb.workers, "worker threads (0 = auto)");
  smallball->add_option("--out", sb.out, "output CSV path (default stdout)");

  TailsOpts ta;
  auto* tails = app.add_subcommand("tails", "tail probabilities and exponent");
  tails->add_option("--alpha", ta.alpha, "alpha in (0,2)")->required();
  tails->add_option("--beta", ta.beta, "beta in (0,1]; 1 = fBm")->required();
  tails->add_option("--norm", ta.norm, "sup | holder:<gamma> | l2");
  tails->add_option("--n-paths", ta.n_paths, "paths (>= 1e5)");
  tails->add_option("--n-steps", ta.n_steps, "grid steps");
  tails->add_option("--p-lo", ta.p_lo, "tail window lower probability");
  tails->add_option("--p-hi", ta.p_hi, "tail window upper probability");
  tails->add_option("--n-grid", ta.n_grid, "y-grid size");
  tails->add_option("--seed", ta.seed, "RNG seed")->default_val(env_seed);
  tails->add_option("--workers", ta.workers, "worker threads (0 = auto)");
  tails->add_option("--out", ta.out, "output CSV path (default stdout)");

  MomentsOpts mo;
  auto* moments =
      app.add_subcommand("moments", "negative moments of the fBm norm");
  moments->add_option("--hurst", mo.hurst, "Hurst index in (0,1)")->required();
  moments->add_option("--norm", mo.norm, "sup | holder:<gamma> | l2");
  moments->add_option("--k-max", mo.k_max, "largest (even) moment order");
  moments->add_option("--n-paths", mo.n_paths, "paths");
  moments->add_option("--n-steps", mo.n_steps, "grid steps");
  moments->add_option("--seed", mo.seed, "RNG seed")->default_val(env_seed);
  moments->add_option("--workers", mo.workers, "worker threads (0 = auto)");
  moments->add_option("--out", mo.out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*eval) return run_eval(ev);
    if (*sample) return run_sample(sa);
    if (*smallball) return run_smallball(sb);
    if (*tails) return run_tails(ta);
    if (*moments) return run_moments(mo);
  } catch (const ggbm::insufficient_data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ggbm::accuracy_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ggbm::embedding_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::overflow_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
