// bajd: command-line driver for the joint diagonalization sampler.
//
// Exit codes: 0 success, 2 invalid arguments, 3 I/O failure, 4 numerical abort.

#include "bajd/baseline.hpp"
#include "bajd/diagnostics.hpp"
#include "bajd/experiments.hpp"
#include "bajd/gibbs.hpp"
#include "bajd/matrix_io.hpp"
#include "bajd/synth.hpp"
#include "bajd/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

/// Raised for option values that parse but make no sense.
class ArgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerFlags {
  int nsamps = 5000;
  int burnin = 2500;
  int thin = 1;
  int chains = 1;
  std::string scheme = "rejection";
  int grid_size = 1000;
  double slice_width = 0.25;
  bool random_scan = false;
  std::string init = "joint-eigen";
  double prior_a = 1e-3;
  double prior_b = 1e-3;
  std::uint64_t seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--nsamps", nsamps, "Total iterations, burn-in included")->check(CLI::PositiveNumber);
    app->add_option("--burnin", burnin, "Burn-in iterations")->check(CLI::NonNegativeNumber);
    app->add_option("--thin", thin, "Keep every thin-th iteration")->check(CLI::PositiveNumber);
    app->add_option("--chains", chains, "Independent chains")->check(CLI::PositiveNumber);
    app->add_option("--scheme", scheme, "theta sampler")->check(CLI::IsMember({"rejection", "slice", "grid"}));
    app->add_option("--grid-size", grid_size, "Grid cells (grid scheme)")->check(CLI::PositiveNumber);
    app->add_option("--slice-width", slice_width, "Initial slice width (slice scheme)")->check(CLI::PositiveNumber);
    app->add_flag("--random-scan", random_scan, "Random coordinate order in Bingham sweeps");
    app->add_option("--init", init, "Chain initialization")->check(CLI::IsMember({"joint-eigen", "mean-eigen", "random"}));
    app->add_option("--prior-a", prior_a, "Inverse-gamma shape for sigma2 and v2")->check(CLI::PositiveNumber);
    app->add_option("--prior-b", prior_b, "Inverse-gamma scale for sigma2 and v2")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Master seed");
  }

  [[nodiscard]] bajd::SamplerConfig config(Eigen::Index k) const {
    bajd::SamplerConfig c;
    c.n_samples = nsamps;
    c.burn_in = burnin;
    c.thin = thin;
    c.n_chains = chains;
    c.scheme = bajd::ThetaScheme::parse(scheme);
    c.scheme.grid_size = grid_size;
    c.scheme.slice_width = slice_width;
    c.scheme.random_scan = random_scan;
    c.init = bajd::parse_init_method(init);
    c.hyper = bajd::HyperParams::uniform(k, prior_a, prior_b);
    c.seed = seed;
    c.validate();
    return c;
  }
};

/// Fills options of `sub` that were not given on the command line from a
/// flat JSON object {"option-name": value, ...}.
void apply_config(CLI::App* sub, const fs::path& path) {
  const json cfg = bajd::read_json_file(path);
  if (!cfg.is_object()) throw ArgError("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw ArgError("unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      text = value.dump();
    } else {
      throw ArgError("config key '" + key + "' must be a string, number or boolean");
    }
    opt->clear();
    opt->add_result(text);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ArgError("config key '" + key + "': " + e.what());
    }
  }
}

/// Options that must come from the command line or the config file.
void require_options(CLI::App* sub, std::initializer_list<const char*> names) {
  for (const char* name : names)
    if (sub->get_option(name)->count() == 0) throw ArgError(std::string(name) + " is required");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw bajd::IoError("cannot create output directory " + dir.string());
}

json api_json(const bajd::ApiSummary& a, bool with_map = true) {
  json j{{"min", a.min}, {"mean", a.mean}, {"std", a.std}, {"max", a.max}};
  if (with_map) j["map"] = a.map;
  return j;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ess_json(const std::vector<bajd::ChainTrace>& traces) {
  const auto per_chain = bajd::loglik_ess(traces);
  json arr = json::array();
  std::vector<double> have;
  for (const auto& e : per_chain) {
    arr.push_back(opt_json(e));
    if (e) have.push_back(*e);
  }
  json j{{"loglik_per_chain", arr}};
  if (have.empty() || have.size() != per_chain.size()) {
    j["loglik_min"] = nullptr;
    j["loglik_mean"] = nullptr;
  } else {
    const auto s = bajd::summarize(have);
    j["loglik_min"] = s.min;
    j["loglik_mean"] = s.mean;
  }
  return j;
}

std::vector<Eigen::Index> parse_range(const std::string& text, Eigen::Index n) {
  const auto dots = text.find("..");
  long lo = 0;
  long hi = 0;
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stol(text);
    } else {
      lo = std::stol(text.substr(0, dots));
      hi = std::stol(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw ArgError("--m-range must look like 1..10");
  }
  if (lo < 1 || hi < lo || hi > n) throw ArgError("--m-range must satisfy 1 <= lo <= hi <= N");
  std::vector<Eigen::Index> out;
  for (long m = lo; m <= hi; ++m) out.push_back(m);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw bajd::IoError("cannot write " + path.string());
  out << text;
  if (!out) throw bajd::IoError("write failed for " + path.string());
}

void write_signal_csv(const bajd::SignalMatrix& s, const fs::path& path) { bajd::write_matrix_csv(s.data, path); }

/// Writes the state dump of a numerical abort next to the requested output.
int report_abort(const bajd::NumericalAbort& e, const fs::path& dir) {
  fs::path dump = dir / "abort_dump.json";
  try {
    ensure_dir(dir);
    write_text(dump, e.state_dump() + "\n");
  } catch (const bajd::IoError&) {
    dump = fs::temp_directory_path() / "bajd_abort_dump.json";
    write_text(dump, e.state_dump() + "\n");
  }
  std::cerr << "numerical abort: " << e.what() << "\nstate dump: " << dump.string() << "\n";
  return kExitNumeric;
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string kind = "jd";
  Eigen::Index n = 10;
  Eigen::Index m = 5;
  Eigen::Index k = 100;
  double sigma2 = 0.01;
  Eigen::Index samples = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const fs::path dir(a.out);
  bajd::Truth truth;
  truth.seed = a.seed;
  std::optional<bajd::MatrixSet> data;
  std::vector<std::pair<std::string, bajd::SignalMatrix>> signals;

  if (a.kind == "jd") {
    if (a.n < 1 || a.m < 1 || a.m > a.n || a.k < 1) throw ArgError("generate jd: need 1 <= m <= n and k >= 1");
    if (a.sigma2 < 0.0) throw ArgError("generate jd: sigma2 must be >= 0");
    bajd::Rng rng(bajd::stream_seed(a.seed, bajd::Stream::kPlanted));
    auto inst = bajd::gen_jd_dataset(a.n, a.m, a.k, a.sigma2, rng);
    truth.b_true = inst.b_true.matrix();
    truth.u_true = inst.u_true.values;
    truth.sigma2 = a.sigma2;
    data = std::move(inst.c);
  } else if (a.kind == "bss") {
    bajd::BssSetup setup;
    setup.n_sources = a.n;
    setup.n_lags = a.k;
    setup.n_samples = a.samples > 0 ? a.samples : 1000;
    if (a.sigma2 < 0.0) throw ArgError("generate bss: sigma2 must be >= 0");
    setup.noise_sigma = std::sqrt(a.sigma2);
    if (setup.n_sources < 1 || setup.n_lags < 1 || setup.n_lags >= setup.n_samples)
      throw ArgError("generate bss: need n >= 1 and 1 <= k < samples");
    auto p = bajd::make_bss_problem(setup, a.seed);
    truth.b_true = p.target;
    truth.sigma2 = a.sigma2;
    signals.emplace_back("x.csv", p.x);
    data = std::move(p.c);
  } else {
    const Eigen::Index per_class = a.samples > 0 ? a.samples : 200;
    if (per_class < 2) throw ArgError("generate cspa: need at least 2 samples per class");
    auto p = bajd::make_cspa_problem(per_class, a.seed);
    truth.b_true = p.w * p.data.a;
    truth.sigma2 = 0.0;
    signals.emplace_back("y1.csv", p.data.y1);
    signals.emplace_back("y2.csv", p.data.y2);
    data = std::move(p.c);
  }

  ensure_dir(dir);
  bajd::write_matrix_set_json(*data, dir / "data.json");
  bajd::write_json_file(bajd::to_json(truth), dir / "truth.json");
  for (const auto& [name, s] : signals) write_signal_csv(s, dir / name);
  std::cout << "generate " << a.kind << ": N=" << data->dim() << " K=" << data->size() << " -> "
            << (dir / "data.json").string() << ", " << (dir / "truth.json").string() << "\n";
  return 0;
}

// --- sample ---------------------------------------------------------------

struct SampleArgs {
  std::string data;
  Eigen::Index m = 0;
  std::string out;
  bool timing = false;
  SamplerFlags sampler;
};

int cmd_sample(const SampleArgs& a) {
  const bajd::MatrixSet c = bajd::read_matrix_set(a.data);
  if (a.m < 1 || a.m > c.dim()) throw ArgError("sample: --m must lie in 1..N");
  const bajd::SamplerConfig cfg = a.sampler.config(c.size());
  const fs::path dir(a.out);
  ensure_dir(dir);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<bajd::ChainTrace> traces;
  try {
    traces = bajd::run_chains(c, a.m, cfg);
  } catch (const bajd::NumericalAbort& e) {
    return report_abort(e, dir);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bajd::write_trace_csv(traces, dir / "trace.csv");
  bajd::write_states_jsonl(traces, dir / "states.jsonl");

  const auto& map = bajd::map_estimate(traces);
  int map_chain = 0;
  for (const auto& t : traces)
    for (const auto& r : t.retained)
      if (&r == &map) map_chain = t.chain;
  json reorth = json::array();
  double max_err = 0.0;
  for (const auto& t : traces) {
    reorth.push_back(t.reorthonormalizations);
    max_err = std::max(max_err, t.max_orthonormality_error);
  }
  json summary{{"n", c.dim()},
               {"m", a.m},
               {"k", c.size()},
               {"chains", cfg.n_chains},
               {"nsamps", cfg.n_samples},
               {"burnin", cfg.burn_in},
               {"thin", cfg.thin},
               {"scheme", std::string(cfg.scheme.name())},
               {"init", bajd::init_method_name(cfg.init)},
               {"seed", cfg.seed},
               {"retained_per_chain", traces.front().retained.size()},
               {"r_hat", opt_json(bajd::loglik_r_hat(traces))},
               {"ess", ess_json(traces)},
               {"map", {{"chain", map_chain}, {"iter", map.iter}, {"loglik", map.loglik}, {"logpost", map.logpost}}},
               {"reorthonormalizations", reorth},
               {"max_orthonormality_error", max_err}};
  if (a.timing) summary["runtime_seconds"] = seconds;
  bajd::write_json_file(summary, dir / "summary.json");
  std::cout << "sample: " << traces.size() << " chain(s), " << traces.front().retained.size()
            << " retained each -> " << dir.string() << "\n";
  return 0;
}

// --- diagnose -------------------------------------------------------------

struct DiagnoseArgs {
  std::string trace;
  std::string truth;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  const auto traces = bajd::read_trace_dir(a.trace);
  if (traces.empty() || traces.front().retained.empty()) throw bajd::IoError("trace directory holds no retained states");
  json out{{"ess", ess_json(traces)}, {"r_hat", opt_json(bajd::loglik_r_hat(traces))}};
  if (!a.truth.empty()) {
    const bajd::Truth truth = bajd::read_truth(a.truth);
    const auto& b = traces.front().retained.front().state.b;
    if (truth.b_true.rows() != b.rows() || truth.b_true.cols() != b.cols())
      throw ArgError("truth is " + std::to_string(truth.b_true.rows()) + "x" + std::to_string(truth.b_true.cols()) +
                     " but samples are " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    out["api"] = api_json(bajd::api_summary(traces, truth.b_true));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --- model-select ---------------------------------------------------------

struct ModelSelectArgs {
  std::string data;
  std::string m_range;
  std::string out;
  SamplerFlags sampler;
};

int cmd_model_select(const ModelSelectArgs& a) {
  const bajd::MatrixSet c = bajd::read_matrix_set(a.data);
  const auto ms = parse_range(a.m_range.empty() ? "1.." + std::to_string(c.dim()) : a.m_range, c.dim());
  const bajd::SamplerConfig cfg = a.sampler.config(c.size());
  bajd::ModelSelection sel;
  try {
    sel = bajd::model_select(c, ms, cfg);
  } catch (const bajd::NumericalAbort& e) {
    return report_abort(e, a.out.empty() ? fs::path(".") : fs::path(a.out).parent_path());
  }
  std::ostringstream csv;
  csv << "m,bic_log_marginal\n";
  for (std::size_t i = 0; i < sel.ms.size(); ++i) csv << sel.ms[i] << ',' << bajd::format_double(sel.scores[i]) << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
    std::cerr << "chosen m = " << sel.best_m << "\n";
  } else {
    write_text(a.out, csv.str());
    std::cout << "chosen m = " << sel.best_m << "\n";
  }
  return 0;
}

// --- compare --------------------------------------------------------------

struct CompareArgs {
  std::string data;
  std::string truth;
  SamplerFlags sampler;
};

int cmd_compare(const CompareArgs& a) {
  const bajd::MatrixSet c = bajd::read_matrix_set(a.data);
  const bajd::Truth truth = bajd::read_truth(a.truth);
  if (truth.b_true.rows() != c.dim() || truth.b_true.cols() < 1)
    throw ArgError("truth rows must equal the data dimension N");
  bajd::Comparison cmp;
  try {
    cmp = bajd::compare_methods(c, truth.b_true, a.sampler.config(c.size()));
  } catch (const bajd::NumericalAbort& e) {
    return report_abort(e, ".");
  }
  const json out{{"jacobi_api", cmp.jacobi_api},
                 {"gibbs_map_api", cmp.gibbs.map},
                 {"gibbs_api_stats", api_json(cmp.gibbs, false)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

// --- bingham-bench --------------------------------------------------------

struct BenchArgs {
  Eigen::Index m = 10;
  int nsamps = 20000;
  int burnin = 1000;
  std::vector<std::string> schemes{"rejection", "slice", "grid"};
  std::uint64_t seed = 0;
  std::string out;
  std::string bounds;
};

int cmd_bingham_bench(const BenchArgs& a) {
  if (a.m < 2) throw ArgError("bingham-bench: --m must be >= 2");
  if (a.nsamps < 100) throw ArgError("bingham-bench: --nsamps must be >= 100");
  std::vector<bajd::ThetaScheme> schemes;
  for (const auto& s : a.schemes) schemes.push_back(bajd::ThetaScheme::parse(s));
  const auto rows = bajd::bingham_bench(a.m, a.nsamps, a.burnin, schemes, a.seed);
  std::ostringstream csv;
  csv << "scheme,min,median,mean,max\n";
  for (const auto& r : rows)
    csv << r.scheme << ',' << bajd::format_double(r.ess.min) << ',' << bajd::format_double(r.ess.median) << ','
        << bajd::format_double(r.ess.mean) << ',' << bajd::format_double(r.ess.max) << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(a.out, csv.str());
  }
  if (!a.bounds.empty()) {
    std::ostringstream b;
    b << "scheme,lambda_min,min_quadratic_form,max_quadratic_form,lambda_max\n";
    for (const auto& r : rows)
      b << r.scheme << ',' << bajd::format_double(r.lambda_min) << ',' << bajd::format_double(r.min_log_density) << ','
        << bajd::format_double(r.max_log_density) << ',' << bajd::format_double(r.lambda_max) << '\n';
    write_text(a.bounds, b.str());
  }
  return 0;
}

// --- demos ----------------------------------------------------------------

struct BssArgs {
  Eigen::Index sources = 10;
  Eigen::Index samples = 1000;
  Eigen::Index lags = 100;
  double sigma = 0.1;
  SamplerFlags sampler;
};

int cmd_bss_demo(const BssArgs& a) {
  bajd::BssSetup setup;
  setup.n_sources = a.sources;
  setup.n_samples = a.samples;
  setup.n_lags = a.lags;
  setup.noise_sigma = a.sigma;
  if (setup.n_sources < 2 || setup.n_lags < 1 || setup.n_lags >= setup.n_samples || setup.noise_sigma < 0.0)
    throw ArgError("bss-demo: need sources >= 2, 1 <= lags < samples, sigma >= 0");
  const auto problem = bajd::make_bss_problem(setup, a.sampler.seed);
  bajd::BssResult r;
  try {
    r = bajd::run_bss_demo(problem, a.sampler.config(problem.c.size()));
  } catch (const bajd::NumericalAbort& e) {
    return report_abort(e, ".");
  }
  const json out{{"jacobi_api", r.jacobi_api}, {"gibbs_map_api", r.gibbs.map}, {"gibbs_api_stats", api_json(r.gibbs, false)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct CspaArgs {
  Eigen::Index samples = 200;
  std::string out;
  SamplerFlags sampler;
};

int cmd_cspa_demo(const CspaArgs& a) {
  if (a.samples < 2) throw ArgError("cspa-demo: need at least 2 samples per class");
  const auto problem = bajd::make_cspa_problem(a.samples, a.sampler.seed);
  bajd::CspaResult r;
  try {
    r = bajd::run_cspa_demo(problem, a.sampler.config(problem.c.size()));
  } catch (const bajd::NumericalAbort& e) {
    return report_abort(e, a.out.empty() ? fs::path(".") : fs::path(a.out));
  }
  std::ostringstream var;
  var << "class,var_1,var_2\n";
  var << "1," << bajd::format_double(r.var1[0]) << ',' << bajd::format_double(r.var1[1]) << '\n';
  var << "2," << bajd::format_double(r.var2[0]) << ',' << bajd::format_double(r.var2[1]) << '\n';
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    ensure_dir(dir);
    std::ostringstream filt;
    filt << "class,y1,y2\n";
    for (Eigen::Index t = 0; t < r.filtered1.samples(); ++t)
      filt << "1," << bajd::format_double(r.filtered1.data(0, t)) << ',' << bajd::format_double(r.filtered1.data(1, t)) << '\n';
    for (Eigen::Index t = 0; t < r.filtered2.samples(); ++t)
      filt << "2," << bajd::format_double(r.filtered2.data(0, t)) << ',' << bajd::format_double(r.filtered2.data(1, t)) << '\n';
    write_text(dir / "filtered.csv", filt.str());
    write_text(dir / "variances.csv", var.str());
  }
  std::cout << var.str();
  std::cout << "pooled_offdiag," << bajd::format_double(r.pooled_cov(0, 1)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian approximate joint diagonalization"};
  app.require_subcommand(1);
  std::string config;

  auto add_config = [&config](CLI::App* sub) {
    sub->add_option("--config", config, "JSON file of option values; command-line flags win");
  };

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic data set and its truth file");
  generate->add_option("--kind", gen.kind, "jd, bss or cspa")->check(CLI::IsMember({"jd", "bss", "cspa"}));
  generate->add_option("--n", gen.n, "Matrix size (jd) or number of sources (bss)");
  generate->add_option("--m", gen.m, "Planted eigenvectors (jd)");
  generate->add_option("--k", gen.k, "Matrices (jd) or lags (bss)");
  generate->add_option("--sigma2", gen.sigma2, "Noise variance");
  generate->add_option("--samples", gen.samples, "Signal length (bss) or samples per class (cspa)");
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--out", gen.out, "Output directory");
  add_config(generate);

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample", "Run the Gibbs sampler");
  sample->add_option("--data", smp.data, "MatrixSet JSON file or directory of CSV matrices");
  sample->add_option("--m", smp.m, "Number of eigenvectors");
  sample->add_option("--out", smp.out, "Output directory");
  sample->add_flag("--timing", smp.timing, "Record wall-clock runtime in summary.json");
  smp.sampler.add_to(sample);
  add_config(sample);

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "ESS, R and API of a sampler run");
  diagnose->add_option("--trace", diag.trace, "Directory written by sample");
  diagnose->add_option("--truth", diag.truth, "Truth file written by generate");
  add_config(diagnose);

  ModelSelectArgs msel;
  auto* model_select = app.add_subcommand("model-select", "BIC score for each number of eigenvectors");
  model_select->add_option("--data", msel.data, "MatrixSet JSON file or directory of CSV matrices");
  model_select->add_option("--m-range", msel.m_range, "lo..hi (default 1..N)");
  model_select->add_option("--out", msel.out, "CSV output file (default: standard output)");
  msel.sampler.add_to(model_select);
  add_config(model_select);

  CompareArgs cmpa;
  auto* compare = app.add_subcommand("compare", "Jacobi baseline against the Gibbs sampler");
  compare->add_option("--data", cmpa.data, "MatrixSet JSON file or directory of CSV matrices");
  compare->add_option("--truth", cmpa.truth, "Truth file written by generate");
  cmpa.sampler.add_to(compare);
  add_config(compare);

  BenchArgs bench;
  auto* bingham = app.add_subcommand("bingham-bench", "ESS of the vector Bingham samplers");
  bingham->add_option("--m", bench.m, "Dimension");
  bingham->add_option("--nsamps", bench.nsamps, "Samples per scheme");
  bingham->add_option("--burnin", bench.burnin, "Discarded sweeps")->check(CLI::NonNegativeNumber);
  bingham->add_option("--schemes", bench.schemes, "Comma-separated schemes")->delimiter(',');
  bingham->add_option("--seed", bench.seed, "Master seed");
  bingham->add_option("--out", bench.out, "CSV output file (default: standard output)");
  bingham->add_option("--bounds", bench.bounds, "Also write quadratic-form bounds CSV here");
  add_config(bingham);

  BssArgs bss;
  auto* bss_demo = app.add_subcommand("bss-demo", "Sine-source separation pipeline");
  bss_demo->add_option("--sources", bss.sources, "Number of sources");
  bss_demo->add_option("--samples", bss.samples, "Samples per source");
  bss_demo->add_option("--lags", bss.lags, "Lagged covariance matrices");
  bss_demo->add_option("--sigma", bss.sigma, "Noise standard deviation");
  bss.sampler.nsamps = 2000;
  bss.sampler.burnin = 1000;
  bss.sampler.add_to(bss_demo);
  add_config(bss_demo);

  CspaArgs cspa;
  auto* cspa_demo = app.add_subcommand("cspa-demo", "Two-class common spatial pattern pipeline");
  cspa_demo->add_option("--samples", cspa.samples, "Samples per class");
  cspa_demo->add_option("--out", cspa.out, "Directory for filtered.csv and variances.csv");
  cspa.sampler.nsamps = 2000;
  cspa.sampler.burnin = 1000;
  cspa.sampler.add_to(cspa_demo);
  add_config(cspa_demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) apply_config(sub, config);
    if (sub == generate) require_options(sub, {"--out"});
    if (sub == sample) require_options(sub, {"--data", "--m", "--out"});
    if (sub == diagnose) require_options(sub, {"--trace"});
    if (sub == model_select) require_options(sub, {"--data"});
    if (sub == compare) require_options(sub, {"--data", "--truth"});
    if (sub == generate) return cmd_generate(gen);
    if (sub == sample) return cmd_sample(smp);
    if (sub == diagnose) return cmd_diagnose(diag);
    if (sub == model_select) return cmd_model_select(msel);
    if (sub == compare) return cmd_compare(cmpa);
    if (sub == bingham) return cmd_bingham_bench(bench);
    if (sub == bss_demo) return cmd_bss_demo(bss);
    if (sub == cspa_demo) return cmd_cspa_demo(cspa);
  } catch (const bajd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ArgError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const bajd::RejectionLimitError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
