#include "phaseless/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phaseless/altproj.hpp"
#include "phaseless/ambiguity.hpp"
#include "phaseless/bench.hpp"
#include "phaseless/config.hpp"
#include "phaseless/forward.hpp"
#include "phaseless/gespar.hpp"
#include "phaseless/gradient.hpp"
#include "phaseless/io.hpp"
#include "phaseless/minphase.hpp"
#include "phaseless/sdp.hpp"
#include "phaseless/stft_direct.hpp"

namespace phaseless {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Method/model mismatch or unsupported input for the requested operation.
class DispatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out = ".";
  std::vector<std::string> overrides;
};

KeyValueConfig load_config(const CommonArgs& a) {
  KeyValueConfig kv;
  if (!a.config_file.empty()) kv = KeyValueConfig::load(a.config_file);
  for (const auto& s : a.overrides) kv.set_assignment(s);
  if (a.seed) kv.set("seed", std::to_string(*a.seed));
  if (a.jobs) kv.set("jobs", std::to_string(*a.jobs));
  return kv;
}

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--config", a.config_file, "key = value configuration file");
  app->add_option("--seed", a.seed, "random seed");
  app->add_option("--jobs", a.jobs, "worker threads");
  app->add_option("--out", a.out, "output directory");
  app->add_option("--set", a.overrides, "configuration override key=value (repeatable)");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

json signal_json(const Signal& x) { return json::parse(io::signal_to_json(x)); }

SignalDistribution distribution_from(const KeyValueConfig& kv) {
  const std::string s = kv.get_string("signal", "complex");
  if (s == "complex") return SignalDistribution::complex_normal();
  if (s == "real") return SignalDistribution::real_normal();
  if (s == "sparse") {
    const std::size_t k = kv.get_size("sparsity", 0);
    if (k == 0) throw ConfigError("signal = sparse requires sparsity >= 1");
    return SignalDistribution::sparse(k, kv.get_bool("sparse_complex", false));
  }
  throw ConfigError("unknown signal '" + s + "' (expected complex, real or sparse)");
}

WindowSpec window_from(const KeyValueConfig& kv, std::size_t n) {
  const std::size_t width = kv.get_size("width", std::min<std::size_t>(n, 4));
  const std::size_t hop = kv.get_size("hop", 1);
  if (width < 1 || width > n)
    throw ConfigError("window width " + std::to_string(width) + " must lie in [1, n=" + std::to_string(n) + "]");
  if (hop < 1) throw ConfigError("hop must be >= 1");
  const bool periodic = kv.get_bool("periodic", true);
  const std::string kind = kv.get_string("window", "rect");
  if (kind == "rect") return WindowSpec::rectangular(n, width, hop, periodic);
  if (kind == "gaussian")
    return WindowSpec::gaussian(n, kv.get_double("sigma", double(width) / 3.0), width, hop, periodic);
  throw ConfigError("unknown window '" + kind + "' (expected rect or gaussian)");
}

MaskSet masks_from(const KeyValueConfig& kv, std::size_t n) {
  const std::string kind = kv.get_string("masks", "fixed");
  if (kind == "fixed") return masks_fixed(n);
  if (kind == "block") return masks_block(n, kv.get_size("mask_param", std::max<std::size_t>(1, n / 2)));
  if (kind == "modulated") return masks_modulated(n, kv.get_size("mask_param", 1));
  throw ConfigError("unknown masks '" + kind + "' (expected fixed, block or modulated)");
}

int cmd_simulate(const CommonArgs& args) {
  const KeyValueConfig kv = load_config(args);
  const std::string model = kv.get_string("model", "classical");
  const std::uint64_t seed = kv.get_u64("seed", 1);
  const SignalDistribution dist = distribution_from(kv);
  Rng rng(seed);

  Signal x;
  MeasurementSet y;
  try {
    if (model == "2d") {
      const std::size_t r = kv.get_size("rows", 4), c = kv.get_size("cols", 4);
      if (r < 1 || c < 1) throw ConfigError("rows and cols must be >= 1");
      x = Signal(random_signal(r * c, dist, rng).vec(), Shape2D{r, c});
      y = measure_2d(x, kv.get_size("ntilde1", 2 * r - 1), kv.get_size("ntilde2", 2 * c - 1),
                     kv.get_size("k1", 2 * r - 1), kv.get_size("k2", 2 * c - 1));
    } else {
      const std::size_t n = kv.get_size("n", 8);
      if (n < 1) throw ConfigError("n must be >= 1");
      x = random_signal(n, dist, rng);
      if (kv.get_bool("minimum_phase", false)) x = augment_min_phase(x, cd{kv.get_double("delta_factor", 1.01) * x.norm1(), 0.0});
      const std::size_t full = 2 * x.size() - 1;
      if (model == "classical") {
        y = measure_classical(x, kv.get_size("ntilde", full), kv.get_size("k", full));
      } else if (model == "masked") {
        y = measure_masked(x, masks_from(kv, x.size()), kv.get_size("ntilde", full), kv.get_size("k", full));
      } else if (model == "stft") {
        y = measure_stft(x, window_from(kv, x.size()), kv.get_size("ntilde", x.size()), kv.get_size("k", x.size()));
      } else if (model == "frog") {
        const std::size_t hop = kv.get_size("hop", 1);
        if (hop < 1) throw ConfigError("hop must be >= 1");
        y = measure_frog(x, x, hop);
      } else {
        throw ConfigError("unknown model '" + model + "' (expected classical, masked, stft, frog or 2d)");
      }
    }
    const double noise = kv.get_double("noise", 0.0);
    if (noise < 0.0) throw ConfigError("noise must be nonnegative");
    if (noise > 0.0) y = add_noise(y, noise, Rng(seed).child(1).seed());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const fs::path dir(args.out);
  ensure_dir(dir);
  io::save_signal(x, dir / "signal.json");
  io::save_measurement(y, dir / "measurement");
  std::cout << "wrote " << (dir / "signal.json").string() << " and " << (dir / "measurement.{json,csv}").string() << "\n";
  return kExitOk;
}

struct RecoverArgs {
  std::string method;
  std::string input;
  std::string truth;
  std::optional<std::size_t> sparsity;
};

const std::set<ModelKind>& accepted_models(const std::string& method) {
  static const std::map<std::string, std::set<ModelKind>> table{
      {"er", {ModelKind::Classical, ModelKind::TwoD}},
      {"hio", {ModelKind::Classical, ModelKind::TwoD}},
      {"gla", {ModelKind::Stft}},
      {"gd", {ModelKind::Classical, ModelKind::Masked, ModelKind::Stft}},
      {"sdp-masked", {ModelKind::Classical, ModelKind::Masked}},
      {"sdp-stft", {ModelKind::Stft}},
      {"sdp-minphase", {ModelKind::Classical}},
      {"stft-ls", {ModelKind::Stft}},
      {"kolmogorov", {ModelKind::Classical}},
      {"gespar", {ModelKind::Classical, ModelKind::Masked, ModelKind::Stft}},
  };
  const auto it = table.find(method);
  if (it == table.end())
    throw DispatchError("unknown method '" + method +
                        "' (expected er, hio, gla, gd, sdp-masked, sdp-stft, sdp-minphase, stft-ls, kolmogorov or gespar)");
  return it->second;
}

std::vector<std::size_t> index_range(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

Signal initial_point(const KeyValueConfig& kv, const MeasurementSet& y, std::uint64_t seed) {
  const std::string init = kv.get_string("init", "random");
  const std::size_t n = y.model.n;
  Signal z;
  if (init == "random") {
    Rng rng = Rng(seed).child(0);
    z = random_signal(n, SignalDistribution::complex_normal(), rng);
  } else if (init == "zero") {
    z = Signal::zeros(n);
  } else if (init == "stft") {
    if (y.model.kind != ModelKind::Stft) throw DispatchError("init = stft requires STFT measurements");
    z = stft_init_heuristic(y, *y.model.window, kv.get_double("lambda", 1e-6));
  } else {
    throw ConfigError("unknown init '" + init + "' (expected random, zero or stft)");
  }
  if (y.model.kind == ModelKind::TwoD) return Signal(z.vec(), y.model.signal_shape);
  return z;
}

void record_iter(json& rep, const IterReport& r, const fs::path& dir) {
  rep["iterations"] = r.iterations;
  rep["halt_reason"] = to_string(r.reason);
  rep["final_objective"] = r.final_error;
  io::write_file(dir / "trace.csv", r.to_csv());
}

void record_sdp(json& rep, const SdpReport& r, const fs::path& dir, bool trace) {
  rep["iterations"] = r.iterations;
  rep["primal_residual"] = r.primal_residual;
  rep["dual_residual"] = r.dual_residual;
  rep["sdp_objective"] = r.objective;
  std::vector<double> spec(r.spectrum.data(), r.spectrum.data() + r.spectrum.size());
  rep["spectrum"] = spec;
  if (trace) io::write_file(dir / "sdp_trace.csv", r.trace_csv());
}

AdmmOptions admm_from(const KeyValueConfig& kv) {
  AdmmOptions o;
  o.rho = kv.get_double("rho", o.rho);
  o.tol = kv.get_double("sdp_tol", o.tol);
  o.max_iter = kv.get_size("sdp_max_iter", o.max_iter);
  o.adaptive_rho = kv.get_bool("adaptive_rho", o.adaptive_rho);
  o.record_trace = kv.get_bool("record_trace", false);
  return o;
}

int cmd_recover(const CommonArgs& args, const RecoverArgs& ra) {
  const KeyValueConfig kv = load_config(args);
  const std::uint64_t seed = kv.get_u64("seed", 1);
  const auto& models = accepted_models(ra.method);
  if (ra.input.empty()) throw ConfigError("recover requires --input");
  const MeasurementSet y = io::load_measurement(ra.input);
  std::optional<Signal> truth;
  if (!ra.truth.empty()) truth = io::load_signal(ra.truth);
  if (!models.count(y.model.kind))
    throw DispatchError("method '" + ra.method + "' does not accept " + to_string(y.model.kind) + " measurements");
  if (truth && truth->size() != y.model.n) throw DispatchError("ground truth length does not match the measurements");

  const fs::path dir(args.out);
  ensure_dir(dir);
  json rep;
  rep["method"] = ra.method;
  rep["model"] = to_string(y.model.kind);
  rep["n"] = y.model.n;
  rep["seed"] = seed;

  AltProjOptions aopt;
  aopt.max_iter = kv.get_size("max_iter", aopt.max_iter);
  aopt.tol = kv.get_double("tol", aopt.tol);
  const auto t0 = std::chrono::steady_clock::now();
  Signal z;
  std::optional<std::string> failure;
  int code = kExitOk;

  try {
    const std::string& m = ra.method;
    if (m == "er" || m == "hio") {
      const auto support = kv.get_sizes("support", index_range(y.model.n));
      const bool nonneg = kv.get_bool("nonnegative", false);
      const Signal x0 = initial_point(kv, y, seed);
      std::pair<Signal, IterReport> r;
      if (m == "er")
        r = error_reduction(y, nonneg ? TemporalConstraint::support_nonnegative(support) : TemporalConstraint::support(support),
                            x0, aopt);
      else
        r = hio(y, support, nonneg, kv.get_double("beta", 0.9), x0, aopt);
      z = r.first;
      record_iter(rep, r.second, dir);
    } else if (m == "gla") {
      auto r = griffin_lim(y, *y.model.window, initial_point(kv, y, seed), aopt);
      z = r.first;
      record_iter(rep, r.second, dir);
    } else if (m == "gd") {
      const std::string loss_name = kv.get_string("loss", "intensity");
      LossKind kind;
      if (loss_name == "intensity") kind = LossKind::Intensity;
      else if (loss_name == "amplitude") kind = LossKind::Amplitude;
      else throw ConfigError("unknown loss '" + loss_name + "' (expected intensity or amplitude)");
      DescentOptions dopt;
      dopt.max_iter = aopt.max_iter;
      dopt.tol = kv.get_double("tol", dopt.tol);
      auto r = gd_minimize({kind, y.model}, y, initial_point(kv, y, seed), {}, dopt);
      z = r.first;
      record_iter(rep, r.second, dir);
    } else if (m == "sdp-masked" || m == "sdp-stft" || m == "sdp-minphase") {
      SdpProblem p;
      if (m == "sdp-masked") {
        p = build_trace_from_model(y, kv.get_double("eps", 0.0));
      } else if (m == "sdp-stft") {
        std::optional<CVec> prefix;
        const std::size_t known = kv.get_size("known_prefix", 0);
        if (known > 0) {
          if (!truth) throw ConfigError("known_prefix requires --truth");
          prefix = CVec(truth->vec().begin(), truth->vec().begin() + static_cast<std::ptrdiff_t>(known));
        }
        p = build_stft_sdp(y, *y.model.window, prefix);
      } else {
        p = build_minphase(autocorr_from_measurements(y).coeffs);
      }
      const AdmmOptions o = admm_from(kv);
      HermitianMatrix sol;
      try {
        auto r = admm_solve(p, o);
        sol = r.first;
        record_sdp(rep, r.second, dir, o.record_trace);
      } catch (const NotConverged& e) {
        sol = e.last_iterate();
        record_sdp(rep, e.report(), dir, o.record_trace);
        failure = e.what();
        code = kExitSolver;
      }
      auto [est, quality] = extract_rank_one(sol);
      z = est;
      rep["rank_one_quality"] = quality;
    } else if (m == "stft-ls") {
      z = stft_ls_recover(y, *y.model.window);
    } else if (m == "kolmogorov") {
      CepstralConfig c;
      c.grid_factor = kv.get_size("grid_factor", c.grid_factor);
      z = kolmogorov_recover(y, c);
    } else if (m == "gespar") {
      const std::size_t s = ra.sparsity ? *ra.sparsity : kv.get_size("sparsity", 0);
      if (s == 0) throw ConfigError("gespar requires --sparsity (or sparsity = s in the config)");
      GesparOptions g;
      g.restarts = kv.get_size("restarts", g.restarts);
      g.max_swaps = kv.get_size("max_swaps", g.max_swaps);
      g.jobs = kv.get_size("jobs", 1);
      g.inner.real_valued = kv.get_bool("real_valued", false);
      auto [est, r] = gespar(y, s, g, Rng(seed));
      z = est;
      rep["restarts_run"] = r.restarts.size();
      rep["best_restart"] = r.best_restart;
      rep["final_objective"] = r.best_objective;
      rep["success"] = r.success;
      if (!r.success) {
        failure = "gespar: no restart reached the success tolerance";
        code = kExitSolver;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const NotAdmissible& e) {
    throw DispatchError(e.what());
  } catch (const DeltaTooSmall& e) {
    throw DispatchError(e.what());
  } catch (const NotHermitian& e) {
    throw DispatchError(e.what());
  } catch (const std::invalid_argument& e) {
    throw DispatchError(e.what());
  } catch (const std::runtime_error& e) {
    // DivisionByZero, IllConditioned, EmptyP, SingularJacobian, PairingFailed.
    failure = e.what();
    code = kExitSolver;
  }

  rep["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep["status"] = code == kExitOk ? "ok" : "solver_error";
  if (failure) rep["error"] = *failure;
  if (z.size() == y.model.n) {
    if (y.model.kind == ModelKind::TwoD && !z.is_2d()) z = Signal(z.vec(), y.model.signal_shape);
    io::save_signal(z, dir / "recovered.json");
    if (y.model.kind != ModelKind::TwoD)
      rep["measurement_residual"] = Objective({LossKind::Intensity, y.model}, y).value(z.values());
    if (truth && !truth->is_2d()) {
      const bool trivial = y.model.kind == ModelKind::Classical;
      const TrivialGroup g = trivial ? TrivialGroup::full() : TrivialGroup::rotation_only();
      rep["distance_group"] = trivial ? "rotation+reflection+shift" : "rotation";
      rep["dist_up_to"] = dist_up_to(*truth, z, g);
      rep["relative_error"] = relative_error(*truth, z, g);
    }
  }
  io::write_file(dir / "report.json", rep.dump(2) + "\n");
  if (failure) std::cerr << "solver error: " << *failure << "\n";
  std::cout << "wrote " << (dir / "report.json").string() << "\n";
  return code;
}

int cmd_ambiguities(const CommonArgs& args, const std::string& input, std::optional<double> tol) {
  const KeyValueConfig kv = load_config(args);
  if (input.empty()) throw ConfigError("ambiguities requires --input");
  if (!tol && kv.has("pair_tol")) tol = kv.get_double("pair_tol", 0.0);
  const MeasurementSet y = io::load_measurement(input);
  if (y.model.kind != ModelKind::Classical || y.model.ntilde != 2 * y.model.n - 1 || y.model.k != y.model.ntilde)
    throw DispatchError("ambiguities requires classical measurements with ntilde = K = 2N-1");
  SolutionSet set;
  try {
    set = enumerate_solutions(autocorr_from_measurements(y), tol);
  } catch (const PairingFailed& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  json j;
  j["count"] = set.members.size();
  j["expected_count"] = count_nontrivial(set.pairing);
  j["off_circle_pairs"] = set.pairing.off_circle_pairs();
  json pairs = json::array();
  for (const auto& p : set.pairing.pairs)
    pairs.push_back({{"root", {p.root.real(), p.root.imag()}},
                     {"reflected", {p.reflected().real(), p.reflected().imag()}},
                     {"multiplicity", p.multiplicity},
                     {"unimodular", p.unimodular}});
  j["pairing"] = {{"leading", {set.pairing.leading.real(), set.pairing.leading.imag()}}, {"pairs", pairs}};
  json sols = json::array();
  for (std::size_t i = 0; i < set.members.size(); ++i) {
    json s = signal_json(set.members[i]);
    s["provenance"] = set.provenance[i];
    sols.push_back(s);
  }
  j["solutions"] = sols;
  const fs::path dir(args.out);
  ensure_dir(dir);
  io::write_file(dir / "solutions.json", j.dump(2) + "\n");
  std::cout << set.members.size() << " solutions written to " << (dir / "solutions.json").string() << "\n";
  return kExitOk;
}

int cmd_bench(const CommonArgs& args, const std::string& experiment, bool full_scale) {
  const KeyValueConfig kv = load_config(args);
  const ExperimentConfig cfg = ExperimentConfig::from(experiment, kv, full_scale);
  const fs::path dir(args.out);
  ensure_dir(dir);
  const auto t0 = std::chrono::steady_clock::now();
  std::string csv;
  if (experiment == "fig4") csv = to_csv(run_fig4(cfg));
  else if (experiment == "fig5") csv = to_csv(run_fig5(cfg));
  else if (experiment == "fig6") csv = to_csv(run_fig6(cfg));
  else throw DispatchError("bench supports fig4, fig5 and fig6");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_file(dir / (experiment + ".csv"), csv);
  json rep;
  for (const auto& [k, v] : cfg.metadata()) rep[k] = v;
  rep["jobs"] = cfg.jobs;
  rep["runtime_seconds"] = secs;
  io::write_file(dir / (experiment + ".json"), rep.dump(2) + "\n");
  std::cout << "wrote " << (dir / (experiment + ".csv")).string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Phase retrieval toolkit: simulate, recover, enumerate ambiguities, run experiments", "phaseless"};
  app.require_subcommand(1);

  CommonArgs common;
  auto* sim = app.add_subcommand("simulate", "simulate a signal and its phaseless measurements");
  add_common(sim, common);

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "recover a signal from measurements");
  add_common(rec, common);
  rec->add_option("--method", ra.method, "er|hio|gla|gd|sdp-masked|sdp-stft|sdp-minphase|stft-ls|kolmogorov|gespar")
      ->required();
  rec->add_option("--input", ra.input, "measurement file (.json descriptor or .csv matrix)")->required();
  rec->add_option("--truth", ra.truth, "ground-truth signal for error reporting");
  rec->add_option("--sparsity", ra.sparsity, "sparsity level for gespar");

  std::string amb_input;
  std::optional<double> amb_tol;
  auto* amb = app.add_subcommand("ambiguities", "enumerate all signals consistent with classical measurements");
  add_common(amb, common);
  amb->add_option("--input", amb_input, "classical measurement file")->required();
  amb->add_option("--tol", amb_tol, "root pairing tolerance");

  std::string experiment;
  bool full_scale = false;
  auto* bench = app.add_subcommand("bench", "run a benchmark experiment");
  add_common(bench, common);
  bench->add_option("experiment", experiment, "fig4|fig5|fig6")->required()->check(CLI::IsMember({"fig4", "fig5", "fig6"}));
  bench->add_flag("--full-scale", full_scale, "use the original (slow) problem sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(common);
    if (rec->parsed()) return cmd_recover(common, ra);
    if (amb->parsed()) return cmd_ambiguities(common, amb_input, amb_tol);
    return cmd_bench(common, experiment, full_scale);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DispatchError& e) {
    std::cerr << "dispatch error: " << e.what() << "\n";
    return kExitDispatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace phaseless
