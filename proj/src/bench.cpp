#include "phaseless/bench.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <cstdio>
#include <sstream>

#include "phaseless/altproj.hpp"
#include "phaseless/forward.hpp"
#include "phaseless/gradient.hpp"
#include "phaseless/io.hpp"
#include "phaseless/parallel.hpp"
#include "phaseless/sdp.hpp"
#include "phaseless/stft_direct.hpp"

namespace phaseless {
namespace {

SignalDistribution distribution(const std::string& name) {
  if (name == "complex") return SignalDistribution::complex_normal();
  if (name == "real") return SignalDistribution::real_normal();
  throw ConfigError("unknown signal distribution '" + name + "' (expected complex or real)");
}

LossKind loss_kind(const std::string& name) {
  if (name == "amplitude") return LossKind::Amplitude;
  if (name == "intensity") return LossKind::Intensity;
  throw ConfigError("unknown gd_loss '" + name + "' (expected amplitude or intensity)");
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + io::format_double(v[i]);
  return s;
}

std::string header(const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

// Normalized intensity objective sum (y - |Az|^2)^2 / sum y^2.
double normalized_objective(const Objective& intensity, const Signal& z) {
  const double e = intensity.data_energy();
  return e > 0.0 ? intensity.value(z.values()) / e : intensity.value(z.values());
}

MeasurementSet noisy(const MeasurementSet& y, double level, std::uint64_t seed) {
  if (level == 0.0) return y;
  double ms = 0.0;
  for (double v : y.y) ms += v * v;
  const double rms = std::sqrt(ms / double(y.y.size()));
  return add_noise(y, level * rms, seed);
}

}  // namespace

ExperimentConfig ExperimentConfig::from(const std::string& id, const KeyValueConfig& kv, bool full_scale) {
  ExperimentConfig c;
  c.experiment = id;
  if (id == "fig4") {
    c.n = 23;
    c.widths = {8, 12, 16, 20};
    c.hops = {1};
    c.trials = 100;
    c.signal = "real";
  } else if (id == "fig5") {
    c.n = full_scale ? 40 : 20;
    c.widths = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.hops = {1, 2, 3, 4};
    c.trials = full_scale ? 100 : 20;
    c.signal = "complex";
  } else if (id == "fig6") {
    c.n = 101;
    c.widths = {9, 15, 21, 27, 33};
    c.hops = {1, 2, 3, 4, 5};
    c.trials = 50;
    c.signal = "complex";
    c.noise_levels = {0.0, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  } else if (id != "custom") {
    throw ConfigError("unknown experiment '" + id + "' (expected fig4, fig5, fig6 or custom)");
  }
  c.seed = kv.get_u64("seed", c.seed);
  c.jobs = kv.get_size("jobs", c.jobs);
  c.trials = kv.get_size("trials", c.trials);
  c.n = kv.get_size("n", c.n);
  c.widths = kv.get_sizes("widths", c.widths);
  c.hops = kv.get_sizes("hops", c.hops);
  c.success_threshold = kv.get_double("success_threshold", c.success_threshold);
  c.periodic = kv.get_bool("periodic", c.periodic);
  c.signal = kv.get_string("signal", c.signal);
  c.max_iter = kv.get_size("max_iter", c.max_iter);
  c.gd_loss = kv.get_string("gd_loss", c.gd_loss);
  c.sdp_tol = kv.get_double("sdp_tol", c.sdp_tol);
  c.sdp_max_iter = kv.get_size("sdp_max_iter", c.sdp_max_iter);
  c.known_prefix = kv.get_bool("known_prefix", c.known_prefix);
  c.refine_n = kv.get_size("refine_n", c.refine_n);
  c.refine_width = kv.get_size("refine_width", c.refine_width);
  c.refine_hop = kv.get_size("refine_hop", c.refine_hop);
  c.refine_trials = kv.get_size("refine_trials", c.refine_trials);
  c.noise_levels = kv.get_doubles("noise_levels", c.noise_levels);
  c.init_lambda = kv.get_double("init_lambda", c.init_lambda);
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n < 2) throw ConfigError("n must be >= 2");
  if (widths.empty() || hops.empty()) throw ConfigError("widths and hops must be non-empty");
  for (auto w : widths)
    if (w < 1 || w > n) throw ConfigError("window width " + std::to_string(w) + " outside [1, n]");
  for (auto h : hops)
    if (h < 1) throw ConfigError("hop must be >= 1");
  if (!(success_threshold > 0.0)) throw ConfigError("success_threshold must be positive");
  distribution(signal);
  loss_kind(gd_loss);
  if (experiment == "fig6") {
    if (refine_width < 1 || refine_width > refine_n || refine_hop < 1 || refine_trials < 1)
      throw ConfigError("invalid refinement settings");
    if (noise_levels.empty()) throw ConfigError("noise_levels must be non-empty");
    for (double v : noise_levels)
      if (!(v >= 0.0)) throw ConfigError("noise levels must be nonnegative");
    for (auto w : widths)
      if (w < 3) throw ConfigError("fig6 widths must be >= 3 (sigma = W/3)");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::metadata() const {
  std::vector<std::pair<std::string, std::string>> m{
      {"experiment", experiment},
      {"seed", std::to_string(seed)},
      {"trials", std::to_string(trials)},
      {"n", std::to_string(n)},
      {"widths", join(widths)},
      {"hops", join(hops)},
      {"success_threshold", io::format_double(success_threshold)},
      {"periodic", periodic ? "true" : "false"},
      {"signal", signal},
  };
  if (experiment == "fig4" || experiment == "fig6") {
    m.emplace_back("max_iter", std::to_string(max_iter));
    m.emplace_back("gd_loss", gd_loss);
  }
  if (experiment == "fig4") m.emplace_back("objective", "sum(y-|Az|^2)^2/sum(y^2)");
  if (experiment == "fig5") {
    m.emplace_back("sdp_tol", io::format_double(sdp_tol));
    m.emplace_back("sdp_max_iter", std::to_string(sdp_max_iter));
    m.emplace_back("known_prefix", known_prefix ? "true" : "false");
    m.emplace_back("error", "relative distance up to global phase");
  }
  if (experiment == "fig6") {
    m.emplace_back("refine_n", std::to_string(refine_n));
    m.emplace_back("refine_width", std::to_string(refine_width));
    m.emplace_back("refine_hop", std::to_string(refine_hop));
    m.emplace_back("refine_trials", std::to_string(refine_trials));
    m.emplace_back("noise_levels", join(noise_levels));
    m.emplace_back("init_lambda", io::format_double(init_lambda));
    m.emplace_back("error", "relative distance up to global phase");
  }
  return m;
}

ExperimentResult<Fig4Row> run_fig4(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dist = distribution(cfg.signal);
  const LossKind gd_kind = loss_kind(cfg.gd_loss);
  const Rng root(cfg.seed);
  const std::size_t cells = cfg.widths.size() * cfg.hops.size();
  std::vector<std::array<bool, 2>> ok(cells * cfg.trials);

  parallel_for(ok.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t cell = task / cfg.trials;
    const std::size_t width = cfg.widths[cell / cfg.hops.size()];
    const std::size_t hop = cfg.hops[cell % cfg.hops.size()];
    Rng rng = root.child(task);
    const Signal x = random_signal(cfg.n, dist, rng);
    const Signal x0 = random_signal(cfg.n, dist, rng);
    const WindowSpec w = WindowSpec::rectangular(cfg.n, width, hop, cfg.periodic);
    const MeasurementSet y = measure_stft(x, w);
    const Objective intensity(LossSpec{LossKind::Intensity, y.model}, y);

    const LossSpec gd_spec{gd_kind, y.model};
    DescentOptions dopt;
    dopt.max_iter = cfg.max_iter;
    dopt.tol = 1e-14 * Objective(gd_spec, y).data_energy();
    const Signal zg = gd_minimize(gd_spec, y, x0, {}, dopt).first;

    AltProjOptions aopt;
    aopt.max_iter = cfg.max_iter;
    const Signal zl = griffin_lim(y, w, x0, aopt).first;

    ok[task] = {normalized_objective(intensity, zg) < cfg.success_threshold,
                normalized_objective(intensity, zl) < cfg.success_threshold};
  });

  ExperimentResult<Fig4Row> res;
  res.metadata = cfg.metadata();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t gd = 0, gla = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      gd += ok[cell * cfg.trials + t][0];
      gla += ok[cell * cfg.trials + t][1];
    }
    const std::size_t width = cfg.widths[cell / cfg.hops.size()];
    res.rows.push_back({width, "GD", double(gd) / double(cfg.trials)});
    res.rows.push_back({width, "GLA", double(gla) / double(cfg.trials)});
  }
  return res;
}

ExperimentResult<Fig5Row> run_fig5(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dist = distribution(cfg.signal);
  const Rng root(cfg.seed);
  const std::size_t cells = cfg.widths.size() * cfg.hops.size();
  struct Outcome {
    bool success = false;
    bool converged = true;
  };
  std::vector<Outcome> out(cells * cfg.trials);

  parallel_for(out.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t cell = task / cfg.trials;
    const std::size_t width = cfg.widths[cell / cfg.hops.size()];
    const std::size_t hop = cfg.hops[cell % cfg.hops.size()];
    Rng rng = root.child(task);
    const Signal x = random_signal(cfg.n, dist, rng);
    const WindowSpec w = WindowSpec::rectangular(cfg.n, width, hop, cfg.periodic);
    const MeasurementSet y = measure_stft(x, w);
    std::optional<CVec> prefix;
    if (cfg.known_prefix && hop > 1) prefix = CVec(x.vec().begin(), x.vec().begin() + static_cast<std::ptrdiff_t>(hop / 2 + 1));
    const SdpProblem p = build_stft_sdp(y, w, prefix);
    AdmmOptions aopt;
    aopt.tol = cfg.sdp_tol;
    aopt.max_iter = cfg.sdp_max_iter;
    HermitianMatrix sol;
    Outcome o;
    try {
      sol = admm_solve(p, aopt).first;
    } catch (const NotConverged& e) {
      sol = e.last_iterate();
      o.converged = false;
    }
    const Signal est = extract_rank_one(sol).first;
    o.success = relative_error(x, est, TrivialGroup::rotation_only()) < cfg.success_threshold;
    out[task] = o;
  });

  ExperimentResult<Fig5Row> res;
  res.metadata = cfg.metadata();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t s = 0, nc = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      s += out[cell * cfg.trials + t].success;
      nc += !out[cell * cfg.trials + t].converged;
    }
    res.rows.push_back({cfg.widths[cell / cfg.hops.size()], cfg.hops[cell % cfg.hops.size()],
                        double(s) / double(cfg.trials), nc});
  }
  return res;
}

ExperimentResult<Fig6Row> run_fig6(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dist = distribution(cfg.signal);
  const Rng root(cfg.seed);
  ExperimentResult<Fig6Row> res;
  res.metadata = cfg.metadata();

  // Initialization error against (W, L) with a Gaussian window of length W = 3 sigma.
  const std::size_t cells = cfg.widths.size() * cfg.hops.size();
  std::vector<double> init_err(cells * cfg.trials);
  const Rng left = root.child(0);
  parallel_for(init_err.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t cell = task / cfg.trials;
    const std::size_t width = cfg.widths[cell / cfg.hops.size()];
    const std::size_t hop = cfg.hops[cell % cfg.hops.size()];
    Rng rng = left.child(task);
    const Signal x = random_signal(cfg.n, dist, rng);
    const WindowSpec w = WindowSpec::gaussian(cfg.n, double(width) / 3.0, width, hop, true);
    const MeasurementSet y = measure_stft(x, w);
    try {
      init_err[task] = relative_error(x, stft_init_heuristic(y, w, cfg.init_lambda), TrivialGroup::rotation_only());
    } catch (const EmptyP&) {
      init_err[task] = 1.0;
    }
  });
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double s = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) s += init_err[cell * cfg.trials + t];
    res.rows.push_back({"W=" + std::to_string(cfg.widths[cell / cfg.hops.size()]) +
                            ";L=" + std::to_string(cfg.hops[cell % cfg.hops.size()]),
                        "init", s / double(cfg.trials)});
  }

  // Refinement from the initializer under noise.
  const LossKind gd_kind = loss_kind(cfg.gd_loss);
  const std::size_t levels = cfg.noise_levels.size();
  std::vector<std::array<double, 3>> err(levels * cfg.refine_trials);
  const Rng right = root.child(1);
  parallel_for(err.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t level = task / cfg.refine_trials;
    Rng rng = right.child(task);
    const Signal x = random_signal(cfg.refine_n, dist, rng);
    const WindowSpec w = WindowSpec::rectangular(cfg.refine_n, cfg.refine_width, cfg.refine_hop, true);
    const MeasurementSet y = noisy(measure_stft(x, w), cfg.noise_levels[level], rng.child(7).seed());
    Signal init = Signal::zeros(cfg.refine_n);
    try {
      init = stft_init_heuristic(y, w, cfg.init_lambda);
    } catch (const EmptyP&) {
    }
    DescentOptions dopt;
    dopt.max_iter = cfg.max_iter;
    const LossSpec gd_spec{gd_kind, y.model};
    dopt.tol = 1e-16 * Objective(gd_spec, y).data_energy();
    const Signal zg = gd_minimize(gd_spec, y, init, {}, dopt).first;
    AltProjOptions aopt;
    aopt.max_iter = cfg.max_iter;
    aopt.tol = 0.0;
    const Signal zl = griffin_lim(y, w, init, aopt).first;
    const auto g = TrivialGroup::rotation_only();
    err[task] = {relative_error(x, init, g), relative_error(x, zg, g), relative_error(x, zl, g)};
  });
  const char* names[3] = {"init", "GD", "GLA"};
  for (std::size_t level = 0; level < levels; ++level)
    for (std::size_t m = 0; m < 3; ++m) {
      double s = 0.0;
      for (std::size_t t = 0; t < cfg.refine_trials; ++t) s += err[level * cfg.refine_trials + t][m];
      res.rows.push_back({"noise=" + io::format_double(cfg.noise_levels[level]), names[m], s / double(cfg.refine_trials)});
    }
  return res;
}

std::string to_csv(const ExperimentResult<Fig4Row>& r) {
  std::string out = header(r.metadata) + "W,method,success_rate\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.width) + "," + row.method + "," + io::format_double(row.success_rate) + "\n";
  return out;
}

std::string to_csv(const ExperimentResult<Fig5Row>& r) {
  std::string out = header(r.metadata) + "W,L,success_rate,not_converged\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.width) + "," + std::to_string(row.hop) + "," + io::format_double(row.success_rate) + "," +
           std::to_string(row.not_converged) + "\n";
  return out;
}

std::string to_csv(const ExperimentResult<Fig6Row>& r) {
  std::string out = header(r.metadata) + "parameter,method,mean_error\n";
  for (const auto& row : r.rows) out += row.parameter + "," + row.method + "," + io::format_double(row.mean_error) + "\n";
  return out;
}

}  // namespace phaseless
