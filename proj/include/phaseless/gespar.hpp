#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

class SingularJacobian : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaussNewtonOptions {
  std::size_t max_iter = 100;
  double tol = 1e-10;           // on the gradient norm
  std::size_t max_halvings = 20;
  bool real_valued = false;     // optimize real parts only
};

struct GaussNewtonResult {
  Signal z;
  double objective = 0.0;
  std::vector<double> trace;  // objective after every accepted step (starting value first)
  std::size_t iterations = 0;
};

/// Minimizes sum (|<a, z>|^2 - y)^2 over z supported on `support` (classical, masked or STFT model).
GaussNewtonResult damped_gauss_newton(const MeasurementSet& y, const std::vector<std::size_t>& support,
                                      const Signal& z0, const GaussNewtonOptions& opt = {});

struct GesparOptions {
  std::size_t restarts = 100;
  std::size_t max_swaps = 0;  // 0 selects 2s
  GaussNewtonOptions inner{};
  double success_tol = 1e-8;  // objective normalized by sum y^2
  bool stop_on_success = true;
  std::size_t jobs = 1;
};

struct RestartRecord {
  double initial_objective = 0.0;
  std::vector<double> accepted;  // objective after each accepted swap
  double final_objective = 0.0;
  std::vector<std::size_t> support;
};

struct GesparReport {
  std::vector<RestartRecord> restarts;  // in restart order
  std::size_t best_restart = 0;
  double best_objective = 0.0;
  bool success = false;
};

/// Greedy support-swap search with random restarts. Restart r draws from rng.child(r).
std::pair<Signal, GesparReport> gespar(const MeasurementSet& y, std::size_t s, const GesparOptions& opt,
                                       const Rng& rng);

}  // namespace phaseless
