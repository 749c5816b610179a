#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phaseless/config.hpp"

namespace phaseless {

struct ExperimentConfig {
  std::string experiment;  // fig4 | fig5 | fig6 | custom
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t trials = 1;
  std::size_t n = 0;
  std::vector<std::size_t> widths;
  std::vector<std::size_t> hops;
  double success_threshold = 1e-4;
  bool periodic = true;
  std::string signal = "complex";  // complex | real

  // fig4 / fig6 refinement
  std::size_t max_iter = 1000;
  std::string gd_loss = "amplitude";  // amplitude | intensity

  // fig5
  double sdp_tol = 1e-7;
  std::size_t sdp_max_iter = 20000;
  bool known_prefix = false;

  // fig6 (right panel)
  std::size_t refine_n = 53;
  std::size_t refine_width = 19;
  std::size_t refine_hop = 1;
  std::size_t refine_trials = 20;
  std::vector<double> noise_levels;  // noise sigma relative to the rms of y
  double init_lambda = 1e-6;

  static ExperimentConfig from(const std::string& id, const KeyValueConfig& kv, bool full_scale = false);
  void validate() const;
  std::vector<std::pair<std::string, std::string>> metadata() const;
};

struct Fig4Row {
  std::size_t width;
  std::string method;
  double success_rate;
};

struct Fig5Row {
  std::size_t width;
  std::size_t hop;
  double success_rate;
  std::size_t not_converged;
};

struct Fig6Row {
  std::string parameter;
  std::string method;
  double mean_error;
};

template <class Row>
struct ExperimentResult {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Row> rows;
};

ExperimentResult<Fig4Row> run_fig4(const ExperimentConfig& cfg);
ExperimentResult<Fig5Row> run_fig5(const ExperimentConfig& cfg);
ExperimentResult<Fig6Row> run_fig6(const ExperimentConfig& cfg);

std::string to_csv(const ExperimentResult<Fig4Row>& r);
std::string to_csv(const ExperimentResult<Fig5Row>& r);
std::string to_csv(const ExperimentResult<Fig6Row>& r);

}  // namespace phaseless
