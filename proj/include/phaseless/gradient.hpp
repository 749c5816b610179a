#pragma once

#include <utility>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/report.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

/// w[m, k] = sum_n z[n] mask_m[n] e^{-2 pi j k n / ntilde} for classical, masked and STFT models.
class MaskedOperator {
 public:
  explicit MaskedOperator(const ModelDescriptor& model);

  std::size_t rows() const { return masks_.size(); }
  std::size_t cols() const { return k_; }
  std::size_t length() const { return n_; }

  CVec apply(std::span<const cd> z) const;
  // Adjoint: r (rows x cols, row-major) -> length-N vector.
  CVec adjoint(std::span<const cd> r) const;

 private:
  std::vector<CVec> masks_;
  std::size_t n_ = 0, ntilde_ = 0, k_ = 0;
};

enum class LossKind { Intensity, Amplitude };

struct LossSpec {
  LossKind kind = LossKind::Intensity;
  ModelDescriptor model;
};

/// Loss evaluator with the operator and sqrt(y) precomputed once.
class Objective {
 public:
  Objective(const LossSpec& spec, const MeasurementSet& y);

  double value(std::span<const cd> z) const;
  // Real gradient packed as d/du + j d/dv (twice the conjugate Wirtinger derivative).
  CVec gradient(std::span<const cd> z) const;
  // value and gradient from one forward pass.
  double value_and_gradient(std::span<const cd> z, CVec& grad) const;

  const MaskedOperator& op() const { return op_; }
  LossKind kind() const { return kind_; }
  double data_energy() const;  // sum y^2 (intensity) or sum y (amplitude): the loss at z = 0

 private:
  MaskedOperator op_;
  LossKind kind_;
  std::vector<double> y_;
  std::vector<double> amp_;
};

double loss(const Signal& z, const LossSpec& spec, const MeasurementSet& y);
Signal grad_intensity(const Signal& z, const LossSpec& spec, const MeasurementSet& y);
Signal grad_amplitude(const Signal& z, const LossSpec& spec, const MeasurementSet& y);

struct StepRule {
  double initial = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  std::size_t max_halvings = 30;
  bool warm_start = true;  // begin each line search at min(initial, 2 * last step)
};

struct DescentOptions {
  std::size_t max_iter = 1000;
  double tol = 1e-10;  // on the loss and on the gradient norm
};

/// Armijo backtracking descent.
std::pair<Signal, IterReport> gd_minimize(const LossSpec& spec, const MeasurementSet& y, const Signal& x0,
                                          const StepRule& rule = {}, const DescentOptions& opt = {});

}  // namespace phaseless
