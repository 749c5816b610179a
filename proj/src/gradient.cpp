#include "phaseless/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless/altproj.hpp"
#include "phaseless/fft.hpp"

namespace phaseless {

MaskedOperator::MaskedOperator(const ModelDescriptor& model)
    : masks_(row_masks(model)), n_(model.n), ntilde_(model.ntilde), k_(model.k) {
  if (n_ == 0 || ntilde_ == 0 || k_ == 0) throw std::invalid_argument("MaskedOperator: empty model");
  for (const auto& m : masks_)
    if (m.size() != n_) throw std::invalid_argument("MaskedOperator: mask length != N");
}

CVec MaskedOperator::apply(std::span<const cd> z) const {
  if (z.size() != n_) throw std::invalid_argument("MaskedOperator::apply: length mismatch");
  CVec out(rows() * k_);
  CVec prod(n_);
  for (std::size_t m = 0; m < rows(); ++m) {
    for (std::size_t i = 0; i < n_; ++i) prod[i] = z[i] * masks_[m][i];
    const CVec row = oversampled_dft(prod, ntilde_, k_);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(m * k_));
  }
  return out;
}

CVec MaskedOperator::adjoint(std::span<const cd> r) const {
  if (r.size() != rows() * k_) throw std::invalid_argument("MaskedOperator::adjoint: length mismatch");
  CVec out(n_, cd{0.0, 0.0});
  CVec buf(ntilde_);
  for (std::size_t m = 0; m < rows(); ++m) {
    std::fill(buf.begin(), buf.end(), cd{0.0, 0.0});
    for (std::size_t k = 0; k < k_; ++k) buf[k % ntilde_] += r[m * k_ + k];
    fft_inplace(buf, true);  // sum_k buf[k] e^{+2 pi j k n / ntilde}
    for (std::size_t i = 0; i < n_; ++i) out[i] += std::conj(masks_[m][i]) * buf[i % ntilde_];
  }
  return out;
}

Objective::Objective(const LossSpec& spec, const MeasurementSet& y) : op_(spec.model), kind_(spec.kind), y_(y.y) {
  if (y_.size() != op_.rows() * op_.cols()) throw std::invalid_argument("Objective: measurement size mismatch");
  amp_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) amp_[i] = std::sqrt(std::max(0.0, y_[i]));
}

double Objective::data_energy() const {
  double s = 0.0;
  for (double v : y_) s += kind_ == LossKind::Intensity ? v * v : std::max(0.0, v);
  return s;
}

double Objective::value(std::span<const cd> z) const {
  const CVec w = op_.apply(z);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = kind_ == LossKind::Intensity ? std::norm(w[i]) - y_[i] : std::abs(w[i]) - amp_[i];
    s += d * d;
  }
  return s;
}

double Objective::value_and_gradient(std::span<const cd> z, CVec& grad) const {
  CVec w = op_.apply(z);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (kind_ == LossKind::Intensity) {
      const double d = std::norm(w[i]) - y_[i];
      s += d * d;
      w[i] *= 4.0 * d;
    } else {
      const double d = std::abs(w[i]) - amp_[i];
      s += d * d;
      w[i] = 2.0 * (w[i] - amp_[i] * phase_sign(w[i]));
    }
  }
  grad = op_.adjoint(w);
  return s;
}

CVec Objective::gradient(std::span<const cd> z) const {
  CVec g;
  value_and_gradient(z, g);
  return g;
}

double loss(const Signal& z, const LossSpec& spec, const MeasurementSet& y) {
  return Objective(spec, y).value(z.values());
}

Signal grad_intensity(const Signal& z, const LossSpec& spec, const MeasurementSet& y) {
  if (spec.kind != LossKind::Intensity) throw std::invalid_argument("grad_intensity: intensity loss required");
  return Signal(Objective(spec, y).gradient(z.values()));
}

Signal grad_amplitude(const Signal& z, const LossSpec& spec, const MeasurementSet& y) {
  if (spec.kind != LossKind::Amplitude) throw std::invalid_argument("grad_amplitude: amplitude loss required");
  return Signal(Objective(spec, y).gradient(z.values()));
}

std::pair<Signal, IterReport> gd_minimize(const LossSpec& spec, const MeasurementSet& y, const Signal& x0,
                                          const StepRule& rule, const DescentOptions& opt) {
  const Objective obj(spec, y);
  IterReport rep;
  CVec z(x0.vec());
  CVec g;
  double f = obj.value_and_gradient(z, g);
  double step = rule.initial;
  CVec trial(z.size());
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    rep.errors.push_back(f);
    ++rep.iterations;
    if (f < opt.tol) {
      rep.reason = HaltReason::Tolerance;
      break;
    }
    double gsq = 0.0;
    for (const auto& v : g) gsq += std::norm(v);
    if (std::sqrt(gsq) < opt.tol) {
      rep.reason = HaltReason::SmallGradient;
      break;
    }
    double mu = rule.warm_start ? std::min(rule.initial, 2.0 * step) : rule.initial;
    bool accepted = false;
    double ft = f;
    for (std::size_t h = 0; h <= rule.max_halvings; ++h) {
      for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] - mu * g[i];
      ft = obj.value(trial);
      if (ft <= f - rule.sufficient_decrease * mu * gsq) {
        accepted = true;
        break;
      }
      mu *= rule.contraction;
    }
    if (!accepted) {
      rep.reason = HaltReason::LineSearchFailed;
      break;
    }
    step = mu;
    z.swap(trial);
    f = obj.value_and_gradient(z, g);
  }
  rep.final_error = f;
  return {Signal(std::move(z)), std::move(rep)};
}

}  // namespace phaseless
