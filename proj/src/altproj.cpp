#include "phaseless/altproj.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless/fft.hpp"

namespace phaseless {
namespace {

// Zero-padded Fourier domain shared by the classical and 2D models.
struct Grid {
  std::size_t rows = 1, cols = 0;   // padded transform shape
  std::size_t srows = 1, scols = 0; // signal shape
  bool two_d = false;

  std::size_t padded_size() const { return rows * cols; }
  std::size_t signal_size() const { return srows * scols; }
  std::size_t padded_index(std::size_t flat) const { return (flat / scols) * cols + flat % scols; }

  void forward(CVec& v) const {
    if (two_d) fft2_inplace(v, rows, cols, false);
    else fft_inplace(v, false);
  }
  void inverse(CVec& v) const {
    if (two_d) fft2_inplace(v, rows, cols, true);
    else fft_inplace(v, true);
    const double s = 1.0 / double(v.size());
    for (auto& e : v) e *= s;
  }
  CVec pad(const Signal& x) const {
    CVec v(padded_size(), cd{0.0, 0.0});
    for (std::size_t i = 0; i < signal_size(); ++i) v[padded_index(i)] = x[i];
    return v;
  }
  CVec crop(const CVec& v) const {
    CVec out(signal_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[padded_index(i)];
    return out;
  }
  Signal to_signal(CVec v) const {
    return two_d ? Signal(std::move(v), Shape2D{srows, scols}) : Signal(std::move(v));
  }
};

Grid make_grid(const MeasurementSet& y, const Signal& x0) {
  Grid g;
  const auto& m = y.model;
  if (m.kind == ModelKind::Classical) {
    if (x0.is_2d()) throw std::invalid_argument("alternating projections: 1D model with a 2D initial signal");
    if (m.k != m.ntilde || m.ntilde < m.n)
      throw std::invalid_argument("alternating projections: requires K = ntilde >= N");
    g.cols = m.ntilde;
    g.scols = m.n;
  } else if (m.kind == ModelKind::TwoD) {
    if (!x0.is_2d() || *x0.shape() != m.signal_shape)
      throw std::invalid_argument("alternating projections: initial signal shape differs from the model");
    if (m.k1 != m.ntilde1 || m.k2 != m.ntilde2 || m.ntilde1 < m.signal_shape.rows || m.ntilde2 < m.signal_shape.cols)
      throw std::invalid_argument("alternating projections: requires K_i = ntilde_i >= N_i");
    g.two_d = true;
    g.rows = m.ntilde1;
    g.cols = m.ntilde2;
    g.srows = m.signal_shape.rows;
    g.scols = m.signal_shape.cols;
  } else {
    throw std::invalid_argument("alternating projections: classical or 2D model required, got " + to_string(m.kind));
  }
  if (x0.size() != g.signal_size()) throw std::invalid_argument("alternating projections: initial signal length mismatch");
  if (y.y.size() != g.padded_size()) throw std::invalid_argument("alternating projections: measurement size mismatch");
  return g;
}

std::vector<double> amplitudes(const MeasurementSet& y) {
  std::vector<double> a(y.y.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sqrt(std::max(0.0, y.y[i]));
  return a;
}

// Transforms `spec` in place, returns sum (|X| - sqrt y)^2 and replaces the modulus.
double replace_modulus(CVec& spec, const std::vector<double>& amp) {
  double e = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double d = std::abs(spec[i]) - amp[i];
    e += d * d;
    spec[i] = amp[i] * phase_sign(spec[i]);
  }
  return e;
}

double spectral_error(const Grid& g, const CVec& padded, const std::vector<double>& amp) {
  CVec spec = padded;
  g.forward(spec);
  double e = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double d = std::abs(spec[i]) - amp[i];
    e += d * d;
  }
  return e;
}

double rel_change(const CVec& a, const CVec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<bool> support_mask(const Grid& g, const std::vector<std::size_t>& support) {
  std::vector<bool> in(g.padded_size(), false);
  for (auto i : support) in[g.padded_index(i)] = true;
  return in;
}

}  // namespace

TemporalConstraint TemporalConstraint::known_magnitudes(std::vector<double> mags) {
  TemporalConstraint c;
  c.kind = ConstraintKind::KnownMagnitudes;
  c.magnitudes = std::move(mags);
  return c;
}

TemporalConstraint TemporalConstraint::support(std::vector<std::size_t> s) {
  TemporalConstraint c;
  c.kind = ConstraintKind::Support;
  c.indices = std::move(s);
  return c;
}

TemporalConstraint TemporalConstraint::support_nonnegative(std::vector<std::size_t> s) {
  TemporalConstraint c = support(std::move(s));
  c.kind = ConstraintKind::SupportNonnegative;
  return c;
}

TemporalConstraint TemporalConstraint::known_entries(std::vector<std::size_t> idx, CVec vals) {
  TemporalConstraint c;
  c.kind = ConstraintKind::KnownEntries;
  c.indices = std::move(idx);
  c.values = std::move(vals);
  return c;
}

TemporalConstraint TemporalConstraint::full_support(std::size_t n) {
  std::vector<std::size_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i;
  return support(std::move(s));
}

void TemporalConstraint::validate(std::size_t n) const {
  switch (kind) {
    case ConstraintKind::KnownMagnitudes:
      if (magnitudes.size() != n) throw std::invalid_argument("TemporalConstraint: magnitude count != N");
      for (double m : magnitudes)
        if (!(m >= 0.0)) throw std::invalid_argument("TemporalConstraint: magnitudes must be nonnegative");
      return;
    case ConstraintKind::Support:
    case ConstraintKind::SupportNonnegative:
      if (indices.empty()) throw std::invalid_argument("TemporalConstraint: empty support");
      break;
    case ConstraintKind::KnownEntries:
      if (indices.size() != values.size()) throw std::invalid_argument("TemporalConstraint: index/value count mismatch");
      break;
  }
  for (auto i : indices)
    if (i >= n) throw std::invalid_argument("TemporalConstraint: index out of range");
}

void TemporalConstraint::project(std::span<cd> x) const {
  switch (kind) {
    case ConstraintKind::KnownMagnitudes:
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = magnitudes[i] * phase_sign(x[i]);
      return;
    case ConstraintKind::Support:
    case ConstraintKind::SupportNonnegative: {
      std::vector<bool> in(x.size(), false);
      for (auto i : indices) in[i] = true;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!in[i]) x[i] = 0.0;
        else if (kind == ConstraintKind::SupportNonnegative) x[i] = std::max(x[i].real(), 0.0);
      }
      return;
    }
    case ConstraintKind::KnownEntries:
      for (std::size_t j = 0; j < indices.size(); ++j) x[indices[j]] = values[j];
      return;
  }
}

std::pair<Signal, IterReport> error_reduction(const MeasurementSet& y, const TemporalConstraint& c,
                                              const Signal& x0, const AltProjOptions& opt) {
  const Grid g = make_grid(y, x0);
  c.validate(g.signal_size());
  const auto amp = amplitudes(y);
  IterReport rep;
  // Start inside the temporal constraint set so every reported error follows a full projection pair.
  CVec start = g.crop(g.pad(x0));
  c.project(start);
  CVec cur(g.padded_size(), cd{0.0, 0.0});
  for (std::size_t i = 0; i < start.size(); ++i) cur[g.padded_index(i)] = start[i];
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    CVec spec = cur;
    g.forward(spec);
    const double e = replace_modulus(spec, amp);
    rep.errors.push_back(e);
    ++rep.iterations;
    if (e < opt.tol) {
      rep.reason = HaltReason::Tolerance;
      break;
    }
    g.inverse(spec);
    CVec sig = g.crop(spec);
    c.project(sig);
    CVec next(g.padded_size(), cd{0.0, 0.0});
    for (std::size_t i = 0; i < sig.size(); ++i) next[g.padded_index(i)] = sig[i];
    const double change = rel_change(next, cur);
    cur = std::move(next);
    if (change < opt.stagnation) {
      rep.reason = HaltReason::Stagnation;
      break;
    }
  }
  CVec out = g.crop(cur);
  c.project(out);
  rep.final_error = spectral_error(g, g.pad(g.to_signal(out)), amp);
  return {g.to_signal(std::move(out)), std::move(rep)};
}

std::pair<Signal, IterReport> hio(const MeasurementSet& y, const std::vector<std::size_t>& support,
                                  bool nonnegative, double beta, const Signal& x0, const AltProjOptions& opt) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("hio: beta must lie in (0, 1]");
  const Grid g = make_grid(y, x0);
  const TemporalConstraint c =
      nonnegative ? TemporalConstraint::support_nonnegative(support) : TemporalConstraint::support(support);
  c.validate(g.signal_size());
  const auto in = support_mask(g, support);
  const auto amp = amplitudes(y);
  IterReport rep;
  CVec prev = g.pad(x0);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    CVec z = prev;
    g.forward(z);
    const double e = replace_modulus(z, amp);
    rep.errors.push_back(e);
    ++rep.iterations;
    if (e < opt.tol) {
      rep.reason = HaltReason::Tolerance;
      break;
    }
    g.inverse(z);
    CVec next(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const bool violates = !in[i] || (nonnegative && z[i].real() < 0.0);
      next[i] = violates ? prev[i] - beta * z[i] : z[i];
    }
    const double change = rel_change(next, prev);
    prev = std::move(next);
    if (change < opt.stagnation) {
      rep.reason = HaltReason::Stagnation;
      break;
    }
  }
  CVec out = g.crop(prev);
  c.project(out);
  Signal result = g.to_signal(std::move(out));
  rep.final_error = spectral_error(g, g.pad(result), amp);
  return {std::move(result), std::move(rep)};
}

std::pair<Signal, IterReport> griffin_lim(const MeasurementSet& y, const WindowSpec& w, const Signal& x0,
                                          const AltProjOptions& opt) {
  const auto& m = y.model;
  if (m.kind != ModelKind::Stft) throw std::invalid_argument("griffin_lim: STFT model required, got " + to_string(m.kind));
  w.validate();
  const std::size_t n = m.n;
  if (x0.is_2d() || x0.size() != n || w.length() != n) throw std::invalid_argument("griffin_lim: length mismatch");
  if (m.k != m.ntilde || m.ntilde < n) throw std::invalid_argument("griffin_lim: requires K = ntilde >= N");
  const std::size_t frames = w.frames();
  const std::size_t nt = m.ntilde;
  if (y.rows != frames || y.cols != nt) throw std::invalid_argument("griffin_lim: measurement shape does not match the window");

  std::vector<double> denom(n, 0.0);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t i = 0; i < n; ++i) denom[i] += std::norm(w.shifted(f, i));
  for (std::size_t i = 0; i < n; ++i)
    if (denom[i] == 0.0) throw DivisionByZero("griffin_lim: window never covers index " + std::to_string(i));

  const auto amp = amplitudes(y);
  const auto frame_spectra = [&](const CVec& x) {
    CVec buf(frames * nt, cd{0.0, 0.0});
    for (std::size_t f = 0; f < frames; ++f) {
      std::span<cd> row(buf.data() + f * nt, nt);
      for (std::size_t i = 0; i < n; ++i) row[i] = x[i] * w.shifted(f, i);
      fft_inplace(row, false);
    }
    return buf;
  };

  IterReport rep;
  CVec cur(x0.vec());
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    CVec spec = frame_spectra(cur);
    const double e = replace_modulus(spec, amp);
    rep.errors.push_back(e);
    ++rep.iterations;
    if (e < opt.tol) {
      rep.reason = HaltReason::Tolerance;
      break;
    }
    CVec next(n, cd{0.0, 0.0});
    for (std::size_t f = 0; f < frames; ++f) {
      std::span<cd> row(spec.data() + f * nt, nt);
      fft_inplace(row, true);
      for (std::size_t i = 0; i < n; ++i) next[i] += row[i] / double(nt) * std::conj(w.shifted(f, i));
    }
    for (std::size_t i = 0; i < n; ++i) next[i] /= denom[i];
    const double change = rel_change(next, cur);
    cur = std::move(next);
    if (change < opt.stagnation) {
      rep.reason = HaltReason::Stagnation;
      break;
    }
  }
  {
    const CVec spec = frame_spectra(cur);
    double e = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double d = std::abs(spec[i]) - amp[i];
      e += d * d;
    }
    rep.final_error = e;
  }
  return {Signal(std::move(cur)), std::move(rep)};
}

}  // namespace phaseless
