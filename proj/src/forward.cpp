#include "phaseless/forward.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phaseless {
namespace {

void fill_row(MeasurementSet& out, std::size_t m, const CVec& spectrum) {
  for (std::size_t k = 0; k < out.cols; ++k) out.at(m, k) = std::norm(spectrum[k]);
}

}  // namespace

void MaskSet::validate() const {
  if (masks.empty()) throw std::invalid_argument("MaskSet: at least one mask required");
  for (const auto& m : masks)
    if (m.size() != masks.front().size()) throw std::invalid_argument("MaskSet: masks differ in length");
}

WindowSpec WindowSpec::rectangular(std::size_t n, std::size_t width, std::size_t hop, bool periodic) {
  WindowSpec w;
  w.d.assign(n, cd{0.0, 0.0});
  for (std::size_t i = 0; i < width && i < n; ++i) w.d[i] = 1.0;
  w.width = width;
  w.hop = hop;
  w.periodic = periodic;
  w.validate();
  return w;
}

WindowSpec WindowSpec::gaussian(std::size_t n, double sigma, std::size_t width, std::size_t hop, bool periodic) {
  WindowSpec w;
  w.d.assign(n, cd{0.0, 0.0});
  for (std::size_t i = 0; i < width && i < n; ++i) {
    const double t = double(i);
    w.d[i] = std::exp(-t * t / (2.0 * sigma * sigma));
  }
  w.width = width;
  w.hop = hop;
  w.periodic = periodic;
  w.validate();
  return w;
}

cd WindowSpec::shifted(std::size_t m, std::size_t n) const {
  const auto len = static_cast<std::ptrdiff_t>(d.size());
  std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(m * hop) - static_cast<std::ptrdiff_t>(n);
  if (periodic) {
    idx = ((idx % len) + len) % len;
  } else if (idx < 0 || idx >= len) {
    return {0.0, 0.0};
  }
  return d[static_cast<std::size_t>(idx)];
}

void WindowSpec::validate() const {
  if (hop < 1) throw std::invalid_argument("WindowSpec: hop L must be >= 1");
  if (width < 1 || width > d.size()) throw std::invalid_argument("WindowSpec: need 1 <= W <= N");
  for (std::size_t i = width; i < d.size(); ++i)
    if (d[i] != cd{0.0, 0.0}) throw std::invalid_argument("WindowSpec: window non-zero beyond W");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Classical: return "classical";
    case ModelKind::Masked: return "masked";
    case ModelKind::Stft: return "stft";
    case ModelKind::Frog: return "frog";
    case ModelKind::TwoD: return "2d";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "classical") return ModelKind::Classical;
  if (s == "masked") return ModelKind::Masked;
  if (s == "stft") return ModelKind::Stft;
  if (s == "frog") return ModelKind::Frog;
  if (s == "2d") return ModelKind::TwoD;
  throw std::invalid_argument("unknown model kind: " + s);
}

void MeasurementSet::validate() const {
  if (y.size() != rows * cols) throw std::invalid_argument("MeasurementSet: y size does not match rows*cols");
  switch (model.kind) {
    case ModelKind::Classical:
      if (rows != 1 || cols != model.k) throw std::invalid_argument("MeasurementSet: classical shape");
      break;
    case ModelKind::Masked:
      if (!model.masks || rows != model.masks->count() || cols != model.k)
        throw std::invalid_argument("MeasurementSet: masked shape");
      break;
    case ModelKind::Stft:
      if (!model.window || rows != model.window->frames() || cols != model.k)
        throw std::invalid_argument("MeasurementSet: stft shape");
      break;
    case ModelKind::Frog:
      if (rows != (model.n + model.hop - 1) / model.hop || cols != model.n)
        throw std::invalid_argument("MeasurementSet: frog shape");
      break;
    case ModelKind::TwoD:
      if (rows != model.k1 || cols != model.k2) throw std::invalid_argument("MeasurementSet: 2d shape");
      break;
  }
}

MeasurementSet measure_classical(const Signal& x, std::size_t ntilde, std::size_t k) {
  if (x.is_2d()) throw std::invalid_argument("measure_classical: 1D signal required");
  MeasurementSet out;
  out.model.kind = ModelKind::Classical;
  out.model.n = x.size();
  out.model.ntilde = ntilde;
  out.model.k = k;
  out.rows = 1;
  out.cols = k;
  out.y.resize(k);
  fill_row(out, 0, oversampled_dft(x, ntilde, k));
  return out;
}

MeasurementSet measure_masked(const Signal& x, const MaskSet& masks, std::size_t ntilde, std::size_t k) {
  masks.validate();
  if (masks.length() != x.size()) throw std::invalid_argument("measure_masked: mask length differs from N");
  MeasurementSet out;
  out.model.kind = ModelKind::Masked;
  out.model.n = x.size();
  out.model.ntilde = ntilde;
  out.model.k = k;
  out.model.masks = masks;
  out.rows = masks.count();
  out.cols = k;
  out.y.resize(out.rows * k);
  CVec prod(x.size());
  for (std::size_t m = 0; m < masks.count(); ++m) {
    for (std::size_t n = 0; n < x.size(); ++n) prod[n] = x[n] * masks.masks[m][n];
    fill_row(out, m, oversampled_dft(prod, ntilde, k));
  }
  return out;
}

MeasurementSet measure_stft(const Signal& x, const WindowSpec& w, std::size_t ntilde, std::size_t k) {
  w.validate();
  if (w.length() != x.size()) throw std::invalid_argument("measure_stft: window length differs from N");
  MeasurementSet out;
  out.model.kind = ModelKind::Stft;
  out.model.n = x.size();
  out.model.ntilde = ntilde;
  out.model.k = k;
  out.model.hop = w.hop;
  out.model.window = w;
  out.rows = w.frames();
  out.cols = k;
  out.y.resize(out.rows * k);
  CVec prod(x.size());
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t n = 0; n < x.size(); ++n) prod[n] = x[n] * w.shifted(m, n);
    fill_row(out, m, oversampled_dft(prod, ntilde, k));
  }
  return out;
}

MeasurementSet measure_frog(const Signal& x1, const Signal& x2, std::size_t hop) {
  if (x1.size() != x2.size()) throw std::invalid_argument("measure_frog: length mismatch");
  if (hop < 1) throw std::invalid_argument("measure_frog: L must be >= 1");
  const std::size_t n = x1.size();
  MeasurementSet out;
  out.model.kind = ModelKind::Frog;
  out.model.n = n;
  out.model.ntilde = n;
  out.model.k = n;
  out.model.hop = hop;
  out.rows = (n + hop - 1) / hop;
  out.cols = n;
  out.y.resize(out.rows * n);
  CVec prod(n);
  for (std::size_t m = 0; m < out.rows; ++m) {
    for (std::size_t i = 0; i < n; ++i) prod[i] = x1[i] * x2[(i + m * hop) % n];
    fill_row(out, m, oversampled_dft(prod, n, n));
  }
  return out;
}

MeasurementSet measure_2d(const Signal& x, std::size_t ntilde1, std::size_t ntilde2, std::size_t k1,
                          std::size_t k2) {
  if (!x.is_2d()) throw std::invalid_argument("measure_2d: 2D signal required");
  const auto shape = *x.shape();
  // Separable transform: fold each axis onto its period, 2D FFT, sample periodically.
  CVec grid(ntilde1 * ntilde2, cd{0.0, 0.0});
  for (std::size_t r = 0; r < shape.rows; ++r)
    for (std::size_t c = 0; c < shape.cols; ++c)
      grid[(r % ntilde1) * ntilde2 + (c % ntilde2)] += x[r * shape.cols + c];
  fft2_inplace(grid, ntilde1, ntilde2, false);
  MeasurementSet out;
  out.model.kind = ModelKind::TwoD;
  out.model.n = x.size();
  out.model.signal_shape = shape;
  out.model.ntilde1 = ntilde1;
  out.model.ntilde2 = ntilde2;
  out.model.k1 = k1;
  out.model.k2 = k2;
  out.rows = k1;
  out.cols = k2;
  out.y.resize(k1 * k2);
  for (std::size_t a = 0; a < k1; ++a)
    for (std::size_t b = 0; b < k2; ++b) out.at(a, b) = std::norm(grid[(a % ntilde1) * ntilde2 + (b % ntilde2)]);
  return out;
}

MeasurementSet measure_2d(const Signal& x) {
  if (!x.is_2d()) throw std::invalid_argument("measure_2d: 2D signal required");
  const auto s = *x.shape();
  return measure_2d(x, 2 * s.rows - 1, 2 * s.cols - 1, 2 * s.rows - 1, 2 * s.cols - 1);
}

MaskSet masks_fixed(std::size_t n) {
  MaskSet ms;
  ms.masks.emplace_back(n, cd{1.0, 0.0});
  CVec d2(n, cd{1.0, 0.0});
  d2[0] = 0.0;
  ms.masks.push_back(std::move(d2));
  return ms;
}

MaskSet masks_block(std::size_t n, std::size_t l) {
  if (l < 1 || l + 2 > n) throw std::invalid_argument("masks_block: need 1 <= L <= N-2");
  MaskSet ms;
  ms.masks.emplace_back(n, cd{1.0, 0.0});
  CVec d1(n, cd{0.0, 0.0}), d2(n, cd{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) (i < l ? d1 : d2)[i] = 1.0;
  ms.masks.push_back(std::move(d1));
  ms.masks.push_back(std::move(d2));
  return ms;
}

MaskSet masks_modulated(std::size_t n, std::size_t s) {
  MaskSet ms;
  ms.masks.emplace_back(n, cd{1.0, 0.0});
  CVec d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    // s*i reduced mod n keeps the phase argument exact for large products.
    const double frac = double((s * i) % n) / double(n);
    d1[i] = 1.0 + std::polar(1.0, 2.0 * std::numbers::pi * frac);
    d2[i] = 1.0 + std::polar(1.0, 2.0 * std::numbers::pi * (frac - 0.25));
  }
  ms.masks.push_back(std::move(d1));
  ms.masks.push_back(std::move(d2));
  return ms;
}

MeasurementSet add_noise(const MeasurementSet& clean, double sigma, std::uint64_t seed) {
  MeasurementSet out = clean;
  Rng rng(seed);
  for (auto& v : out.y) v = std::max(0.0, v + sigma * rng.normal());
  out.noise = NoiseRecord{sigma, seed};
  return out;
}

std::vector<CVec> row_masks(const ModelDescriptor& model) {
  switch (model.kind) {
    case ModelKind::Classical:
      return {CVec(model.n, cd{1.0, 0.0})};
    case ModelKind::Masked:
      if (!model.masks) throw std::invalid_argument("row_masks: masked model without masks");
      return model.masks->masks;
    case ModelKind::Stft: {
      if (!model.window) throw std::invalid_argument("row_masks: stft model without window");
      const auto& w = *model.window;
      std::vector<CVec> out(w.frames(), CVec(model.n));
      for (std::size_t m = 0; m < out.size(); ++m)
        for (std::size_t n = 0; n < model.n; ++n) out[m][n] = w.shifted(m, n);
      return out;
    }
    default:
      throw std::invalid_argument("row_masks: model is not linear-masked (" + to_string(model.kind) + ")");
  }
}

}  // namespace phaseless
