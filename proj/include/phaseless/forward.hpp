#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseless/signal.hpp"

namespace phaseless {

/// M known diagonal masks of a common length N.
struct MaskSet {
  std::vector<CVec> masks;

  std::size_t count() const { return masks.size(); }
  std::size_t length() const { return masks.empty() ? 0 : masks.front().size(); }
  void validate() const;
};

/// STFT reference window d with support length W and hop L.
struct WindowSpec {
  CVec d;                // length N, zero from index W on
  std::size_t width = 1;  // W
  std::size_t hop = 1;    // L
  bool periodic = true;

  static WindowSpec rectangular(std::size_t n, std::size_t width, std::size_t hop, bool periodic = true);
  // d[n] = exp(-n^2 / (2 sigma^2)) on 0..W-1.
  static WindowSpec gaussian(std::size_t n, double sigma, std::size_t width, std::size_t hop,
                             bool periodic = true);

  std::size_t length() const { return d.size(); }
  std::size_t frames() const { return (d.size() + hop - 1) / hop; }
  // d[mL - n], wrapped mod N when periodic, zero outside 0..N-1 otherwise.
  cd shifted(std::size_t m, std::size_t n) const;
  void validate() const;
};

enum class ModelKind { Classical, Masked, Stft, Frog, TwoD };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelDescriptor {
  ModelKind kind = ModelKind::Classical;
  std::size_t n = 0;       // signal length (N1*N2 for 2D)
  std::size_t ntilde = 0;  // DFT period
  std::size_t k = 0;       // frequency samples per row
  std::size_t hop = 1;     // STFT / FROG L
  // 2D only
  Shape2D signal_shape{};
  std::size_t ntilde1 = 0, ntilde2 = 0, k1 = 0, k2 = 0;
  std::optional<MaskSet> masks;
  std::optional<WindowSpec> window;
};

struct NoiseRecord {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Phaseless data y[m, k] stored row-major (rows x cols) with the model that produced it.
struct MeasurementSet {
  ModelDescriptor model;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> y;
  std::optional<NoiseRecord> noise;

  double at(std::size_t m, std::size_t k) const { return y[m * cols + k]; }
  double& at(std::size_t m, std::size_t k) { return y[m * cols + k]; }
  void validate() const;
};

MeasurementSet measure_classical(const Signal& x, std::size_t ntilde, std::size_t k);
inline MeasurementSet measure_classical(const Signal& x) {
  return measure_classical(x, 2 * x.size() - 1, 2 * x.size() - 1);
}
MeasurementSet measure_masked(const Signal& x, const MaskSet& masks, std::size_t ntilde, std::size_t k);
MeasurementSet measure_stft(const Signal& x, const WindowSpec& w, std::size_t ntilde, std::size_t k);
inline MeasurementSet measure_stft(const Signal& x, const WindowSpec& w) {
  return measure_stft(x, w, x.size(), x.size());
}
MeasurementSet measure_frog(const Signal& x1, const Signal& x2, std::size_t hop);
MeasurementSet measure_2d(const Signal& x, std::size_t ntilde1, std::size_t ntilde2, std::size_t k1,
                          std::size_t k2);
MeasurementSet measure_2d(const Signal& x);

MaskSet masks_fixed(std::size_t n);
// {ones, indicator[0, L), indicator[L, N)}
MaskSet masks_block(std::size_t n, std::size_t l);
MaskSet masks_modulated(std::size_t n, std::size_t s);

/// Additive i.i.d. Gaussian noise on intensities, clamped at zero; records (sigma, seed).
MeasurementSet add_noise(const MeasurementSet& clean, double sigma, std::uint64_t seed);

/// Per-row masks of a Classical / Masked / Stft model: row m measures
/// |sum_n x[n] mask_m[n] e^{-2 pi j k n / ntilde}|^2.
std::vector<CVec> row_masks(const ModelDescriptor& model);

}  // namespace phaseless
