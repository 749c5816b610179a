#include "phaseless/minphase.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless/ambiguity.hpp"

namespace phaseless {

Signal augment_min_phase(const Signal& x, std::optional<cd> delta) {
  if (x.is_2d()) throw std::invalid_argument("augment_min_phase: 1D signal required");
  const double l1 = x.norm1();
  if (l1 == 0.0) throw std::invalid_argument("augment_min_phase: signal is identically zero");
  const cd d = delta.value_or(cd{l1, 0.0});
  if (std::abs(d) < l1) throw DeltaTooSmall("augment_min_phase: |delta| < ||x||_1");
  CVec v;
  v.reserve(x.size() + 1);
  v.push_back(d);
  v.insert(v.end(), x.vec().begin(), x.vec().end());
  return Signal(std::move(v));
}

std::size_t cepstral_grid_size(std::size_t n, const CepstralConfig& cfg) {
  const std::size_t want = std::max(4 * (2 * n - 1), cfg.grid_factor * n);
  std::size_t g = 1;
  while (g < want) g <<= 1;
  return g;
}

Signal kolmogorov_recover(const MeasurementSet& y, const CepstralConfig& cfg) {
  const AutocorrPoly p = autocorr_from_measurements(y);
  const std::size_t n = p.n;
  const std::size_t g = cepstral_grid_size(n, cfg);

  // |X(w)|^2 = sum_l a[l] e^{-j w l} on the grid w = 2 pi i / G.
  CVec grid(g, cd{0.0, 0.0});
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n - 1);
    grid[static_cast<std::size_t>((lag + static_cast<std::ptrdiff_t>(g)) % static_cast<std::ptrdiff_t>(g))] = p.coeffs[i];
  }
  fft_inplace(grid, false);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& v : grid) {
    lo = std::min(lo, std::abs(v.real()));
    hi = std::max(hi, std::abs(v.real()));
  }
  if (hi == 0.0 || lo < cfg.ill_conditioning * hi)
    throw IllConditioned("kolmogorov_recover: |A| nearly vanishes on the unit circle");

  for (auto& v : grid) v = 0.5 * std::log(std::abs(v.real()));
  fft_inplace(grid, true);  // real cepstrum times G
  const double inv_g = 1.0 / double(g);
  for (auto& v : grid) v *= inv_g;

  // Causal folding of the cepstrum.
  for (std::size_t i = 1; i < g / 2; ++i) grid[i] *= 2.0;
  for (std::size_t i = g / 2 + 1; i < g; ++i) grid[i] = 0.0;

  fft_inplace(grid, false);
  for (auto& v : grid) v = std::exp(v);
  fft_inplace(grid, true);

  CVec out(n);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = grid[i] * inv_g;
    if (std::abs(out[i]) > std::abs(out[peak])) peak = i;
  }
  const cd rot = std::abs(out[peak]) > 0.0 ? std::conj(out[peak]) / std::abs(out[peak]) : cd{1.0, 0.0};
  for (auto& v : out) v *= rot;
  return Signal(std::move(out));
}

}  // namespace phaseless
