#pragma once

#include <optional>
#include <stdexcept>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

struct CepstralConfig {
  std::size_t grid_factor = 32;      // grid size G >= grid_factor * N (and >= 4(2N-1)), rounded up to 2^k
  double ill_conditioning = 1e-10;   // reject when min |A| < this * max |A| on the grid
};

class DeltaTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (delta, x[0], ..., x[N-1]); delta defaults to ||x||_1 (real positive).
Signal augment_min_phase(const Signal& x, std::optional<cd> delta = std::nullopt);

/// Minimum-phase signal (up to rotation) from oversampled classical magnitudes,
/// via the folded real cepstrum of (1/2) log |A| on a dense grid.
Signal kolmogorov_recover(const MeasurementSet& y, const CepstralConfig& cfg = {});

std::size_t cepstral_grid_size(std::size_t n, const CepstralConfig& cfg);

}  // namespace phaseless
