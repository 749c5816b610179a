#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/report.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

class DivisionByZero : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ConstraintKind { KnownMagnitudes, Support, SupportNonnegative, KnownEntries };

/// Time-domain constraint set. Indices address the (row-major flattened) signal.
struct TemporalConstraint {
  ConstraintKind kind = ConstraintKind::Support;
  std::vector<double> magnitudes;    // KnownMagnitudes
  std::vector<std::size_t> indices;  // Support / SupportNonnegative / KnownEntries
  CVec values;                       // KnownEntries

  static TemporalConstraint known_magnitudes(std::vector<double> mags);
  static TemporalConstraint support(std::vector<std::size_t> s);
  static TemporalConstraint support_nonnegative(std::vector<std::size_t> s);
  static TemporalConstraint known_entries(std::vector<std::size_t> idx, CVec vals);
  // Full support 0..N-1.
  static TemporalConstraint full_support(std::size_t n);

  void validate(std::size_t n) const;
  // Projects a length-N signal onto the constraint set.
  void project(std::span<cd> x) const;
};

struct AltProjOptions {
  std::size_t max_iter = 1000;
  double tol = 1e-10;
  double stagnation = 1e-12;  // relative iterate change
};

/// Error reduction (Gerchberg-Saxton when the constraint is known magnitudes)
/// for classical data with K = ntilde >= N, or 2D data with K_i = ntilde_i >= N_i.
std::pair<Signal, IterReport> error_reduction(const MeasurementSet& y, const TemporalConstraint& c,
                                              const Signal& x0, const AltProjOptions& opt = {});

/// Hybrid input-output with a support (optionally nonnegative) constraint.
/// The returned signal is the constraint projection of the last iterate.
std::pair<Signal, IterReport> hio(const MeasurementSet& y, const std::vector<std::size_t>& support,
                                  bool nonnegative, double beta, const Signal& x0,
                                  const AltProjOptions& opt = {});

/// Griffin-Lim for STFT data with K = ntilde >= N.
std::pair<Signal, IterReport> griffin_lim(const MeasurementSet& y, const WindowSpec& w, const Signal& x0,
                                          const AltProjOptions& opt = {});

/// sign(z) = z / |z| for z != 0 and 0 at z = 0.
inline cd phase_sign(cd z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : cd{0.0, 0.0};
}

}  // namespace phaseless
