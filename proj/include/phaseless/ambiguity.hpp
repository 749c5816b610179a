#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

/// A(z) = sum_{i=0}^{2N-2} coeffs[i] z^i with coeffs[i] = a[i - N + 1].
struct AutocorrPoly {
  CVec coeffs;
  std::size_t n = 0;

  static AutocorrPoly from_signal(const Signal& x);
  // Largest |coeffs[i] - conj(coeffs[2N-2-i])|, zero for a valid autocorrelation.
  double symmetry_defect() const;
};

/// One reflected zero pair. For off-circle pairs `root` is the member inside the
/// unit circle and its partner is 1/conj(root); `multiplicity` is how many zeros
/// of X each pair contributes, so the pair accounts for 2*multiplicity roots of A.
struct RootPair {
  cd root;
  std::size_t multiplicity = 1;
  bool unimodular = false;

  cd reflected() const { return 1.0 / std::conj(root); }
};

struct RootPairing {
  std::vector<RootPair> pairs;
  cd leading{0.0, 0.0};  // a[N-1]
  std::size_t n = 0;

  std::size_t root_count() const;  // sum of 2*multiplicity, equals 2N-2
  std::size_t off_circle_pairs() const;
};

class PairingFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolutionSet {
  std::vector<Signal> members;
  // For each member, how many zeros were taken from the inside member of every
  // off-circle pair (in pairing order).
  std::vector<std::vector<std::size_t>> provenance;
  RootPairing pairing;
};

/// Autocorrelation polynomial from oversampled classical data (ntilde = K = 2N-1).
AutocorrPoly autocorr_from_measurements(const MeasurementSet& y);

/// Roots of A grouped into reflected pairs. tol defaults to 1e-6 * max|root|.
RootPairing find_and_pair_roots(const AutocorrPoly& p, std::optional<double> tol = std::nullopt);

/// Every signal with the same classical magnitudes, one representative per
/// trivial-ambiguity class (first non-zero entry real positive).
SolutionSet enumerate_solutions(const AutocorrPoly& p, std::optional<double> tol = std::nullopt);

/// ceil(1/2 prod (m_l + 1)) over the off-circle pairs.
std::size_t count_nontrivial(const RootPairing& rp);

/// True when two distinct support index pairs share a non-zero difference.
bool has_collision(const Signal& x);

/// All zeros of Q(z) = sum_n x[n] z^{N-1-n} strictly inside the unit circle.
bool is_minimum_phase(const Signal& x);

}  // namespace phaseless
