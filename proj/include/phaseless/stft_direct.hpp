#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

class NotAdmissible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyP : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// G_l with (m, n) entry d[mL - n] conj(d[mL - n - l]), indices mod N, plus the matching data column.
struct DiagonalSystem {
  std::ptrdiff_t ell = 0;
  Eigen::MatrixXcd g;
  Eigen::VectorXcd ytilde;
};

Eigen::MatrixXcd build_G(const WindowSpec& w, std::ptrdiff_t ell);
DiagonalSystem build_system(const MeasurementSet& y, const WindowSpec& w, std::ptrdiff_t ell);

/// ytilde[m, l] = (1/N) sum_k y[m, k] e^{-2 pi j k l / N}, row-major (frames x N).
CVec stft_ytilde(const MeasurementSet& y);

/// l-th circular diagonal: out[n] = X[n, (n + l) mod N].
CVec circular_diagonal(const Eigen::MatrixXcd& x, std::ptrdiff_t ell);

/// Every G_l, |l| <= W-1, invertible (hop must be 1).
bool is_admissible(const WindowSpec& w, std::size_t n);

/// Closed-form recovery for L = 1, ntilde = K = N.
Signal stft_ls_recover(const MeasurementSet& y, const WindowSpec& w);

/// Same pipeline with Tikhonov-regularized solves, for any hop.
/// lambda is relative to the mean eigenvalue of G_l* G_l.
Signal stft_init_heuristic(const MeasurementSet& y, const WindowSpec& w, double lambda = 1e-6);

}  // namespace phaseless
