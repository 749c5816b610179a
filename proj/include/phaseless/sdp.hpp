#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace phaseless {

using HermitianMatrix = Eigen::MatrixXcd;

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

EigenDecomposition hermitian_eig(const HermitianMatrix& h, double tol = 1e-10);
HermitianMatrix project_psd(const HermitianMatrix& h);
HermitianMatrix outer(const Signal& x);  // x x*

/// One linear constraint on X.
///  RankOne:   a* X a in [lower, upper]
///  Hermitian: trace(A X) in [lower, upper]
///  Linear:    trace(T X) = target for a general complex T (real and imaginary parts)
struct SdpConstraint {
  enum class Kind { RankOne, Hermitian, Linear };
  Kind kind = Kind::RankOne;
  CVec vector;
  Eigen::MatrixXcd matrix;
  double lower = 0.0, upper = 0.0;
  cd target{0.0, 0.0};

  static SdpConstraint rank_one(CVec a, double b) { return {Kind::RankOne, std::move(a), {}, b, b, {}}; }
  static SdpConstraint rank_one_interval(CVec a, double lo, double hi) {
    return {Kind::RankOne, std::move(a), {}, lo, hi, {}};
  }
  static SdpConstraint hermitian(Eigen::MatrixXcd m, double b) { return {Kind::Hermitian, {}, std::move(m), b, b, {}}; }
  static SdpConstraint linear(Eigen::MatrixXcd t, cd target) {
    return {Kind::Linear, {}, std::move(t), 0.0, 0.0, target};
  }
};

struct SdpProblem {
  std::size_t n = 0;
  HermitianMatrix objective;
  bool maximize = false;
  std::vector<SdpConstraint> constraints;

  void validate() const;
};

struct SdpTraceRow {
  std::size_t iteration;
  double primal, dual, objective;
};

struct SdpReport {
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  Eigen::VectorXd spectrum;  // descending
  std::vector<SdpTraceRow> trace;

  std::string trace_csv() const;  // "iteration,primal,dual,objective"
};

class NotConverged : public std::runtime_error {
 public:
  NotConverged(SdpReport report, HermitianMatrix last);
  const SdpReport& report() const { return report_; }
  const HermitianMatrix& last_iterate() const { return last_; }

 private:
  SdpReport report_;
  HermitianMatrix last_;
};

struct AdmmOptions {
  double rho = 1.0;
  double tol = 1e-7;
  std::size_t max_iter = 20000;
  bool adaptive_rho = true;
  std::size_t adapt_interval = 10; // iterations between rho updates
  std::size_t adapt_until = 2000;  // rho is frozen after this iteration (0: never)
  double relaxation = 1.5;         // over-relaxation factor in (0, 2)
  bool record_trace = false;
  std::size_t trace_every = 10;
};

/// ADMM over X (affine/objective block), Z (PSD block) and s (box block).
/// Returns the PSD block. Residuals are measured on the row-normalized,
/// unit-scaled problem.
std::pair<HermitianMatrix, SdpReport> admm_solve(const SdpProblem& p, const AdmmOptions& opt = {});

/// min trace(X) s.t. |<a_{m,k}, x>|^2 constraints of a masked (or classical / STFT) model.
SdpProblem build_masked_trace(const MeasurementSet& y, const MaskSet& masks);
SdpProblem build_masked_noisy(const MeasurementSet& y, const MaskSet& masks, double eps);
/// Same program for any model with per-row masks (classical, masked, STFT).
SdpProblem build_trace_from_model(const MeasurementSet& y, double eps = 0.0);

/// max X[0,0] s.t. trace(Theta_k X) = a[k], k = 0..N-1. `a` is the full
/// autocorrelation (length 2N-1, lag 0 at index N-1).
SdpProblem build_minphase(const CVec& a);

/// STFT trace program (ntilde = N) with optional known leading entries x[0..P-1].
SdpProblem build_stft_sdp(const MeasurementSet& y, const WindowSpec& w,
                          const std::optional<CVec>& known_prefix = std::nullopt);

/// sqrt(lambda1) v1 with the first non-zero entry made real positive, and lambda2 / lambda1.
std::pair<Signal, double> extract_rank_one(const HermitianMatrix& x);

}  // namespace phaseless
