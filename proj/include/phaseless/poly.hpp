#pragma once

#include <span>
#include <vector>

#include "phaseless/signal.hpp"

namespace phaseless {

struct RootSolveInfo {
  int iterations = 0;
  bool used_companion = false;
  double max_residual = 0.0;  // max |p(z)| / sum_k |p_k| |z|^k over the returned roots
};

/// All roots of sum_k coeffs[k] z^k (ascending order). Exact-zero leading
/// coefficients are dropped; exact-zero trailing coefficients become roots at 0.
/// Aberth-Ehrlich simultaneous iteration; if any root misses the residual target
/// the roots are recomputed as companion-matrix eigenvalues.
CVec polynomial_roots(std::span<const cd> coeffs, RootSolveInfo* info = nullptr,
                      double residual_tol = 1e-10);

// Ascending coefficients of prod_i (z - roots[i]).
CVec poly_from_roots(std::span<const cd> roots);

cd poly_eval(std::span<const cd> coeffs, cd z);

}  // namespace phaseless
