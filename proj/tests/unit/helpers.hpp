#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "phaseless/forward.hpp"
#include "phaseless/signal.hpp"

namespace testutil {

using phaseless::cd;
using phaseless::CVec;

// Direct O(NK) evaluation of sum_n x[n] e^{-2 pi j k n / ntilde}.
inline CVec naive_dft(const CVec& x, std::size_t ntilde, std::size_t k) {
  CVec out(k);
  for (std::size_t kk = 0; kk < k; ++kk) {
    cd s{0.0, 0.0};
    for (std::size_t n = 0; n < x.size(); ++n)
      s += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * double(kk) * double(n) / double(ntilde));
    out[kk] = s;
  }
  return out;
}

inline double max_abs_diff(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline phaseless::Signal complex_signal(std::size_t n, std::uint64_t seed) {
  phaseless::Rng rng(seed);
  return phaseless::random_signal(n, phaseless::SignalDistribution::complex_normal(), rng);
}

inline phaseless::Signal real_signal(std::size_t n, std::uint64_t seed) {
  phaseless::Rng rng(seed);
  return phaseless::random_signal(n, phaseless::SignalDistribution::real_normal(), rng);
}

inline phaseless::Signal ambiguous_x1() { return phaseless::Signal(CVec{1.0, 0.0, -2.0, 0.0, -2.0}); }

inline phaseless::Signal ambiguous_x2() {
  const double s3 = std::sqrt(3.0);
  return phaseless::Signal(CVec{1.0 - s3, 0.0, 1.0, 0.0, 1.0 + s3});
}

}  // namespace testutil
