#include "phaseless/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace phaseless {
namespace {

void check_finite(const CVec& v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("Signal: non-finite entry");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Distance minimized over rotation only, closed form.
double rotation_distance(std::span<const cd> x, std::span<const cd> z, bool allow_rotation) {
  // Evaluate the residual at the optimal phase directly; the closed form
  // ||x||^2 + ||z||^2 - 2|<x, z>| loses half the digits near zero distance.
  cd rot{1.0, 0.0};
  if (allow_rotation) {
    cd ip{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) ip += std::conj(z[i]) * x[i];
    if (std::abs(ip) > 0.0) rot = ip / std::abs(ip);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += std::norm(x[i] - rot * z[i]);
  return std::sqrt(d);
}

}  // namespace

Signal::Signal(CVec values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Signal: length must be >= 1");
  check_finite(values_);
}

Signal::Signal(CVec values, Shape2D shape) : values_(std::move(values)), shape_(shape) {
  if (values_.empty()) throw std::invalid_argument("Signal: length must be >= 1");
  if (shape.rows * shape.cols != values_.size())
    throw std::invalid_argument("Signal: 2D shape does not match length");
  check_finite(values_);
}

Signal Signal::delta(std::size_t n, std::size_t at) {
  CVec v(n, cd{0.0, 0.0});
  v.at(at) = 1.0;
  return Signal(std::move(v));
}

Signal Signal::from_real(std::span<const double> re) {
  CVec v(re.begin(), re.end());
  return Signal(std::move(v));
}

double Signal::norm_sq() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s;
}

double Signal::norm() const { return std::sqrt(norm_sq()); }

double Signal::norm1() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::abs(v);
  return s;
}

double Signal::norm_inf() const {
  double s = 0.0;
  for (const auto& v : values_) s = std::max(s, std::abs(v));
  return s;
}

Signal Signal::scaled(cd factor) const {
  CVec v = values_;
  for (auto& e : v) e *= factor;
  return shape_ ? Signal(std::move(v), *shape_) : Signal(std::move(v));
}

Signal Signal::conj_reflected() const {
  CVec v(values_.size());
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i < n; ++i) v[i] = std::conj(values_[n - 1 - i]);
  // Row-major reversal of the flat buffer is exactly the 2D double reflection.
  return shape_ ? Signal(std::move(v), *shape_) : Signal(std::move(v));
}

Signal Signal::circular_shift(std::ptrdiff_t k) const {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  CVec v(values_.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t j = ((i - k) % n + n) % n;
    v[static_cast<std::size_t>(i)] = values_[static_cast<std::size_t>(j)];
  }
  return shape_ ? Signal(std::move(v), *shape_) : Signal(std::move(v));
}

Signal Signal::circular_shift_2d(std::ptrdiff_t dr, std::ptrdiff_t dc) const {
  if (!shape_) throw std::invalid_argument("circular_shift_2d: 2D signal required");
  const auto rows = static_cast<std::ptrdiff_t>(shape_->rows);
  const auto cols = static_cast<std::ptrdiff_t>(shape_->cols);
  CVec v(values_.size());
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const std::ptrdiff_t sr = ((r - dr) % rows + rows) % rows;
    for (std::ptrdiff_t c = 0; c < cols; ++c) {
      const std::ptrdiff_t sc = ((c - dc) % cols + cols) % cols;
      v[static_cast<std::size_t>(r * cols + c)] = values_[static_cast<std::size_t>(sr * cols + sc)];
    }
  }
  return Signal(std::move(v), *shape_);
}

Signal operator+(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Signal +: length mismatch");
  CVec v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return a.shape() ? Signal(std::move(v), *a.shape()) : Signal(std::move(v));
}

Signal operator-(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Signal -: length mismatch");
  CVec v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return a.shape() ? Signal(std::move(v), *a.shape()) : Signal(std::move(v));
}

cd inner(std::span<const cd> a, std::span<const cd> b) {
  cd s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Rng Rng::child(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

Signal random_signal(std::size_t n, const SignalDistribution& dist, Rng& rng) {
  if (n == 0) throw std::invalid_argument("random_signal: n must be >= 1");
  CVec v(n, cd{0.0, 0.0});
  switch (dist.kind) {
    case SignalKind::ComplexNormal:
      for (auto& e : v) e = rng.complex_normal();
      break;
    case SignalKind::RealNormal:
      for (auto& e : v) e = rng.normal();
      break;
    case SignalKind::Sparse: {
      if (dist.sparsity > n) throw std::invalid_argument("random_signal: sparsity exceeds length");
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      // Partial Fisher-Yates: the first s slots are a uniform random support.
      for (std::size_t i = 0; i < dist.sparsity; ++i) {
        const std::size_t j = i + rng.index(n - i);
        std::swap(idx[i], idx[j]);
      }
      for (std::size_t i = 0; i < dist.sparsity; ++i) {
        cd val;
        do {
          val = dist.complex_values ? rng.complex_normal() : cd{rng.normal(), 0.0};
        } while (val == cd{0.0, 0.0});
        v[idx[i]] = val;
      }
      break;
    }
  }
  return Signal(std::move(v));
}

CVec oversampled_dft(std::span<const cd> x, std::size_t ntilde, std::size_t k) {
  if (ntilde == 0 || k == 0) throw std::invalid_argument("oversampled_dft: ntilde and K must be >= 1");
  // Fold onto the period ntilde, transform once, then read K samples periodically.
  CVec folded(ntilde, cd{0.0, 0.0});
  for (std::size_t n = 0; n < x.size(); ++n) folded[n % ntilde] += x[n];
  fft_inplace(folded, false);
  CVec out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = folded[i % ntilde];
  return out;
}

CVec oversampled_dft(const Signal& x, std::size_t ntilde, std::size_t k) {
  if (x.is_2d()) throw std::invalid_argument("oversampled_dft: 1D signal required");
  return oversampled_dft(x.values(), ntilde, k);
}

CVec autocorrelation(const Signal& x) {
  if (x.is_2d()) throw std::invalid_argument("autocorrelation: 1D signal required");
  const std::size_t n = x.size();
  CVec a(2 * n - 1, cd{0.0, 0.0});
  for (std::size_t lag = 0; lag < n; ++lag) {
    cd s{0.0, 0.0};
    for (std::size_t m = 0; m + lag < n; ++m) s += std::conj(x[m]) * x[m + lag];
    a[n - 1 + lag] = s;
    a[n - 1 - lag] = std::conj(s);
  }
  a[n - 1] = a[n - 1].real();
  return a;
}

double dist_up_to(const Signal& x, const Signal& z, const TrivialGroup& g) {
  if (x.size() != z.size()) throw std::invalid_argument("dist_up_to: length mismatch");
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  const bool two_d = z.is_2d();
  const std::size_t shifts = g.shift ? n : 1;
  for (int refl = 0; refl <= (g.reflection ? 1 : 0); ++refl) {
    const Signal base = refl ? z.conj_reflected() : z;
    for (std::size_t s = 0; s < shifts; ++s) {
      Signal cand = base;
      if (s != 0) {
        cand = two_d ? base.circular_shift_2d(static_cast<std::ptrdiff_t>(s / z.shape()->cols),
                                              static_cast<std::ptrdiff_t>(s % z.shape()->cols))
                     : base.circular_shift(static_cast<std::ptrdiff_t>(s));
      }
      best = std::min(best, rotation_distance(x.values(), cand.values(), g.rotation));
    }
  }
  return best;
}

double relative_error(const Signal& truth, const Signal& estimate, const TrivialGroup& g) {
  const double d = dist_up_to(truth, estimate, g);
  const double n = truth.norm();
  return n > 0.0 ? d / n : d;
}

}  // namespace phaseless
