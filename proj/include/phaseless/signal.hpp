#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phaseless/fft.hpp"

namespace phaseless {

using CVec = std::vector<cd>;

struct Shape2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const Shape2D&) const = default;
};

/// Complex signal, 1D or row-major 2D. Entries are finite; the 2D shape is fixed
/// at construction.
class Signal {
 public:
  Signal() = default;
  explicit Signal(CVec values);
  Signal(CVec values, Shape2D shape);

  static Signal zeros(std::size_t n) { return Signal(CVec(n, cd{0.0, 0.0})); }
  static Signal delta(std::size_t n, std::size_t at = 0);
  static Signal from_real(std::span<const double> re);

  std::size_t size() const { return values_.size(); }
  bool is_2d() const { return shape_.has_value(); }
  const std::optional<Shape2D>& shape() const { return shape_; }

  std::span<const cd> values() const { return values_; }
  const CVec& vec() const { return values_; }
  const cd& operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  double norm_sq() const;
  double norm1() const;
  double norm_inf() const;

  Signal scaled(cd factor) const;
  // conj(x[N-1-n]) for 1D, conj(x[N1-1-i, N2-1-j]) for 2D.
  Signal conj_reflected() const;
  Signal circular_shift(std::ptrdiff_t k) const;
  Signal circular_shift_2d(std::ptrdiff_t dr, std::ptrdiff_t dc) const;

 private:
  CVec values_;
  std::optional<Shape2D> shape_;
};

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);

cd inner(std::span<const cd> a, std::span<const cd> b);  // sum conj(a) b

/// Which trivial ambiguities a distance should factor out.
struct TrivialGroup {
  bool rotation = true;
  bool reflection = false;
  bool shift = false;

  static TrivialGroup rotation_only() { return {true, false, false}; }
  static TrivialGroup full() { return {true, true, true}; }
  static TrivialGroup rotation_reflection() { return {true, true, false}; }
};

/// Seeded generator. Identical seeds give identical sample sequences; child()
/// derives an independent deterministic stream for a sub-task.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  cd complex_normal() {
    const double re = normal();
    return {re, normal()};
  }
  Rng child(std::uint64_t stream) const;
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

enum class SignalKind { ComplexNormal, RealNormal, Sparse };

struct SignalDistribution {
  SignalKind kind = SignalKind::ComplexNormal;
  std::size_t sparsity = 0;  // only for Sparse
  bool complex_values = true;  // Sparse: complex-normal or real-normal non-zeros

  static SignalDistribution complex_normal() { return {SignalKind::ComplexNormal, 0, true}; }
  static SignalDistribution real_normal() { return {SignalKind::RealNormal, 0, false}; }
  static SignalDistribution sparse(std::size_t s, bool complex_values = false) {
    return {SignalKind::Sparse, s, complex_values};
  }
};

Signal random_signal(std::size_t n, const SignalDistribution& dist, Rng& rng);

// sum_{n<N} x[n] e^{-2 pi j k n / ntilde}, k < K. 1D only.
CVec oversampled_dft(const Signal& x, std::size_t ntilde, std::size_t k);
inline CVec oversampled_dft(const Signal& x) {
  return oversampled_dft(x, 2 * x.size() - 1, 2 * x.size() - 1);
}
// Same transform applied to a raw sequence.
CVec oversampled_dft(std::span<const cd> x, std::size_t ntilde, std::size_t k);

/// a[n] = sum_m conj(x[m]) x[m+n] for n = -(N-1) .. N-1, stored at offset n + N - 1.
CVec autocorrelation(const Signal& x);

/// Minimum of ||x - T(z)|| over the group elements enabled in g.
double dist_up_to(const Signal& x, const Signal& z, const TrivialGroup& g);
// dist_up_to divided by ||x|| (or the raw distance if x is zero).
double relative_error(const Signal& truth, const Signal& estimate, const TrivialGroup& g);

}  // namespace phaseless
