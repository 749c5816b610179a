#include "phaseless/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace phaseless {
namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct Radix2Plan {
  std::vector<std::size_t> bitrev;
  std::vector<cd> twiddle;  // e^{-2 pi j k / n}, k < n/2

  explicit Radix2Plan(std::size_t n) : bitrev(n), twiddle(n / 2) {
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < bits; ++b)
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      bitrev[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k)
      twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(n));
  }

  void run(std::span<cd> a, bool inverse) const {
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i)
      if (i < bitrev[i]) std::swap(a[i], a[bitrev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n / len;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t k = 0; k < half; ++k) {
          cd w = twiddle[k * stride];
          if (inverse) w = std::conj(w);
          const cd u = a[i + k];
          const cd v = a[i + k + half] * w;
          a[i + k] = u + v;
          a[i + k + half] = u - v;
        }
      }
    }
  }
};

struct BluesteinPlan {
  std::size_t n;
  std::size_t m;
  std::vector<cd> chirp;       // e^{-pi j k^2 / n}
  std::vector<cd> kernel_hat;  // transform of the conjugate chirp, length m
  std::shared_ptr<const Radix2Plan> inner;

  explicit BluesteinPlan(std::size_t len)
      : n(len), m(next_pow2(2 * len - 1)), chirp(len), kernel_hat(m, cd{0.0, 0.0}),
        inner(std::make_shared<Radix2Plan>(m)) {
    // k^2 mod 2n keeps the angle argument small for large k.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k2 = (k * k) % (2 * n);
      chirp[k] = std::polar(1.0, -std::numbers::pi * double(k2) / double(n));
    }
    kernel_hat[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
      kernel_hat[k] = std::conj(chirp[k]);
      kernel_hat[m - k] = std::conj(chirp[k]);
    }
    inner->run(kernel_hat, false);
  }

  void run(std::span<cd> a, bool inverse) const {
    std::vector<cd> buf(m, cd{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
      const cd c = inverse ? std::conj(chirp[k]) : chirp[k];
      buf[k] = a[k] * c;
    }
    inner->run(buf, false);
    for (std::size_t k = 0; k < m; ++k) {
      buf[k] *= inverse ? std::conj(kernel_hat[k]) : kernel_hat[k];
    }
    // conj(kernel_hat) is the transform of the reversed-conjugate kernel only because
    // the kernel is symmetric in k <-> m-k, which holds by construction.
    inner->run(buf, true);
    const double scale = 1.0 / double(m);
    for (std::size_t k = 0; k < n; ++k) {
      const cd c = inverse ? std::conj(chirp[k]) : chirp[k];
      a[k] = buf[k] * scale * c;
    }
  }
};

struct PlanCache {
  std::map<std::size_t, std::shared_ptr<const Radix2Plan>> radix2;
  std::map<std::size_t, std::shared_ptr<const BluesteinPlan>> bluestein;
};

PlanCache& cache() {
  thread_local PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::span<cd> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  auto& c = cache();
  if (is_pow2(n)) {
    auto& plan = c.radix2[n];
    if (!plan) plan = std::make_shared<Radix2Plan>(n);
    plan->run(data, inverse);
    return;
  }
  auto& plan = c.bluestein[n];
  if (!plan) plan = std::make_shared<BluesteinPlan>(n);
  plan->run(data, inverse);
}

std::vector<cd> fft(std::span<const cd> data) {
  std::vector<cd> out(data.begin(), data.end());
  fft_inplace(out, false);
  return out;
}

std::vector<cd> ifft(std::span<const cd> data) {
  std::vector<cd> out(data.begin(), data.end());
  fft_inplace(out, true);
  const double s = out.empty() ? 1.0 : 1.0 / double(out.size());
  for (auto& v : out) v *= s;
  return out;
}

void fft2_inplace(std::span<cd> data, std::size_t rows, std::size_t cols, bool inverse) {
  if (data.size() != rows * cols) throw std::invalid_argument("fft2: size mismatch");
  for (std::size_t r = 0; r < rows; ++r) fft_inplace(data.subspan(r * cols, cols), inverse);
  std::vector<cd> column(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = data[r * cols + c];
    fft_inplace(column, inverse);
    for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] = column[r];
  }
}

}  // namespace phaseless
