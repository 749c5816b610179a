#include "phaseless/stft_direct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "phaseless/fft.hpp"
#include "phaseless/sdp.hpp"

namespace phaseless {
namespace {

constexpr double kCutoff = 1e-10;

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto ni = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % ni) + ni) % ni);
}

void require_periodic(const WindowSpec& w) {
  w.validate();
  if (!w.periodic) throw std::invalid_argument("stft-direct: periodic window convention required");
}

void require_model(const MeasurementSet& y, const WindowSpec& w) {
  if (y.model.kind != ModelKind::Stft) throw std::invalid_argument("stft-direct: STFT model required, got " + to_string(y.model.kind));
  const std::size_t n = y.model.n;
  if (y.model.ntilde != n || y.model.k != n) throw std::invalid_argument("stft-direct: requires ntilde = K = N");
  if (w.length() != n) throw std::invalid_argument("stft-direct: window length differs from N");
  if (y.rows != w.frames() || y.cols != n) throw std::invalid_argument("stft-direct: measurement shape does not match the window");
}

// First column of the circulant G_l (L = 1): g[p] = d[p] conj(d[p - l]).
CVec circulant_column(const WindowSpec& w, std::ptrdiff_t ell) {
  const std::size_t n = w.length();
  CVec g(n);
  for (std::size_t p = 0; p < n; ++p)
    g[p] = w.d[p] * std::conj(w.d[wrap(static_cast<std::ptrdiff_t>(p) - ell, n)]);
  return g;
}

// Pseudoinverse solve of the circulant system G v = b via transform-domain division.
CVec circulant_solve(const CVec& column, const CVec& b) {
  CVec gh = fft(column);
  CVec bh = fft(b);
  double peak = 0.0;
  for (const auto& v : gh) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < gh.size(); ++i)
    bh[i] = (peak > 0.0 && std::abs(gh[i]) > kCutoff * peak) ? bh[i] / gh[i] : cd{0.0, 0.0};
  return ifft(bh);
}

CVec column_of(const CVec& ytilde, std::size_t rows, std::size_t n, std::ptrdiff_t ell) {
  CVec b(rows);
  const std::size_t col = wrap(ell, n);
  for (std::size_t m = 0; m < rows; ++m) b[m] = ytilde[m * n + col];
  return b;
}

// Assembles X_0 from diagonals 0..W-1 (negative ones by conjugate symmetry) and
// returns the scaled principal eigenvector.
Signal assemble(std::size_t n, std::size_t width, const std::function<CVec(std::ptrdiff_t)>& diag) {
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd x0 = Eigen::MatrixXcd::Zero(ni, ni);
  CVec d0;
  for (std::size_t l = 0; l < std::min(width, n); ++l) {
    const CVec v = diag(static_cast<std::ptrdiff_t>(l));
    if (l == 0) d0 = v;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>((i + l) % n);
      x0(r, c) = v[i];
      x0(c, r) = std::conj(v[i]);
    }
  }
  x0 = 0.5 * (x0 + x0.adjoint());
  double mass = 0.0;
  bool any = false;
  for (const auto& v : d0)
    if (v.real() > 0.0) {
      mass += v.real();
      any = true;
    }
  if (!any) throw EmptyP("stft-direct: no positive entry in the main-diagonal estimate");
  const EigenDecomposition ed = hermitian_eig(x0, 1e-8);
  CVec out(n);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::sqrt(mass) * ed.vectors(static_cast<Eigen::Index>(i), 0);
    if (std::abs(out[i]) > std::abs(out[peak])) peak = i;
  }
  const cd rot = std::abs(out[peak]) > 0.0 ? std::conj(out[peak]) / std::abs(out[peak]) : cd{1.0, 0.0};
  for (auto& v : out) v *= rot;
  return Signal(std::move(out));
}

}  // namespace

Eigen::MatrixXcd build_G(const WindowSpec& w, std::ptrdiff_t ell) {
  require_periodic(w);
  const std::size_t n = w.length();
  const std::size_t rows = w.frames();
  Eigen::MatrixXcd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < rows; ++m)
    for (std::size_t i = 0; i < n; ++i) {
      const auto base = static_cast<std::ptrdiff_t>(m * w.hop) - static_cast<std::ptrdiff_t>(i);
      g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) =
          w.d[wrap(base, n)] * std::conj(w.d[wrap(base - ell, n)]);
    }
  return g;
}

CVec stft_ytilde(const MeasurementSet& y) {
  if (y.model.kind != ModelKind::Stft) throw std::invalid_argument("stft_ytilde: STFT model required");
  const std::size_t n = y.cols;
  CVec out(y.rows * n);
  CVec row(n);
  for (std::size_t m = 0; m < y.rows; ++m) {
    for (std::size_t k = 0; k < n; ++k) row[k] = y.at(m, k);
    fft_inplace(row, false);
    for (std::size_t l = 0; l < n; ++l) out[m * n + l] = row[l] / double(n);
  }
  return out;
}

DiagonalSystem build_system(const MeasurementSet& y, const WindowSpec& w, std::ptrdiff_t ell) {
  require_periodic(w);
  require_model(y, w);
  DiagonalSystem s;
  s.ell = ell;
  s.g = build_G(w, ell);
  const CVec yt = stft_ytilde(y);
  const CVec b = column_of(yt, y.rows, y.model.n, ell);
  s.ytilde = Eigen::Map<const Eigen::VectorXcd>(b.data(), static_cast<Eigen::Index>(b.size()));
  return s;
}

CVec circular_diagonal(const Eigen::MatrixXcd& x, std::ptrdiff_t ell) {
  const auto n = static_cast<std::size_t>(x.rows());
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(wrap(static_cast<std::ptrdiff_t>(i) + ell, n)));
  return out;
}

bool is_admissible(const WindowSpec& w, std::size_t n) {
  require_periodic(w);
  if (w.hop != 1) throw std::invalid_argument("is_admissible: hop L = 1 required");
  if (w.length() != n) throw std::invalid_argument("is_admissible: window length differs from N");
  // Width one still needs the first off-diagonal, otherwise relative phases are undetermined.
  const auto reach = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(w.width) - 1, 1);
  for (std::ptrdiff_t l = -reach; l <= reach; ++l) {
    const CVec gh = fft(circulant_column(w, l));
    double peak = 0.0, low = std::numeric_limits<double>::infinity();
    for (const auto& v : gh) {
      peak = std::max(peak, std::abs(v));
      low = std::min(low, std::abs(v));
    }
    if (!(peak > 0.0) || low <= kCutoff * peak) return false;
  }
  return true;
}

Signal stft_ls_recover(const MeasurementSet& y, const WindowSpec& w) {
  require_periodic(w);
  require_model(y, w);
  if (w.hop != 1) throw std::invalid_argument("stft_ls_recover: hop L = 1 required");
  const std::size_t n = y.model.n;
  if (!is_admissible(w, n)) throw NotAdmissible("stft_ls_recover: window is not admissible");
  const CVec yt = stft_ytilde(y);
  return assemble(n, w.width, [&](std::ptrdiff_t l) {
    return circulant_solve(circulant_column(w, l), column_of(yt, y.rows, n, l));
  });
}

Signal stft_init_heuristic(const MeasurementSet& y, const WindowSpec& w, double lambda) {
  require_periodic(w);
  require_model(y, w);
  if (!(lambda >= 0.0)) throw std::invalid_argument("stft_init_heuristic: lambda must be nonnegative");
  const std::size_t n = y.model.n;
  const CVec yt = stft_ytilde(y);
  return assemble(n, w.width, [&](std::ptrdiff_t l) {
    const Eigen::MatrixXcd g = build_G(w, l);
    const CVec bcol = column_of(yt, y.rows, n, l);
    const Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(bcol.data(), static_cast<Eigen::Index>(bcol.size()));
    Eigen::MatrixXcd normal = g.adjoint() * g;
    const double mean_eig = normal.trace().real() / double(n);
    normal.diagonal().array() += lambda * mean_eig + std::numeric_limits<double>::min();
    const Eigen::VectorXcd v = normal.ldlt().solve(g.adjoint() * b);
    return CVec(v.data(), v.data() + v.size());
  });
}

}  // namespace phaseless
