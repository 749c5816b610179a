#include "phaseless/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phaseless {
namespace {

constexpr double kEps = 2.220446049250313e-16;

// p(z), p'(z) and the rounding-error scale sum |p_k| |z|^k by Horner.
void horner(std::span<const cd> p, cd z, cd& value, cd& deriv, double& scale) {
  value = p.back();
  deriv = 0.0;
  scale = std::abs(p.back());
  const double az = std::abs(z);
  for (std::size_t i = p.size() - 1; i-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + p[i];
    scale = scale * az + std::abs(p[i]);
  }
}

double relative_residual(std::span<const cd> p, cd z) {
  cd v, d;
  double s;
  horner(p, z, v, d, s);
  return s > 0.0 ? std::abs(v) / s : 0.0;
}

CVec companion_roots(std::span<const cd> p) {
  const std::size_t deg = p.size() - 1;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) c(i, deg - 1) = -p[i] / p[deg];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  CVec out(deg);
  for (std::size_t i = 0; i < deg; ++i) out[i] = es.eigenvalues()[static_cast<Eigen::Index>(i)];
  return out;
}

CVec aberth(std::span<const cd> p, int& iterations, bool& converged) {
  const std::size_t deg = p.size() - 1;
  // Start on a circle at the geometric-mean root modulus, with an irrational offset
  // so no start sits on a symmetry line of a real polynomial.
  const double radius = std::pow(std::abs(p[0]) / std::abs(p[deg]), 1.0 / double(deg));
  CVec z(deg);
  for (std::size_t i = 0; i < deg; ++i)
    z[i] = std::polar(radius, 2.0 * std::numbers::pi * double(i) / double(deg) + 0.4);

  std::vector<bool> done(deg, false);
  converged = false;
  for (iterations = 0; iterations < 500; ++iterations) {
    bool all_done = true;
    for (std::size_t i = 0; i < deg; ++i) {
      if (done[i]) continue;
      cd v, d;
      double scale;
      horner(p, z[i], v, d, scale);
      if (std::abs(v) <= 4.0 * kEps * scale) {
        done[i] = true;
        continue;
      }
      all_done = false;
      const cd ratio = v / d;
      cd sum{0.0, 0.0};
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const cd step = ratio / (1.0 - ratio * sum);
      z[i] -= step;
      if (std::abs(step) <= 4.0 * kEps * std::abs(z[i])) done[i] = true;
    }
    if (all_done) {
      converged = true;
      break;
    }
  }
  if (!converged) converged = std::all_of(done.begin(), done.end(), [](bool b) { return b; });
  return z;
}

}  // namespace

cd poly_eval(std::span<const cd> coeffs, cd z) {
  cd v{0.0, 0.0};
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * z + coeffs[i];
  return v;
}

CVec poly_from_roots(std::span<const cd> roots) {
  CVec c{cd{1.0, 0.0}};
  for (const auto& r : roots) {
    CVec next(c.size() + 1, cd{0.0, 0.0});
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  return c;
}

CVec polynomial_roots(std::span<const cd> coeffs, RootSolveInfo* info, double residual_tol) {
  std::size_t hi = coeffs.size();
  while (hi > 0 && coeffs[hi - 1] == cd{0.0, 0.0}) --hi;
  if (hi == 0) throw std::invalid_argument("polynomial_roots: zero polynomial");
  std::size_t lo = 0;
  while (coeffs[lo] == cd{0.0, 0.0}) ++lo;

  CVec roots(lo, cd{0.0, 0.0});
  const std::span<const cd> p = coeffs.subspan(lo, hi - lo);
  RootSolveInfo local;
  if (p.size() >= 2) {
    CVec r;
    if (p.size() == 2) {
      r = {-p[0] / p[1]};
    } else {
      bool converged = false;
      r = aberth(p, local.iterations, converged);
      double worst = 0.0;
      for (const auto& z : r) worst = std::max(worst, relative_residual(p, z));
      if (!converged || worst > residual_tol) {
        r = companion_roots(p);
        local.used_companion = true;
      }
    }
    for (const auto& z : r) local.max_residual = std::max(local.max_residual, relative_residual(p, z));
    roots.insert(roots.end(), r.begin(), r.end());
  }
  if (info) *info = local;
  return roots;
}

}  // namespace phaseless
