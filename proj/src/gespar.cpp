#include "phaseless/gespar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "phaseless/gradient.hpp"
#include "phaseless/parallel.hpp"

namespace phaseless {
namespace {

// Columns A e_n of the measurement operator, one per signal index.
struct Columns {
  std::vector<CVec> col;
  explicit Columns(const MaskedOperator& op) : col(op.length()) {
    CVec e(op.length(), cd{0.0, 0.0});
    for (std::size_t n = 0; n < op.length(); ++n) {
      e[n] = 1.0;
      col[n] = op.apply(e);
      e[n] = 0.0;
    }
  }
};

struct Problem {
  MaskedOperator op;
  Columns cols;
  std::vector<double> y;
  double energy = 0.0;  // sum y^2

  Problem(const MeasurementSet& m) : op(m.model), cols(op), y(m.y) {
    if (y.size() != op.rows() * op.cols()) throw std::invalid_argument("gespar: measurement size mismatch");
    for (double v : y) energy += v * v;
  }

  CVec forward(const CVec& z, const std::vector<std::size_t>& s) const {
    CVec w(y.size(), cd{0.0, 0.0});
    for (auto n : s)
      if (z[n] != cd{0.0, 0.0})
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += cols.col[n][i] * z[n];
    return w;
  }

  double objective(const CVec& w) const {
    double f = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double r = std::norm(w[i]) - y[i];
      f += r * r;
    }
    return f;
  }
};

GaussNewtonResult solve_inner(const Problem& pb, const std::vector<std::size_t>& support, CVec z,
                              const GaussNewtonOptions& opt) {
  const std::size_t s = support.size();
  const std::size_t per = opt.real_valued ? 1 : 2;
  const auto p = static_cast<Eigen::Index>(per * s);
  const auto m = static_cast<Eigen::Index>(pb.y.size());
  std::vector<bool> in(z.size(), false);
  for (auto n : support) in[n] = true;
  for (std::size_t n = 0; n < z.size(); ++n)
    if (!in[n]) z[n] = 0.0;
  if (opt.real_valued)
    for (auto& v : z) v = v.real();

  GaussNewtonResult res{Signal(z), 0.0, {}, 0};
  CVec w = pb.forward(z, support);
  double f = pb.objective(w);
  res.trace.push_back(f);

  Eigen::MatrixXd jac(m, p);
  Eigen::VectorXd r(m);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    // r_i = |w_i|^2 - y_i; d r_i / d Re z_n = 2 Re(conj(w_i) a_in), d r_i / d Im z_n = -2 Im(conj(w_i) a_in).
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      r[i] = std::norm(w[iu]) - pb.y[iu];
      for (std::size_t j = 0; j < s; ++j) {
        const cd t = std::conj(w[iu]) * pb.cols.col[support[j]][iu];
        jac(i, static_cast<Eigen::Index>(per * j)) = 2.0 * t.real();
        if (!opt.real_valued) jac(i, static_cast<Eigen::Index>(per * j + 1)) = -2.0 * t.imag();
      }
    }
    const Eigen::VectorXd grad = 2.0 * jac.transpose() * r;
    ++res.iterations;
    if (grad.norm() < opt.tol) break;

    Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const double scale = std::max(normal.diagonal().maxCoeff(), std::numeric_limits<double>::min());
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12) {
      // Rotation leaves the loss invariant, so the complex normal matrix is singular by construction.
      normal.diagonal().array() += 1e-8 * scale;
      ldlt.compute(normal);
      if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-15)
        throw SingularJacobian("damped_gauss_newton: normal matrix singular after ridge regularization");
    }
    const Eigen::VectorXd step = ldlt.solve(-(jac.transpose() * r));

    double t = 1.0;
    bool accepted = false;
    CVec trial = z;
    CVec wt;
    double ft = f;
    for (std::size_t h = 0; h <= opt.max_halvings; ++h) {
      for (std::size_t j = 0; j < s; ++j) {
        const double re = step[static_cast<Eigen::Index>(per * j)];
        const double im = opt.real_valued ? 0.0 : step[static_cast<Eigen::Index>(per * j + 1)];
        trial[support[j]] = z[support[j]] + t * cd{re, im};
      }
      wt = pb.forward(trial, support);
      ft = pb.objective(wt);
      if (ft < f) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    z = std::move(trial);
    w = std::move(wt);
    f = ft;
    res.trace.push_back(f);
  }
  res.z = Signal(std::move(z));
  res.objective = f;
  return res;
}

// Full-loss gradient magnitude at every index (for the add rule).
std::vector<double> gradient_magnitudes(const Problem& pb, const CVec& w) {
  CVec rw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) rw[i] = 4.0 * (std::norm(w[i]) - pb.y[i]) * w[i];
  const CVec g = pb.op.adjoint(rw);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::abs(g[i]);
  return out;
}

std::vector<std::size_t> random_support(std::size_t n, std::size_t s, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < s; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(s);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct RestartOutcome {
  RestartRecord record;
  CVec z;
};

RestartOutcome run_restart(const Problem& pb, std::size_t s, const GesparOptions& opt, Rng rng) {
  const std::size_t n = pb.op.length();
  const std::size_t max_swaps = opt.max_swaps == 0 ? 2 * s : opt.max_swaps;
  std::vector<std::size_t> support = random_support(n, s, rng);

  CVec z(n, cd{0.0, 0.0});
  for (auto i : support) z[i] = opt.inner.real_valued ? cd{rng.normal(), 0.0} : rng.complex_normal();
  // Match the measured energy so the quartic loss starts at a sensible scale.
  {
    const CVec w = pb.forward(z, support);
    double model = 0.0, data = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      model += std::norm(w[i]);
      data += std::max(0.0, pb.y[i]);
    }
    if (model > 0.0)
      for (auto& v : z) v *= std::sqrt(data / model);
  }

  GaussNewtonResult cur = solve_inner(pb, support, z, opt.inner);
  RestartOutcome out;
  out.record.initial_objective = cur.objective;
  const double target = opt.success_tol * pb.energy;

  std::size_t failures = 0;
  bool progress = true;
  while (progress && failures < max_swaps && cur.objective >= target) {
    progress = false;
    CVec zc(cur.z.vec());
    const std::vector<double> gmag = gradient_magnitudes(pb, pb.forward(zc, support));
    std::vector<std::size_t> remove = support;
    std::stable_sort(remove.begin(), remove.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(zc[a]) < std::abs(zc[b]); });
    std::vector<bool> in(n, false);
    for (auto i : support) in[i] = true;
    std::vector<std::size_t> add;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i]) add.push_back(i);
    std::stable_sort(add.begin(), add.end(), [&](std::size_t a, std::size_t b) { return gmag[a] > gmag[b]; });

    for (std::size_t a = 0; a < remove.size() && !progress && failures < max_swaps; ++a) {
      for (std::size_t b = 0; b < add.size() && !progress && failures < max_swaps; ++b) {
        std::vector<std::size_t> trial_support = support;
        *std::find(trial_support.begin(), trial_support.end(), remove[a]) = add[b];
        std::sort(trial_support.begin(), trial_support.end());
        CVec z0 = zc;
        z0[remove[a]] = 0.0;
        GaussNewtonResult trial = solve_inner(pb, trial_support, z0, opt.inner);
        if (trial.objective < cur.objective) {
          cur = std::move(trial);
          support = std::move(trial_support);
          out.record.accepted.push_back(cur.objective);
          failures = 0;
          progress = true;
        } else {
          ++failures;
        }
      }
    }
  }
  out.record.final_objective = cur.objective;
  out.record.support = support;
  out.z = cur.z.vec();
  return out;
}

}  // namespace

GaussNewtonResult damped_gauss_newton(const MeasurementSet& y, const std::vector<std::size_t>& support,
                                      const Signal& z0, const GaussNewtonOptions& opt) {
  const Problem pb(y);
  if (z0.size() != pb.op.length()) throw std::invalid_argument("damped_gauss_newton: initial signal length mismatch");
  if (support.empty()) throw std::invalid_argument("damped_gauss_newton: empty support");
  for (auto i : support)
    if (i >= z0.size()) throw std::invalid_argument("damped_gauss_newton: support index out of range");
  return solve_inner(pb, support, z0.vec(), opt);
}

std::pair<Signal, GesparReport> gespar(const MeasurementSet& y, std::size_t s, const GesparOptions& opt,
                                       const Rng& rng) {
  const Problem pb(y);
  const std::size_t n = pb.op.length();
  if (s < 1 || s > n) throw std::invalid_argument("gespar: sparsity must lie in [1, N]");
  if (opt.restarts < 1) throw std::invalid_argument("gespar: at least one restart required");

  std::vector<std::optional<RestartOutcome>> results(opt.restarts);
  std::atomic<std::size_t> first_success{opt.restarts};
  const double target = opt.success_tol * pb.energy;
  parallel_for(opt.restarts, opt.jobs, [&](std::size_t r) {
    if (opt.stop_on_success && r > first_success.load()) return;
    RestartOutcome o = run_restart(pb, s, opt, rng.child(r));
    if (o.record.final_objective < target) {
      std::size_t cur = first_success.load();
      while (r < cur && !first_success.compare_exchange_weak(cur, r)) {
      }
    }
    results[r] = std::move(o);
  });

  const std::size_t last = opt.stop_on_success ? std::min(first_success.load() + 1, opt.restarts) : opt.restarts;
  GesparReport rep;
  rep.best_objective = std::numeric_limits<double>::infinity();
  CVec best;
  for (std::size_t r = 0; r < last; ++r) {
    RestartOutcome& o = *results[r];
    if (o.record.final_objective < rep.best_objective) {
      rep.best_objective = o.record.final_objective;
      rep.best_restart = r;
      best = o.z;
    }
    rep.restarts.push_back(std::move(o.record));
  }
  rep.success = rep.best_objective < target;
  return {Signal(std::move(best)), std::move(rep)};
}

}  // namespace phaseless
