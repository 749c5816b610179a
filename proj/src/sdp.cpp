#include "phaseless/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace phaseless {
namespace {

// Orthonormal real coordinates of a Hermitian matrix: the N diagonal entries,
// then sqrt(2) Re X[p,q] and sqrt(2) Im X[p,q] for p < q.
std::size_t vec_size(std::size_t n) { return n * n; }

Eigen::VectorXd hvec(const Eigen::MatrixXcd& h) {
  const auto n = static_cast<std::size_t>(h.rows());
  Eigen::VectorXd v(static_cast<Eigen::Index>(vec_size(n)));
  Eigen::Index k = 0;
  const double r2 = std::numbers::sqrt2;
  for (Eigen::Index p = 0; p < h.rows(); ++p) v[k++] = h(p, p).real();
  for (Eigen::Index p = 0; p < h.rows(); ++p)
    for (Eigen::Index q = p + 1; q < h.rows(); ++q) {
      const cd e = 0.5 * (h(p, q) + std::conj(h(q, p)));
      v[k++] = r2 * e.real();
      v[k++] = r2 * e.imag();
    }
  return v;
}

Eigen::MatrixXcd hmat(const Eigen::VectorXd& v, std::size_t n) {
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd h(ni, ni);
  Eigen::Index k = 0;
  const double s = 1.0 / std::numbers::sqrt2;
  for (Eigen::Index p = 0; p < ni; ++p) h(p, p) = v[k++];
  for (Eigen::Index p = 0; p < ni; ++p)
    for (Eigen::Index q = p + 1; q < ni; ++q) {
      const cd e{s * v[k], s * v[k + 1]};
      k += 2;
      h(p, q) = e;
      h(q, p) = std::conj(e);
    }
  return h;
}

// Coordinates of the Hermitian matrix A with <A, X> = a* X a.
Eigen::VectorXd rank_one_row(const CVec& a) {
  const std::size_t n = a.size();
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = a[p] * std::conj(a[q]);
  return hvec(h);
}

struct RealRows {
  Eigen::MatrixXd a;  // rows x vec_size
  Eigen::VectorXd lo, hi;
};

RealRows expand(const SdpProblem& p) {
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> lo, hi;
  const auto push = [&](Eigen::VectorXd r, double l, double h) {
    if (r.norm() == 0.0) {
      if (l > 0.0 || h < 0.0) throw std::invalid_argument("admm_solve: zero constraint row with non-zero target");
      return;
    }
    rows.push_back(std::move(r));
    lo.push_back(l);
    hi.push_back(h);
  };
  for (const auto& c : p.constraints) {
    switch (c.kind) {
      case SdpConstraint::Kind::RankOne:
        push(rank_one_row(c.vector), c.lower, c.upper);
        break;
      case SdpConstraint::Kind::Hermitian:
        push(hvec(c.matrix), c.lower, c.upper);
        break;
      case SdpConstraint::Kind::Linear: {
        // Re trace(T X) = trace(T_re X), Im trace(T X) = trace(T_im X) with Hermitian T_re, T_im.
        const Eigen::MatrixXcd t_re = 0.5 * (c.matrix + c.matrix.adjoint());
        const Eigen::MatrixXcd t_im = cd{0.0, -0.5} * (c.matrix - c.matrix.adjoint());
        push(hvec(t_re), c.target.real(), c.target.real());
        push(hvec(t_im), c.target.imag(), c.target.imag());
        break;
      }
    }
  }
  RealRows out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(vec_size(p.n));
  out.a.resize(m, d);
  out.lo.resize(m);
  out.hi.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.a.row(i) = rows[static_cast<std::size_t>(i)].transpose();
    out.lo[i] = lo[static_cast<std::size_t>(i)];
    out.hi[i] = hi[static_cast<std::size_t>(i)];
  }
  return out;
}

void check_square(const Eigen::MatrixXcd& h, const char* who) {
  if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument(std::string(who) + ": square non-empty matrix required");
}

}  // namespace

EigenDecomposition hermitian_eig(const HermitianMatrix& h, double tol) {
  check_square(h, "hermitian_eig");
  const double fro = h.norm();
  if ((h - h.adjoint()).norm() > tol * std::max(1.0, fro)) throw NotHermitian("hermitian_eig: matrix is not Hermitian");
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: eigensolver failed");
  const Eigen::Index n = h.rows();
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

HermitianMatrix project_psd(const HermitianMatrix& h) {
  check_square(h, "project_psd");
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd& v = es.eigenvectors();
  HermitianMatrix out = v * lam.asDiagonal() * v.adjoint();
  return 0.5 * (out + out.adjoint());
}

HermitianMatrix outer(const Signal& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = x[static_cast<std::size_t>(i)];
  return v * v.adjoint();
}

void SdpProblem::validate() const {
  if (n == 0) throw std::invalid_argument("SdpProblem: N must be positive");
  const auto ni = static_cast<Eigen::Index>(n);
  if (objective.rows() != ni || objective.cols() != ni) throw std::invalid_argument("SdpProblem: objective shape mismatch");
  if ((objective - objective.adjoint()).norm() > 1e-12 * std::max(1.0, objective.norm()))
    throw NotHermitian("SdpProblem: objective not Hermitian");
  for (const auto& c : constraints) {
    switch (c.kind) {
      case SdpConstraint::Kind::RankOne:
        if (c.vector.size() != n) throw std::invalid_argument("SdpProblem: constraint vector length mismatch");
        break;
      case SdpConstraint::Kind::Hermitian:
        if (c.matrix.rows() != ni || c.matrix.cols() != ni) throw std::invalid_argument("SdpProblem: constraint shape mismatch");
        if ((c.matrix - c.matrix.adjoint()).norm() > 1e-12 * std::max(1.0, c.matrix.norm()))
          throw NotHermitian("SdpProblem: constraint matrix not Hermitian");
        break;
      case SdpConstraint::Kind::Linear:
        if (c.matrix.rows() != ni || c.matrix.cols() != ni) throw std::invalid_argument("SdpProblem: constraint shape mismatch");
        break;
    }
    if (c.kind != SdpConstraint::Kind::Linear && !(c.lower <= c.upper))
      throw std::invalid_argument("SdpProblem: empty constraint interval");
  }
}

std::string SdpReport::trace_csv() const {
  std::string out = "iteration,primal,dual,objective\n";
  char buf[128];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.iteration, r.primal, r.dual, r.objective);
    out += buf;
  }
  return out;
}

NotConverged::NotConverged(SdpReport report, HermitianMatrix last)
    : std::runtime_error("admm_solve: not converged after " + std::to_string(report.iterations) +
                         " iterations (primal " + std::to_string(report.primal_residual) + ", dual " +
                         std::to_string(report.dual_residual) + ")"),
      report_(std::move(report)),
      last_(std::move(last)) {}

std::pair<HermitianMatrix, SdpReport> admm_solve(const SdpProblem& p, const AdmmOptions& opt) {
  p.validate();
  if (!(opt.rho > 0.0) || !(opt.tol > 0.0)) throw std::invalid_argument("admm_solve: rho and tol must be positive");
  if (!(opt.relaxation > 0.0 && opt.relaxation < 2.0))
    throw std::invalid_argument("admm_solve: relaxation must lie in (0, 2)");
  const std::size_t n = p.n;
  RealRows rr = expand(p);
  const Eigen::Index m = rr.a.rows();
  const auto d = static_cast<Eigen::Index>(vec_size(n));

  // Unit-norm rows, then scale the data so the largest bound is 1.
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = rr.a.row(i).norm();
    rr.a.row(i) /= s;
    rr.lo[i] /= s;
    rr.hi[i] /= s;
  }
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) scale = std::max({scale, std::abs(rr.lo[i]), std::abs(rr.hi[i])});
  if (scale == 0.0) scale = 1.0;
  rr.lo /= scale;
  rr.hi /= scale;

  Eigen::VectorXd c = hvec(p.objective);
  if (p.maximize) c = -c;
  const double cnorm = c.norm();
  if (cnorm > 0.0) c /= cnorm;

  // (I + A^T A)^{-1}, dense and cached.
  Eigen::MatrixXd inv;
  if (m < d) {
    Eigen::MatrixXd small = Eigen::MatrixXd::Identity(m, m) + rr.a * rr.a.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(small);
    inv = Eigen::MatrixXd::Identity(d, d) - rr.a.transpose() * llt.solve(rr.a);
  } else {
    Eigen::MatrixXd big = Eigen::MatrixXd::Identity(d, d) + rr.a.transpose() * rr.a;
    Eigen::LLT<Eigen::MatrixXd> llt(big);
    inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
  }
  const Eigen::MatrixXd inv_at = inv * rr.a.transpose();

  double rho = opt.rho;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d), z = Eigen::VectorXd::Zero(d), u = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd s = rr.lo.cwiseMax(0.0).cwiseMin(rr.hi), v = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd ax(m);

  SdpReport rep;
  bool converged = false;
  Eigen::MatrixXcd zmat = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    x = inv * (z - u - c / rho) + inv_at * (s - v);
    ax.noalias() = rr.a * x;

    const Eigen::VectorXd z_old = z, s_old = s;
    const Eigen::VectorXd xr = opt.relaxation * x + (1.0 - opt.relaxation) * z_old;
    const Eigen::VectorXd axr = opt.relaxation * ax + (1.0 - opt.relaxation) * s_old;
    zmat = project_psd(hmat(xr + u, n));
    z = hvec(zmat);
    s = (axr + v).cwiseMax(rr.lo).cwiseMin(rr.hi);

    const Eigen::VectorXd rx = x - z;
    const Eigen::VectorXd rs = ax - s;
    u += xr - z;
    v += axr - s;

    const double primal = std::sqrt(rx.squaredNorm() + rs.squaredNorm());
    const double dual = rho * ((z - z_old) + rr.a.transpose() * (s - s_old)).norm();
    rep.iterations = it;
    rep.primal_residual = primal;
    rep.dual_residual = dual;
    if (opt.record_trace && (it % opt.trace_every == 0 || it == 1))
      rep.trace.push_back({it, primal, dual, c.dot(z) * cnorm * scale * (p.maximize ? -1.0 : 1.0)});
    if (std::max(primal, dual) < opt.tol) {
      converged = true;
      break;
    }
    if (opt.adaptive_rho && it % opt.adapt_interval == 0 && (opt.adapt_until == 0 || it <= opt.adapt_until)) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u /= 2.0;
        v /= 2.0;
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        u *= 2.0;
        v *= 2.0;
      }
    }
  }

  HermitianMatrix out = zmat * scale;
  rep.objective = (p.objective.adjoint() * out).trace().real();
  rep.spectrum = hermitian_eig(out, 1e-8).values;
  if (!converged) throw NotConverged(std::move(rep), std::move(out));
  return {std::move(out), std::move(rep)};
}

namespace {

CVec measurement_vector(const CVec& mask, std::size_t ntilde, std::size_t k) {
  const std::size_t n = mask.size();
  CVec a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ang = 2.0 * std::numbers::pi * double((k * i) % ntilde) / double(ntilde);
    a[i] = std::conj(mask[i]) * std::polar(1.0, ang);
  }
  return a;
}

SdpProblem trace_program(const MeasurementSet& y, const std::vector<CVec>& masks, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("SDP builder: eps must be nonnegative");
  if (y.rows != masks.size()) throw std::invalid_argument("SDP builder: mask count differs from measurement rows");
  const std::size_t n = y.model.n;
  SdpProblem p;
  p.n = n;
  p.objective = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < masks.size(); ++m) {
    if (masks[m].size() != n) throw std::invalid_argument("SDP builder: mask length mismatch");
    for (std::size_t k = 0; k < y.cols; ++k) {
      CVec a = measurement_vector(masks[m], y.model.ntilde, k);
      const double b = y.at(m, k);
      p.constraints.push_back(eps == 0.0 ? SdpConstraint::rank_one(std::move(a), b)
                                         : SdpConstraint::rank_one_interval(std::move(a), b - eps, b + eps));
    }
  }
  return p;
}

}  // namespace

SdpProblem build_masked_trace(const MeasurementSet& y, const MaskSet& masks) {
  masks.validate();
  return trace_program(y, masks.masks, 0.0);
}

SdpProblem build_masked_noisy(const MeasurementSet& y, const MaskSet& masks, double eps) {
  masks.validate();
  return trace_program(y, masks.masks, eps);
}

SdpProblem build_trace_from_model(const MeasurementSet& y, double eps) {
  return trace_program(y, row_masks(y.model), eps);
}

SdpProblem build_minphase(const CVec& a) {
  if (a.empty() || a.size() % 2 == 0) throw std::invalid_argument("build_minphase: autocorrelation length must be 2N-1");
  const std::size_t n = (a.size() + 1) / 2;
  const auto ni = static_cast<Eigen::Index>(n);
  SdpProblem p;
  p.n = n;
  p.maximize = true;
  p.objective = Eigen::MatrixXcd::Zero(ni, ni);
  p.objective(0, 0) = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    // trace(Theta_k X) = sum_m X[m+k, m] = a[k].
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(ni, ni);
    for (std::size_t i = 0; i + k < n; ++i) theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + k)) = 1.0;
    p.constraints.push_back(SdpConstraint::linear(std::move(theta), a[n - 1 + k]));
  }
  return p;
}

SdpProblem build_stft_sdp(const MeasurementSet& y, const WindowSpec& w, const std::optional<CVec>& known_prefix) {
  if (y.model.kind != ModelKind::Stft) throw std::invalid_argument("build_stft_sdp: STFT model required");
  if (y.model.ntilde != y.model.n) throw std::invalid_argument("build_stft_sdp: requires ntilde = N");
  w.validate();
  const std::size_t n = y.model.n;
  std::vector<CVec> masks(w.frames(), CVec(n));
  for (std::size_t m = 0; m < masks.size(); ++m)
    for (std::size_t i = 0; i < n; ++i) masks[m][i] = w.shifted(m, i);
  SdpProblem p = trace_program(y, masks, 0.0);
  if (known_prefix) {
    const CVec& x = *known_prefix;
    if (x.size() > n) throw std::invalid_argument("build_stft_sdp: known prefix longer than N");
    const auto ni = static_cast<Eigen::Index>(n);
    for (std::size_t r = 0; r < x.size(); ++r)
      for (std::size_t q = r; q < x.size(); ++q) {
        // trace(E_{q,r} X) = X[r, q] = x[r] conj(x[q]).
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(ni, ni);
        e(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(r)) = 1.0;
        p.constraints.push_back(SdpConstraint::linear(std::move(e), x[r] * std::conj(x[q])));
      }
  }
  return p;
}

std::pair<Signal, double> extract_rank_one(const HermitianMatrix& x) {
  const EigenDecomposition ed = hermitian_eig(x, 1e-8);
  const double l1 = std::max(ed.values[0], 0.0);
  const double l2 = ed.values.size() > 1 ? std::max(ed.values[1], 0.0) : 0.0;
  CVec v(static_cast<std::size_t>(x.rows()));
  const double s = std::sqrt(l1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * ed.vectors(static_cast<Eigen::Index>(i), 0);
  for (const auto& e : v) {
    if (std::abs(e) > 1e-14 * s) {
      const cd rot = std::conj(e) / std::abs(e);
      for (auto& f : v) f *= rot;
      break;
    }
  }
  const double quality = l1 > 0.0 ? l2 / l1 : 1.0;
  return {Signal(std::move(v)), quality};
}

}  // namespace phaseless
