#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phaseless/ambiguity.hpp"
#include "phaseless/sdp.hpp"

using namespace phaseless;
using namespace testutil;

namespace {

HermitianMatrix random_hermitian(std::size_t n, Rng& rng) {
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.complex_normal();
  return (a + a.adjoint()) / 2.0;
}

HermitianMatrix unit(std::size_t n, std::size_t i, std::size_t j) {
  HermitianMatrix e = HermitianMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

double min_eig(const HermitianMatrix& x) { return hermitian_eig(x, 1e-8).values.minCoeff(); }

}  // namespace

TEST_CASE("hermitian_eig examples") {
  const auto id = hermitian_eig(HermitianMatrix::Identity(4, 4));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(id.values[i] - 1.0) < 1e-14);

  HermitianMatrix d = HermitianMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 3.0, -2.0;
  const auto e = hermitian_eig(d);
  CHECK(std::abs(e.values[0] - 3.0) < 1e-14);
  CHECK(std::abs(e.values[1] - 1.0) < 1e-14);
  CHECK(std::abs(e.values[2] + 2.0) < 1e-14);

  const Signal x = complex_signal(6, 1);
  const auto r = hermitian_eig(outer(x));
  CHECK(std::abs(r.values[0] - x.norm_sq()) < 1e-12 * x.norm_sq());
  for (Eigen::Index i = 1; i < 6; ++i) CHECK(std::abs(r.values[i]) < 1e-10);

  HermitianMatrix nh = HermitianMatrix::Identity(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(nh), NotHermitian);
}

TEST_CASE("hermitian_eig residual and orthonormality on random matrices") {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.index(32);
    const HermitianMatrix h = random_hermitian(n, rng);
    const auto e = hermitian_eig(h);
    const HermitianMatrix rec = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
    CHECK((h - rec).norm() < 1e-10 * h.norm());
    CHECK((e.vectors.adjoint() * e.vectors - HermitianMatrix::Identity(n, n)).norm() < 1e-10);
    for (Eigen::Index i = 1; i < e.values.size(); ++i) CHECK(e.values[i] <= e.values[i - 1]);
  }
}

TEST_CASE("project_psd examples") {
  HermitianMatrix d = HermitianMatrix::Zero(2, 2);
  d.diagonal() << 1.0, -1.0;
  HermitianMatrix expect = HermitianMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((project_psd(d) - expect).norm() < 1e-14);
  const HermitianMatrix psd = outer(complex_signal(5, 3)) + HermitianMatrix::Identity(5, 5);
  CHECK((project_psd(psd) - psd).norm() < 1e-12 * psd.norm());
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix h = random_hermitian(1 + rng.index(12), rng);
    const HermitianMatrix p = project_psd(h);
    CHECK((project_psd(p) - p).norm() < 1e-10 * std::max(1.0, p.norm()));
    CHECK(min_eig(p) > -1e-10 * std::max(1.0, p.norm()));
    // Frobenius-nearest: no PSD matrix from a random family is closer.
    for (int k = 0; k < 5; ++k) {
      const HermitianMatrix q = project_psd(random_hermitian(h.rows(), rng));
      CHECK((h - p).norm() <= (h - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("admm_solve analytic optima") {
  SdpProblem p1;
  p1.n = 3;
  p1.objective = HermitianMatrix::Identity(3, 3);
  p1.constraints.push_back(SdpConstraint::hermitian(unit(3, 0, 0), 1.0));
  const auto [x1, r1] = admm_solve(p1);
  CHECK(std::abs(r1.objective - 1.0) < 1e-6);
  CHECK((x1 - unit(3, 0, 0)).norm() < 1e-6);

  SdpProblem p2 = p1;
  p2.constraints.push_back(SdpConstraint::hermitian(unit(3, 0, 0), 2.0));
  AdmmOptions short_run;
  short_run.max_iter = 3000;
  try {
    admm_solve(p2, short_run);
    FAIL("infeasible problem converged");
  } catch (const NotConverged& e) {
    CHECK(e.report().primal_residual > 1e-3);
    CHECK(e.report().iterations == 3000);
  }

  SdpProblem p3;
  p3.n = 3;
  p3.objective = unit(3, 0, 0);
  p3.maximize = true;
  p3.constraints.push_back(SdpConstraint::hermitian(HermitianMatrix::Identity(3, 3), 1.0));
  const auto [x3, r3] = admm_solve(p3);
  CHECK(std::abs(r3.objective - 1.0) < 1e-6);
  CHECK(std::abs(x3(0, 0) - 1.0) < 1e-6);
}

TEST_CASE("admm_solve interval constraints and options") {
  // min trace s.t. X00 in [2, 5] -> X00 = 2.
  SdpProblem p;
  p.n = 2;
  p.objective = HermitianMatrix::Identity(2, 2);
  p.constraints.push_back(SdpConstraint::rank_one_interval(CVec{1.0, 0.0}, 2.0, 5.0));
  AdmmOptions o;
  o.record_trace = true;
  const auto [x, r] = admm_solve(p, o);
  CHECK(std::abs(r.objective - 2.0) < 1e-6);
  CHECK_FALSE(r.trace.empty());
  CHECK(r.trace_csv().rfind("iteration,primal,dual,objective\n", 0) == 0);
  AdmmOptions bad;
  bad.rho = 0.0;
  CHECK_THROWS_AS(admm_solve(p, bad), std::invalid_argument);
}

TEST_CASE("masked trace program recovers the signal and is homogeneous") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Signal x = complex_signal(8, seed);
    const MeasurementSet y = measure_masked(x, masks_fixed(8), 15, 15);
    const auto [sol, rep] = admm_solve(build_masked_trace(y, masks_fixed(8)));
    CHECK((sol - outer(x)).norm() < 1e-4 * x.norm_sq());
    CHECK(min_eig(sol) >= -1e-8 * rep.spectrum[0]);
    const auto [z, q] = extract_rank_one(sol);
    CHECK(q < 1e-3);
    CHECK(relative_error(x, z, TrivialGroup::rotation_only()) < 1e-4);

    MeasurementSet scaled = y;
    for (auto& v : scaled.y) v *= 3.0;
    const auto [sol3, rep3] = admm_solve(build_masked_trace(scaled, masks_fixed(8)));
    CHECK((sol3 - 3.0 * sol).norm() < 1e-4 * sol3.norm());
  }
}

TEST_CASE("trace program on classical data of a minimum-phase signal attains the signal energy") {
  Signal base = complex_signal(4, 5);
  CVec v(base.vec());
  v.insert(v.begin(), cd{1.1 * base.norm1(), 0.0});
  const Signal x(v);
  REQUIRE(is_minimum_phase(x));
  const MeasurementSet y = measure_classical(x);
  MaskSet ones{{CVec(x.size(), cd{1.0, 0.0})}};
  const auto [sol, rep] = admm_solve(build_masked_trace(y, ones));
  CHECK(std::abs(rep.objective - x.norm_sq()) < 1e-4 * x.norm_sq());
}

TEST_CASE("noisy masked program") {
  const Signal x = complex_signal(5, 6);
  const MaskSet m = masks_fixed(5);
  const MeasurementSet y = measure_masked(x, m, 9, 9);
  const SdpProblem exact = build_masked_trace(y, m), zero_eps = build_masked_noisy(y, m, 0.0);
  REQUIRE(exact.constraints.size() == zero_eps.constraints.size());
  for (std::size_t i = 0; i < exact.constraints.size(); ++i) {
    CHECK(exact.constraints[i].lower == zero_eps.constraints[i].lower);
    CHECK(exact.constraints[i].upper == zero_eps.constraints[i].upper);
  }
  const auto [sol, rep] = admm_solve(build_masked_noisy(y, m, max_abs(y.y)));
  CHECK(sol.norm() < 1e-6);
  CHECK(std::abs(rep.objective) < 1e-6);
  CHECK_THROWS_AS(build_masked_noisy(y, m, -1.0), std::invalid_argument);
}

TEST_CASE("minimum-phase program") {
  const Signal x(CVec{2.0, 1.0});
  const SdpProblem p = build_minphase(autocorrelation(x));
  CHECK(p.constraints.size() == 2);
  const auto [sol, rep] = admm_solve(p);
  const auto [z, q] = extract_rank_one(sol);
  CHECK(q < 1e-6);
  CHECK(dist_up_to(x, z, TrivialGroup::rotation_only()) < 1e-5);

  const SdpProblem pd = build_minphase(autocorrelation(Signal::delta(3)));
  const auto [sd, rd] = admm_solve(pd);
  CHECK((sd - unit(3, 0, 0)).norm() < 1e-5);

  Signal base = complex_signal(5, 8);
  const Signal mp = Signal([&] {
    CVec v(base.vec());
    v.insert(v.begin(), cd{1.05 * base.norm1(), 0.0});
    return v;
  }());
  const auto [sm, rm] = admm_solve(build_minphase(autocorrelation(mp)));
  CHECK(relative_error(mp, extract_rank_one(sm).first, TrivialGroup::rotation_only()) < 1e-4);
}

TEST_CASE("stft program") {
  const Signal x = complex_signal(12, 9);
  const WindowSpec w = WindowSpec::rectangular(12, 4, 1);
  const auto [sol, rep] = admm_solve(build_stft_sdp(measure_stft(x, w), w));
  CHECK(relative_error(x, extract_rank_one(sol).first, TrivialGroup::rotation_only()) < 1e-4);

  const WindowSpec w2 = WindowSpec::rectangular(12, 4, 2);
  const SdpProblem plain = build_stft_sdp(measure_stft(x, w2), w2);
  const SdpProblem prior = build_stft_sdp(measure_stft(x, w2), w2, CVec(x.vec().begin(), x.vec().begin() + 2));
  CHECK(prior.constraints.size() > plain.constraints.size());

  // Frames never overlap: relative phases between frames are lost.
  const WindowSpec hole = WindowSpec::rectangular(12, 1, 2);
  const Signal xs = complex_signal(12, 10);
  HermitianMatrix s;
  try {
    s = admm_solve(build_stft_sdp(measure_stft(xs, hole), hole)).first;
  } catch (const NotConverged& e) {
    s = e.last_iterate();
  }
  CHECK(relative_error(xs, extract_rank_one(s).first, TrivialGroup::rotation_only()) > 1e-2);
}

TEST_CASE("extract_rank_one examples") {
  const Signal x = complex_signal(5, 11);
  const auto [z, q] = extract_rank_one(outer(x));
  CHECK(q < 1e-10);
  CHECK(dist_up_to(x, z, TrivialGroup::rotation_only()) < 1e-10);
  CHECK(std::abs(extract_rank_one(HermitianMatrix::Identity(2, 2)).second - 1.0) < 1e-14);
  HermitianMatrix d = HermitianMatrix::Zero(2, 2);
  d.diagonal() << 4.0, 1.0;
  const auto [z2, q2] = extract_rank_one(d);
  CHECK(std::abs(q2 - 0.25) < 1e-14);
  CHECK(std::abs(z2[0] - 2.0) < 1e-14);
  CHECK(std::abs(z2[1]) < 1e-14);
}
