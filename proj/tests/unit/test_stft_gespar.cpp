#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phaseless/ambiguity.hpp"
#include "phaseless/gespar.hpp"
#include "phaseless/gradient.hpp"
#include "phaseless/stft_direct.hpp"

using namespace phaseless;
using namespace testutil;

TEST_CASE("build_G examples") {
  const WindowSpec delta = WindowSpec::rectangular(6, 1, 1);
  CHECK((build_G(delta, 0) - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-15);
  CHECK(build_G(delta, 2).norm() < 1e-15);
  CHECK(build_G(delta, -1).norm() < 1e-15);
  const WindowSpec ones = WindowSpec::rectangular(5, 5, 1);
  for (std::ptrdiff_t ell : {-3, 0, 2})
    CHECK((build_G(ones, ell) - Eigen::MatrixXcd::Ones(5, 5)).norm() < 1e-15);
}

TEST_CASE("build_G entries and circulant structure for unit hop") {
  const WindowSpec w = WindowSpec::gaussian(7, 1.2, 4, 1);
  for (std::ptrdiff_t ell : {-3, -1, 0, 2}) {
    const Eigen::MatrixXcd g = build_G(w, ell);
    for (std::size_t m = 0; m < 7; ++m)
      for (std::size_t n = 0; n < 7; ++n) {
        const cd expect = w.shifted(m, n) * std::conj(w.shifted(m, (n + 7 + static_cast<std::size_t>(ell + 7)) % 7));
        CHECK(std::abs(g(m, n) - expect) < 1e-14);
        CHECK(std::abs(g(m, n) - g((m + 1) % 7, (n + 1) % 7)) < 1e-14);
      }
  }
  const WindowSpec w2 = WindowSpec::rectangular(8, 3, 2);
  CHECK(build_G(w2, 1).rows() == 4);
}

TEST_CASE("diagonal systems hold for the true lifted signal") {
  const Signal x = complex_signal(9, 2);
  const WindowSpec w = WindowSpec::rectangular(9, 4, 2);
  const MeasurementSet y = measure_stft(x, w);
  const Eigen::MatrixXcd X = [&] {
    Eigen::MatrixXcd m(9, 9);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j) m(i, j) = x[i] * std::conj(x[j]);
    return m;
  }();
  for (std::ptrdiff_t ell = -3; ell <= 3; ++ell) {
    const DiagonalSystem s = build_system(y, w, ell);
    const CVec diag = circular_diagonal(X, ell);
    const Eigen::VectorXcd xl = Eigen::Map<const Eigen::VectorXcd>(diag.data(), 9);
    CHECK((s.g * xl - s.ytilde).norm() < 1e-10 * std::max(1.0, s.ytilde.norm()));
  }
}

TEST_CASE("is_admissible examples") {
  CHECK(is_admissible(WindowSpec::rectangular(23, 11, 1), 23));
  CHECK(is_admissible(WindowSpec::rectangular(23, 5, 1), 23));
  CHECK_FALSE(is_admissible(WindowSpec::rectangular(23, 1, 1), 23));
  CHECK_FALSE(is_admissible(WindowSpec::rectangular(6, 6, 1), 6));
}

TEST_CASE("least-squares STFT recovery is exact for admissible windows") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Signal x = complex_signal(23, seed);
    const WindowSpec w = WindowSpec::rectangular(23, 12, 1);
    CHECK(relative_error(x, stft_ls_recover(measure_stft(x, w), w), TrivialGroup::rotation_only()) < 1e-8);
  }
  const WindowSpec w = WindowSpec::rectangular(11, 4, 1);
  CHECK(dist_up_to(Signal::delta(11), stft_ls_recover(measure_stft(Signal::delta(11), w), w),
                   TrivialGroup::rotation_only()) < 1e-10);
  const WindowSpec bad = WindowSpec::rectangular(6, 6, 1);
  CHECK_THROWS_AS(stft_ls_recover(measure_stft(complex_signal(6, 1), bad), bad), NotAdmissible);
  const WindowSpec hop2 = WindowSpec::rectangular(12, 4, 2);
  CHECK_THROWS_AS(stft_ls_recover(measure_stft(complex_signal(12, 1), hop2), hop2), std::invalid_argument);
}

TEST_CASE("least-squares STFT recovery obeys the short-window bound") {
  // Unit-norm x with ||x||_inf^2 <= B / N and B = N / (2N - 4W + 2); needs N <= 4W - 2.
  const std::size_t n = 5, width = 2;
  const double b = double(n) / double(2 * n - 4 * width + 2);
  const WindowSpec w = WindowSpec::rectangular(n, width, 1);
  REQUIRE(is_admissible(w, n));
  Rng rng(3);
  std::size_t accepted = 0;
  while (accepted < 20) {
    CVec v(n);
    for (auto& e : v) e = std::polar(1.0 + 0.2 * rng.uniform(), 6.3 * rng.uniform());
    const Signal x = Signal(v).scaled(1.0 / Signal(v).norm());
    if (x.norm_inf() * x.norm_inf() > b / double(n)) continue;
    ++accepted;
    const double d = dist_up_to(x, stft_ls_recover(measure_stft(x, w), w), TrivialGroup::rotation_only());
    const double bound = 1.0 - std::sqrt(1.0 - 2.0 * b * double(n - 2 * width + 1) / double(n));
    CHECK(d * d <= bound + 1e-9);
  }
}

TEST_CASE("initialization heuristic") {
  const Signal x = complex_signal(23, 3);
  const WindowSpec w = WindowSpec::rectangular(23, 12, 1);
  const MeasurementSet y = measure_stft(x, w);
  CHECK(dist_up_to(stft_ls_recover(y, w), stft_init_heuristic(y, w, 1e-14), TrivialGroup::rotation_only()) <
        1e-8 * x.norm());

  for (std::size_t hop : {2u, 3u, 5u}) {
    const WindowSpec g = WindowSpec::gaussian(23, 3.0, 9, hop);
    const Signal z = stft_init_heuristic(measure_stft(x, g), g);
    for (const auto& v : z.vec()) CHECK(std::isfinite(std::abs(v)));
  }
  const WindowSpec delta = WindowSpec::rectangular(23, 1, 3);
  const Signal zd = stft_init_heuristic(measure_stft(x, delta), delta);
  CHECK(zd.size() == 23);
}

TEST_CASE("initialization error grows with the hop on average") {
  auto mean_error = [](std::size_t hop) {
    double s = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Signal x = complex_signal(41, seed);
      const WindowSpec g = WindowSpec::gaussian(41, 5.0, 15, hop);
      s += relative_error(x, stft_init_heuristic(measure_stft(x, g), g), TrivialGroup::rotation_only());
    }
    return s / 10.0;
  };
  CHECK(mean_error(1) < mean_error(4));
}

TEST_CASE("damped Gauss-Newton examples") {
  Rng rng(4);
  Signal x = random_signal(16, SignalDistribution::sparse(3), rng);
  const MeasurementSet y = measure_classical(x, 31, 31);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < 16; ++i)
    if (x[i] != cd{0.0, 0.0}) support.push_back(i);
  const GaussNewtonResult at_truth = damped_gauss_newton(y, support, x);
  CHECK(at_truth.objective < 1e-12);

  const GaussNewtonResult r = damped_gauss_newton(y, support, complex_signal(16, 9));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] < r.trace[i - 1]);
  for (std::size_t i = 0; i < 16; ++i)
    if (std::find(support.begin(), support.end(), i) == support.end()) CHECK(r.z[i] == cd{0.0, 0.0});

  // Single-coordinate support: the objective depends on |z_i| only; scan it.
  const std::vector<std::size_t> one{5};
  GaussNewtonOptions opt;
  opt.max_iter = 200;
  const GaussNewtonResult s1 = damped_gauss_newton(y, one, Signal::delta(16, 5), opt);
  const Objective f({LossKind::Intensity, y.model}, y);
  double best = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    CVec z(16, cd{0.0, 0.0});
    z[5] = 4.0 * double(i) / 200000.0;
    best = std::min(best, f.value(z));
  }
  CHECK(s1.objective <= best + 1e-8 * std::max(1.0, best));
}

TEST_CASE("gespar recovers collision-free sparse signals") {
  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    Signal x;
    do x = random_signal(32, SignalDistribution::sparse(3), rng);
    while (has_collision(x));
    const MeasurementSet y = measure_classical(x, 63, 63);
    GesparOptions opt;
    opt.stop_on_success = false;
    opt.restarts = 30;
    const auto [z, rep] = gespar(y, 3, opt, Rng(100 + seed));
    if (relative_error(x, z, TrivialGroup::full()) < 1e-6) ++hits;
    for (const auto& rr : rep.restarts) {
      CHECK(rep.best_objective <= rr.initial_objective + 1e-15);
      for (std::size_t i = 1; i < rr.accepted.size(); ++i) CHECK(rr.accepted[i] < rr.accepted[i - 1]);
      if (!rr.accepted.empty()) CHECK(rr.accepted.front() < rr.initial_objective);
    }
  }
  CHECK(hits >= 3);
}

TEST_CASE("gespar is deterministic across worker counts and full support reduces to Gauss-Newton") {
  Rng rng(8);
  const Signal x = random_signal(20, SignalDistribution::sparse(3), rng);
  const MeasurementSet y = measure_classical(x, 39, 39);
  GesparOptions a;
  a.restarts = 8;
  a.stop_on_success = false;
  GesparOptions b = a;
  b.jobs = 3;
  const auto ra = gespar(y, 3, a, Rng(1)), rb = gespar(y, 3, b, Rng(1));
  CHECK(ra.first.vec() == rb.first.vec());
  CHECK(ra.second.best_restart == rb.second.best_restart);

  const Signal small = complex_signal(5, 3);
  const MeasurementSet ys = measure_classical(small);
  GesparOptions full;
  full.restarts = 1;
  const auto [z, rep] = gespar(ys, 5, full, Rng(2));
  REQUIRE(rep.restarts.size() == 1);
  CHECK(rep.restarts[0].accepted.empty());
  CHECK_THROWS(gespar(ys, 0, full, Rng(2)));
}
