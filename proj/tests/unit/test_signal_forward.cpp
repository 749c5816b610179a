#include <algorithm>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "phaseless/fft.hpp"
#include "phaseless/forward.hpp"
#include "phaseless/io.hpp"
#include "phaseless/signal.hpp"

using namespace phaseless;
using namespace testutil;

TEST_CASE("fft matches direct summation for radix-2 and Bluestein lengths") {
  for (std::size_t len : {1u, 2u, 3u, 5u, 8u, 12u, 17u, 31u, 64u, 100u}) {
    const Signal x = complex_signal(len, len);
    const CVec f = fft(x.values());
    CHECK(max_abs_diff(f, naive_dft(x.vec(), len, len)) < 1e-10 * double(len));
    const CVec back = ifft(f);
    CHECK(max_abs_diff(back, x.vec()) < 1e-12 * double(len));
  }
}

TEST_CASE("oversampled_dft examples") {
  CHECK(std::abs(oversampled_dft(Signal(CVec{1.0}), 1, 1)[0] - cd{1.0, 0.0}) < 1e-15);
  for (auto [nt, k] : {std::pair{7u, 7u}, std::pair{5u, 11u}, std::pair{9u, 3u}}) {
    const CVec d = oversampled_dft(Signal::delta(4), nt, k);
    REQUIRE(d.size() == k);
    for (const auto& v : d) CHECK(std::abs(v - cd{1.0, 0.0}) < 1e-14);
  }
  const CVec y = oversampled_dft(Signal(CVec{1.0, 1.0}), 3, 3);
  const double tau = 2.0 * std::numbers::pi;
  CHECK(std::abs(y[0] - cd{2.0, 0.0}) < 1e-14);
  CHECK(std::abs(y[1] - (1.0 + std::polar(1.0, -tau / 3.0))) < 1e-14);
  CHECK(std::abs(y[2] - (1.0 + std::polar(1.0, -2.0 * tau / 3.0))) < 1e-14);
}

TEST_CASE("oversampled_dft agrees with direct summation when K exceeds the period or N") {
  const Signal x = complex_signal(9, 3);
  for (auto [nt, k] : {std::pair{17u, 17u}, std::pair{5u, 12u}, std::pair{20u, 40u}, std::pair{4u, 4u}})
    CHECK(max_abs_diff(oversampled_dft(x, nt, k), naive_dft(x.vec(), nt, k)) < 1e-10);
}

TEST_CASE("autocorrelation examples and Cauchy-Schwarz bound") {
  const CVec a0 = autocorrelation(Signal::delta(4));
  for (std::size_t i = 0; i < a0.size(); ++i) CHECK(std::abs(a0[i] - cd{i == 3 ? 1.0 : 0.0, 0.0}) < 1e-15);
  const CVec a = autocorrelation(Signal(CVec{1.0, 1.0}));
  REQUIRE(a.size() == 3);
  CHECK(std::abs(a[0] - 1.0) < 1e-15);
  CHECK(std::abs(a[1] - 2.0) < 1e-15);
  CHECK(std::abs(a[2] - 1.0) < 1e-15);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Signal x = complex_signal(7, seed);
    const CVec r = autocorrelation(x);
    const double a00 = r[6].real();
    CHECK(std::abs(a00 - x.norm_sq()) < 1e-12);
    for (const auto& v : r) CHECK(std::abs(v) <= a00 * (1.0 + 1e-12));
  }
}

TEST_CASE("dist_up_to factors out the requested trivial ambiguities") {
  const Signal x = complex_signal(6, 11);
  for (double phi : {0.3, 1.7, -2.9}) CHECK(dist_up_to(x, x.scaled(std::polar(1.0, phi)), TrivialGroup::rotation_only()) < 1e-12);
  CHECK(dist_up_to(x, x.conj_reflected(), TrivialGroup::rotation_reflection()) < 1e-12);
  CHECK(dist_up_to(x, x.conj_reflected(), TrivialGroup::rotation_only()) > 1e-3);
  CHECK(dist_up_to(x, x.circular_shift(2).scaled(cd{0.0, 1.0}), TrivialGroup::full()) < 1e-12);
  CHECK(dist_up_to(ambiguous_x1(), ambiguous_x2(), TrivialGroup::full()) > 0.1);
  CHECK_THROWS_AS(dist_up_to(x, complex_signal(5, 1), TrivialGroup::rotation_only()), std::invalid_argument);
}

TEST_CASE("dist_up_to rotation matches an exhaustive phase search") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Signal x = complex_signal(5, seed), z = complex_signal(5, seed + 100);
    double best = 1e300;
    for (int i = 0; i < 20000; ++i) {
      const cd r = std::polar(1.0, 2.0 * std::numbers::pi * i / 20000.0);
      best = std::min(best, (x - z.scaled(r)).norm());
    }
    const double d = dist_up_to(x, z, TrivialGroup::rotation_only());
    CHECK(d <= best + 1e-12);
    CHECK(d >= best - 1e-3 * best);
  }
}

TEST_CASE("random_signal determinism, sparsity and second moment") {
  Rng a(42), b(42);
  CHECK(random_signal(8, SignalDistribution::complex_normal(), a).vec() ==
        random_signal(8, SignalDistribution::complex_normal(), b).vec());
  Rng r(5);
  const Signal s = random_signal(10, SignalDistribution::sparse(3), r);
  CHECK(std::count_if(s.vec().begin(), s.vec().end(), [](cd v) { return v != cd{0.0, 0.0}; }) == 3);
  Rng m(9);
  double acc = 0.0;
  const std::size_t draws = 10000, n = 4;
  for (std::size_t i = 0; i < draws; ++i) acc += random_signal(n, SignalDistribution::complex_normal(), m).norm_sq() / n;
  acc /= double(draws);
  CHECK(acc >= 1.9);
  CHECK(acc <= 2.1);
  Rng rr(3);
  const Signal real = random_signal(6, SignalDistribution::real_normal(), rr);
  for (const auto& v : real.vec()) CHECK(v.imag() == 0.0);
}

TEST_CASE("Rng children are deterministic and distinct") {
  const Rng root(7);
  Rng c1 = root.child(3), c2 = root.child(3), c3 = root.child(4);
  const double v1 = c1.normal(), v2 = c2.normal(), v3 = c3.normal();
  CHECK(v1 == v2);
  CHECK(v1 != v3);
}

TEST_CASE("measure_classical examples and trivial ambiguities") {
  const MeasurementSet d = measure_classical(Signal::delta(5));
  for (double v : d.y) CHECK(std::abs(v - 1.0) < 1e-14);
  const auto y1 = measure_classical(ambiguous_x1()).y, y2 = measure_classical(ambiguous_x2()).y;
  CHECK(max_abs_diff(y1, y2) < 1e-10);

  const Signal x = complex_signal(6, 2);
  const auto y = measure_classical(x).y;
  CHECK(max_abs_diff(y, measure_classical(x.conj_reflected()).y) < 1e-10);
  CHECK(max_abs_diff(y, measure_classical(x.scaled(std::polar(1.0, 0.8))).y) < 1e-10);
  // Shift within a zero-padded frame leaves the oversampled magnitudes unchanged.
  CVec padded(x.vec());
  padded.insert(padded.begin(), cd{0.0, 0.0});
  CVec tail(x.vec());
  tail.push_back(cd{0.0, 0.0});
  CHECK(max_abs_diff(measure_classical(Signal(padded), 13, 13).y, measure_classical(Signal(tail), 13, 13).y) < 1e-10);

  const CVec f = naive_dft(x.vec(), 11, 11);
  for (std::size_t k = 0; k < 11; ++k) CHECK(std::abs(y[k] - std::norm(f[k])) < 1e-10);
}

TEST_CASE("measure_masked examples") {
  const Signal x = complex_signal(6, 4);
  MaskSet ones{{CVec(6, cd{1.0, 0.0})}};
  CHECK(max_abs_diff(measure_masked(x, ones, 11, 11).y, measure_classical(x).y) < 1e-12);

  MaskSet single{{CVec(6, cd{0.0, 0.0})}};
  single.masks[0][3] = 1.0;
  for (double v : measure_masked(x, single, 11, 11).y) CHECK(std::abs(v - std::norm(x[3])) < 1e-12);

  const MeasurementSet ym = measure_masked(x, masks_fixed(6), 11, 11);
  REQUIRE(ym.rows == 2);
  CVec tailx(x.vec());
  tailx[0] = 0.0;
  const auto c0 = measure_classical(x).y, c1 = measure_classical(Signal(tailx)).y;
  for (std::size_t k = 0; k < 11; ++k) {
    CHECK(std::abs(ym.at(0, k) - c0[k]) < 1e-10);
    CHECK(std::abs(ym.at(1, k) - c1[k]) < 1e-10);
  }
  MaskSet bad{{CVec(5, cd{1.0, 0.0})}};
  CHECK_THROWS_AS(measure_masked(x, bad, 11, 11), std::invalid_argument);
}

TEST_CASE("measure_stft examples") {
  const Signal x = complex_signal(8, 6);
  WindowSpec e0 = WindowSpec::rectangular(8, 1, 1, true);
  const MeasurementSet y = measure_stft(x, e0);
  for (std::size_t m = 0; m < 8; ++m)
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(y.at(m, k) - std::norm(x[m])) < 1e-12);

  const WindowSpec full = WindowSpec::rectangular(8, 8, 8, true);
  const MeasurementSet one = measure_stft(x, full);
  REQUIRE(one.rows == 1);
  const CVec f = naive_dft(x.vec(), 8, 8);
  for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(one.at(0, k) - std::norm(f[k])) < 1e-10);

  const WindowSpec w = WindowSpec::rectangular(8, 3, 2, true);
  CHECK(max_abs_diff(measure_stft(x, w).y, measure_stft(x.scaled(std::polar(1.0, 2.2)), w).y) < 1e-10);
  CHECK_THROWS(WindowSpec::rectangular(8, 3, 0, true));
  CHECK_THROWS(WindowSpec::rectangular(5, 7, 1, true));
}

TEST_CASE("measure_stft equals direct summation of windowed frames") {
  const Signal x = complex_signal(10, 8);
  for (bool periodic : {true, false}) {
    const WindowSpec w = WindowSpec::gaussian(10, 1.5, 4, 3, periodic);
    const MeasurementSet y = measure_stft(x, w, 10, 10);
    for (std::size_t m = 0; m < w.frames(); ++m) {
      CVec frame(10);
      for (std::size_t n = 0; n < 10; ++n) frame[n] = x[n] * w.shifted(m, n);
      const CVec f = naive_dft(frame, 10, 10);
      for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(y.at(m, k) - std::norm(f[k])) < 1e-10);
    }
  }
}

TEST_CASE("measure_frog examples") {
  const Signal x1 = complex_signal(6, 12);
  const Signal ones(CVec(6, cd{1.0, 0.0}));
  const MeasurementSet y = measure_frog(x1, ones, 1);
  const CVec f = naive_dft(x1.vec(), 6, 6);
  for (std::size_t m = 0; m < y.rows; ++m)
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(y.at(m, k) - std::norm(f[k])) < 1e-10);

  const MeasurementSet d = measure_frog(Signal::delta(5), Signal::delta(5), 1);
  for (std::size_t m = 0; m < d.rows; ++m)
    for (std::size_t k = 0; k < d.cols; ++k) CHECK(std::abs(d.at(m, k) - (m % 5 == 0 ? 1.0 : 0.0)) < 1e-14);
  CHECK_THROWS_AS(measure_frog(x1, complex_signal(5, 1), 1), std::invalid_argument);
}

TEST_CASE("measure_2d examples") {
  const Signal delta(CVec{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, Shape2D{2, 3});
  for (double v : measure_2d(delta).y) CHECK(std::abs(v - 1.0) < 1e-14);

  const Signal u = complex_signal(3, 1), v = complex_signal(4, 2);
  CVec outer(12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) outer[i * 4 + j] = u[i] * v[j];
  const Signal x(outer, Shape2D{3, 4});
  const MeasurementSet y = measure_2d(x);
  const auto yu = measure_classical(u).y, yv = measure_classical(v).y;
  REQUIRE(y.y.size() == yu.size() * yv.size());
  for (std::size_t a = 0; a < yu.size(); ++a)
    for (std::size_t b = 0; b < yv.size(); ++b) CHECK(std::abs(y.y[a * yv.size() + b] - yu[a] * yv[b]) < 1e-9);
  CHECK(max_abs_diff(y.y, measure_2d(x.conj_reflected()).y) < 1e-9);
}

TEST_CASE("mask families") {
  const MaskSet f = masks_fixed(5);
  REQUIRE(f.count() == 2);
  CHECK(f.length() == 5);
  CHECK(f.masks[1][0] == cd{0.0, 0.0});
  for (const auto& v : f.masks[0]) CHECK(v == cd{1.0, 0.0});

  const MaskSet b = masks_block(4, 1);
  REQUIRE(b.count() == 3);
  CHECK(b.masks[1] == CVec{1.0, 0.0, 0.0, 0.0});
  const MaskSet b7 = masks_block(7, 3);
  for (std::size_t n = 0; n < 7; ++n) {
    CHECK(b7.masks[1][n] + b7.masks[2][n] == cd{1.0, 0.0});
    CHECK(b7.masks[1][n] * b7.masks[2][n] == cd{0.0, 0.0});
  }

  const MaskSet m0 = masks_modulated(6, 0);
  for (const auto& v : m0.masks[1]) CHECK(std::abs(v - 2.0) < 1e-14);
  const MaskSet m2 = masks_modulated(6, 2);
  for (const auto& v : m2.masks[1]) CHECK(std::abs(v) <= 2.0 + 1e-14);
  CHECK(std::abs(m2.masks[2][0] - cd{1.0, -1.0}) < 1e-14);
}

TEST_CASE("add_noise records sigma and seed and clamps at zero") {
  const MeasurementSet y = measure_classical(complex_signal(5, 1));
  const MeasurementSet a = add_noise(y, 0.5, 99), b = add_noise(y, 0.5, 99);
  CHECK(a.y == b.y);
  REQUIRE(a.noise.has_value());
  CHECK(a.noise->sigma == 0.5);
  CHECK(a.noise->seed == 99);
  for (double v : add_noise(y, 100.0, 3).y) CHECK(v >= 0.0);
}

TEST_CASE("io round trips are bit-exact") {
  const Signal x = complex_signal(7, 13);
  CHECK(io::signal_from_csv(io::signal_to_csv(x)).vec() == x.vec());
  CHECK(io::signal_from_json(io::signal_to_json(x)).vec() == x.vec());
  const Signal x2(complex_signal(6, 2).vec(), Shape2D{2, 3});
  const Signal back = io::signal_from_json(io::signal_to_json(x2));
  CHECK(back.shape() == x2.shape());

  const MeasurementSet y = measure_stft(x, WindowSpec::gaussian(7, 1.0, 3, 2, false));
  const MeasurementSet r = io::measurement_from_text(io::measurement_descriptor_json(y), io::measurement_matrix_csv(y));
  CHECK(r.y == y.y);
  CHECK(r.model.kind == ModelKind::Stft);
  REQUIRE(r.model.window.has_value());
  CHECK(r.model.window->d == y.model.window->d);
  CHECK(r.model.window->periodic == false);
}
