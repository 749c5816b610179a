#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phaseless/altproj.hpp"
#include "phaseless/gradient.hpp"

using namespace phaseless;
using namespace testutil;

namespace {

bool non_increasing(const std::vector<double>& e, double slack) {
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i] > e[i - 1] + slack * std::max(1.0, e[0])) return false;
  return true;
}

// Central differences on the real and imaginary coordinates: df/dRe + j df/dIm.
CVec fd_gradient(const Objective& f, const Signal& z, double h) {
  CVec g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    CVec p(z.vec()), m(z.vec());
    p[i] += h;
    m[i] -= h;
    const double dre = (f.value(p) - f.value(m)) / (2.0 * h);
    p = z.vec();
    m = z.vec();
    p[i] += cd{0.0, h};
    m[i] -= cd{0.0, h};
    const double dim = (f.value(p) - f.value(m)) / (2.0 * h);
    g[i] = {dre, dim};
  }
  return g;
}

double rel_diff(const CVec& a, const CVec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST_CASE("phase_sign is zero at zero") {
  CHECK(phase_sign(cd{0.0, 0.0}) == cd{0.0, 0.0});
  CHECK(std::abs(phase_sign(cd{3.0, 4.0}) - cd{0.6, 0.8}) < 1e-15);
}

TEST_CASE("temporal constraint projections") {
  CVec v{cd{1.0, 1.0}, cd{-2.0, 0.5}, cd{3.0, 0.0}};
  TemporalConstraint::support({0, 2}).project(v);
  CHECK(v[1] == cd{0.0, 0.0});
  CVec w{cd{1.0, 1.0}, cd{-2.0, 0.5}, cd{3.0, 0.0}};
  TemporalConstraint::support_nonnegative({0, 1}).project(w);
  CHECK(w[0] == cd{1.0, 0.0});
  CHECK(w[1] == cd{0.0, 0.0});
  CHECK(w[2] == cd{0.0, 0.0});
  CVec u{cd{0.0, 2.0}, cd{-2.0, 0.0}};
  TemporalConstraint::known_magnitudes({1.0, 4.0}).project(u);
  CHECK(std::abs(u[0] - cd{0.0, 1.0}) < 1e-15);
  CHECK(std::abs(u[1] - cd{-4.0, 0.0}) < 1e-15);
  CVec k{cd{5.0, 0.0}, cd{6.0, 0.0}};
  TemporalConstraint::known_entries({1}, CVec{cd{0.0, 1.0}}).project(k);
  CHECK(k[1] == cd{0.0, 1.0});
  CHECK_THROWS(TemporalConstraint::support({7}).validate(3));
}

TEST_CASE("error reduction: truth is a fixed point and GS restores known magnitudes") {
  const Signal x = complex_signal(9, 1);
  const MeasurementSet y = measure_classical(x);
  const auto [z, rep] = error_reduction(y, TemporalConstraint::full_support(9), x);
  CHECK(rep.errors.front() < 1e-20);
  CHECK(relative_error(x, z, TrivialGroup::rotation_only()) < 1e-12);

  std::vector<double> mags(9);
  for (std::size_t i = 0; i < 9; ++i) mags[i] = std::abs(x[i]);
  AltProjOptions opt;
  opt.max_iter = 50;
  const auto [g, grep] = error_reduction(y, TemporalConstraint::known_magnitudes(mags), complex_signal(9, 2), opt);
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(std::abs(g[i]) - mags[i]) < 1e-12);
  CHECK(non_increasing(grep.errors, 1e-12));
}

TEST_CASE("error reduction with random inits does not always converge") {
  std::size_t stuck = 0;
  AltProjOptions opt;
  opt.max_iter = 500;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Signal x = complex_signal(23, seed);
    const MeasurementSet y = measure_classical(x);
    const auto [z, rep] = error_reduction(y, TemporalConstraint::full_support(23), complex_signal(23, 1000 + seed), opt);
    CHECK(non_increasing(rep.errors, 1e-12));
    if (rep.final_error > opt.tol) ++stuck;
  }
  CHECK(stuck > 0);
}

TEST_CASE("hio keeps the truth and solves a small nonnegative image") {
  const Signal x = real_signal(6, 3);
  const MeasurementSet y = measure_classical(x);
  const auto [z, rep] = hio(y, {0, 1, 2, 3, 4, 5}, false, 0.9, x);
  CHECK(relative_error(x, z, TrivialGroup::rotation_only()) < 1e-12);
  CHECK_THROWS_AS(hio(y, {0, 1}, false, 0.0, x), std::invalid_argument);
  CHECK_THROWS_AS(hio(y, {0, 1}, false, 1.5, x), std::invalid_argument);

  // 8x8 sparse nonnegative image with known support.
  Rng rng(77);
  CVec img(64, cd{0.0, 0.0});
  std::vector<std::size_t> support;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      img[r * 8 + c] = cd{rng.uniform() + 0.2, 0.0};
      support.push_back(r * 8 + c);
    }
  const Signal truth(img, Shape2D{8, 8});
  const MeasurementSet y2 = measure_2d(truth);
  AltProjOptions opt;
  opt.max_iter = 500;
  bool solved = false;
  for (std::uint64_t restart = 0; restart < 200 && !solved; ++restart) {
    Rng r = Rng(5).child(restart);
    CVec init(64);
    for (auto& v : init) v = cd{r.uniform(), 0.0};
    const auto [est, hr] = hio(y2, support, true, 0.9, Signal(init, Shape2D{8, 8}), opt);
    solved = hr.final_error < 1e-8;
  }
  CHECK(solved);
}

TEST_CASE("griffin-lim: fixed point, monotone error and coverage holes") {
  const Signal x = complex_signal(16, 4);
  const WindowSpec w = WindowSpec::rectangular(16, 6, 2, true);
  const MeasurementSet y = measure_stft(x, w);
  const auto [z, rep] = griffin_lim(y, w, x);
  CHECK(rep.errors.front() < 1e-20);
  CHECK(relative_error(x, z, TrivialGroup::rotation_only()) < 1e-12);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AltProjOptions opt;
    opt.max_iter = 200;
    const auto [g, gr] = griffin_lim(y, w, complex_signal(16, 50 + seed), opt);
    CHECK(non_increasing(gr.errors, 1e-12));
  }

  const WindowSpec hole = WindowSpec::rectangular(16, 2, 4, true);
  CHECK_THROWS_AS(griffin_lim(measure_stft(x, hole), hole, x), DivisionByZero);
}

TEST_CASE("loss examples") {
  const Signal x = complex_signal(8, 5);
  for (const auto& model : {measure_classical(x), measure_masked(x, masks_fixed(8), 15, 15),
                            measure_stft(x, WindowSpec::rectangular(8, 3, 1))}) {
    const LossSpec spec{LossKind::Intensity, model.model};
    CHECK(loss(x, spec, model) < 1e-18 * std::pow(x.norm_sq(), 2));
    CHECK(loss(x.scaled(std::polar(1.0, 1.2)), spec, model) < 1e-18 * std::pow(x.norm_sq(), 2));
    double sq = 0.0;
    for (double v : model.y) sq += v * v;
    CHECK(std::abs(loss(Signal::zeros(8), spec, model) - sq) < 1e-12 * sq);
    CHECK(loss(x, {LossKind::Amplitude, model.model}, model) < 1e-18 * x.norm_sq());
  }
}

TEST_CASE("intensity and amplitude gradients match central differences") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Signal x = complex_signal(8, seed), z = complex_signal(8, seed + 40);
    for (const auto& y : {measure_classical(x), measure_masked(x, masks_fixed(8), 15, 15),
                          measure_stft(x, WindowSpec::rectangular(8, 3, 2))}) {
      const Objective fi({LossKind::Intensity, y.model}, y);
      CHECK(rel_diff(grad_intensity(z, {LossKind::Intensity, y.model}, y).vec(), fd_gradient(fi, z, 1e-6)) < 1e-5);
      const Objective fa({LossKind::Amplitude, y.model}, y);
      CHECK(rel_diff(grad_amplitude(z, {LossKind::Amplitude, y.model}, y).vec(), fd_gradient(fa, z, 1e-6)) < 1e-5);
    }
  }
}

TEST_CASE("gradient vanishes at the truth and scales cubically") {
  const Signal x = complex_signal(8, 9);
  const MeasurementSet y = measure_classical(x);
  const LossSpec spec{LossKind::Intensity, y.model};
  double ynorm = 0.0;
  for (double v : y.y) ynorm += v * v;
  CHECK(grad_intensity(x, spec, y).norm() < 1e-10 * std::sqrt(ynorm));

  // One measurement y = 0 with a = e_0: f(z) = |z0|^4, gradient 4 |z0|^2 z0 scales as c^3.
  MaskSet single{{CVec{1.0, 0.0, 0.0}}};
  const MeasurementSet y0 = measure_masked(Signal::zeros(3), single, 1, 1);
  const LossSpec s0{LossKind::Intensity, y0.model};
  const Signal z(CVec{cd{0.3, -0.4}, 0.0, 0.0});
  const Signal g1 = grad_intensity(z, s0, y0), g2 = grad_intensity(z.scaled(2.0), s0, y0);
  CHECK(std::abs(g1[0] - 4.0 * std::norm(z[0]) * z[0]) < 1e-14);
  CHECK(std::abs(g2[0] - 8.0 * g1[0]) < 1e-13);
  CHECK_THROWS_AS(grad_amplitude(z, s0, y0), std::invalid_argument);
}

TEST_CASE("masked operator adjoint identity") {
  const Signal x = complex_signal(7, 2);
  const MeasurementSet y = measure_stft(x, WindowSpec::gaussian(7, 1.0, 3, 2, false), 9, 12);
  const MaskedOperator op(y.model);
  const Signal u = complex_signal(7, 3);
  Rng rng(4);
  CVec v(op.rows() * op.cols());
  for (auto& e : v) e = rng.complex_normal();
  const CVec au = op.apply(u.values());
  const CVec atv = op.adjoint(v);
  CHECK(std::abs(inner(v, au) - inner(atv, u.values())) < 1e-10 * std::abs(inner(v, au)));
}

TEST_CASE("gradient descent halts at the truth and never increases the loss") {
  const Signal x = complex_signal(12, 6);
  const WindowSpec w = WindowSpec::rectangular(12, 5, 1);
  const MeasurementSet y = measure_stft(x, w);
  const LossSpec spec{LossKind::Intensity, y.model};
  const auto [z, rep] = gd_minimize(spec, y, x, {}, {});
  CHECK(rep.iterations == 1);
  CHECK(rep.reason == HaltReason::Tolerance);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DescentOptions opt;
    opt.max_iter = 300;
    const auto [g, gr] = gd_minimize(spec, y, complex_signal(12, 100 + seed), {}, opt);
    for (std::size_t i = 1; i < gr.errors.size(); ++i) CHECK(gr.errors[i] < gr.errors[i - 1]);
    CHECK(gr.final_error <= gr.errors.front());
  }
}

TEST_CASE("iteration report csv") {
  IterReport r;
  r.errors = {1.0, 0.5};
  CHECK(r.to_csv() == "iteration,error\n1,1\n2,0.5\n");
  CHECK(to_string(HaltReason::Stagnation) == "stagnation");
}

TEST_CASE("gerchberg-saxton from infeasible starts never increases the error") {
  AltProjOptions opt;
  opt.max_iter = 100;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 6 + seed % 11;
    const Signal x = complex_signal(n, seed);
    std::vector<double> mags(n);
    for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(x[i]);
    const auto [g, rep] =
        error_reduction(measure_classical(x), TemporalConstraint::known_magnitudes(mags), complex_signal(n, 500 + seed), opt);
    CHECK(non_increasing(rep.errors, 1e-12));
  }
}
