#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "phaseless/altproj.hpp"
#include "phaseless/ambiguity.hpp"
#include "phaseless/forward.hpp"
#include "phaseless/gespar.hpp"
#include "phaseless/gradient.hpp"
#include "phaseless/minphase.hpp"
#include "phaseless/sdp.hpp"
#include "phaseless/stft_direct.hpp"

namespace py = pybind11;
using namespace phaseless;

namespace {

using CArray = py::array_t<cd, py::array::c_style | py::array::forcecast>;

Signal to_signal(const CArray& a) {
  if (a.ndim() == 1) return Signal(CVec(a.data(), a.data() + a.size()));
  if (a.ndim() == 2)
    return Signal(CVec(a.data(), a.data() + a.size()),
                  Shape2D{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))});
  throw std::invalid_argument("expected a 1D or 2D complex array");
}

CArray to_array(const Signal& x) {
  if (x.is_2d()) {
    CArray out({x.shape()->rows, x.shape()->cols});
    std::copy(x.vec().begin(), x.vec().end(), out.mutable_data());
    return out;
  }
  CArray out(static_cast<py::ssize_t>(x.size()));
  std::copy(x.vec().begin(), x.vec().end(), out.mutable_data());
  return out;
}

CArray to_array(const CVec& v) { return to_array(Signal(v)); }

py::array_t<double> intensities(const MeasurementSet& y) {
  py::array_t<double> out({y.rows, y.cols});
  std::copy(y.y.begin(), y.y.end(), out.mutable_data());
  return out;
}

py::array_t<double> errors(const IterReport& r) {
  py::array_t<double> out(static_cast<py::ssize_t>(r.errors.size()));
  std::copy(r.errors.begin(), r.errors.end(), out.mutable_data());
  return out;
}

TrivialGroup group(bool rotation, bool reflection, bool shift) { return {rotation, reflection, shift}; }

AltProjOptions altproj_options(std::size_t max_iter, double tol) {
  AltProjOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  return o;
}

std::pair<CArray, double> sdp_solve(const SdpProblem& p, double tol, std::size_t max_iter) {
  AdmmOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  auto [sol, rep] = admm_solve(p, o);
  auto [z, quality] = extract_rank_one(sol);
  return {to_array(z), quality};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Phase retrieval from Fourier-type phaseless measurements";

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_property_readonly("kind", [](const MeasurementSet& y) { return to_string(y.model.kind); })
      .def_property_readonly("n", [](const MeasurementSet& y) { return y.model.n; })
      .def_property_readonly("shape", [](const MeasurementSet& y) { return py::make_tuple(y.rows, y.cols); })
      .def_property_readonly("y", &intensities)
      .def("__repr__", [](const MeasurementSet& y) {
        return "<MeasurementSet " + to_string(y.model.kind) + " n=" + std::to_string(y.model.n) + " rows=" +
               std::to_string(y.rows) + " cols=" + std::to_string(y.cols) + ">";
      });

  m.def(
      "random_signal",
      [](std::size_t n, const std::string& kind, std::uint64_t seed, std::size_t sparsity) {
        Rng rng(seed);
        SignalDistribution d;
        if (kind == "complex") d = SignalDistribution::complex_normal();
        else if (kind == "real") d = SignalDistribution::real_normal();
        else if (kind == "sparse") d = SignalDistribution::sparse(sparsity);
        else throw std::invalid_argument("kind must be complex, real or sparse");
        return to_array(random_signal(n, d, rng));
      },
      py::arg("n"), py::arg("kind") = "complex", py::arg("seed") = 0, py::arg("sparsity") = 0);

  m.def(
      "measure_classical",
      [](const CArray& x, std::size_t ntilde, std::size_t k) {
        const Signal s = to_signal(x);
        const std::size_t full = 2 * s.size() - 1;
        return measure_classical(s, ntilde ? ntilde : full, k ? k : full);
      },
      py::arg("x"), py::arg("ntilde") = 0, py::arg("k") = 0);
  m.def(
      "measure_masked",
      [](const CArray& x, const std::vector<CVec>& masks, std::size_t ntilde, std::size_t k) {
        const Signal s = to_signal(x);
        const std::size_t full = 2 * s.size() - 1;
        return measure_masked(s, MaskSet{masks}, ntilde ? ntilde : full, k ? k : full);
      },
      py::arg("x"), py::arg("masks"), py::arg("ntilde") = 0, py::arg("k") = 0);
  m.def("masks_fixed", [](std::size_t n) { return masks_fixed(n).masks; }, py::arg("n"));
  m.def(
      "measure_stft",
      [](const CArray& x, std::size_t width, std::size_t hop, bool periodic, const std::string& window) {
        const Signal s = to_signal(x);
        WindowSpec w;
        if (window == "rect") w = WindowSpec::rectangular(s.size(), width, hop, periodic);
        else if (window == "gaussian") w = WindowSpec::gaussian(s.size(), double(width) / 3.0, width, hop, periodic);
        else throw std::invalid_argument("window must be rect or gaussian");
        return measure_stft(s, w);
      },
      py::arg("x"), py::arg("width"), py::arg("hop") = 1, py::arg("periodic") = true, py::arg("window") = "rect");
  m.def(
      "measure_frog", [](const CArray& x1, const CArray& x2, std::size_t hop) {
        return measure_frog(to_signal(x1), to_signal(x2), hop);
      },
      py::arg("x1"), py::arg("x2"), py::arg("hop") = 1);
  m.def("measure_2d", [](const CArray& x) { return measure_2d(to_signal(x)); }, py::arg("x"));
  m.def("add_noise", &add_noise, py::arg("y"), py::arg("sigma"), py::arg("seed"));

  m.def("autocorrelation", [](const CArray& x) { return to_array(autocorrelation(to_signal(x))); }, py::arg("x"));
  m.def(
      "dist_up_to",
      [](const CArray& x, const CArray& z, bool rotation, bool reflection, bool shift) {
        return dist_up_to(to_signal(x), to_signal(z), group(rotation, reflection, shift));
      },
      py::arg("x"), py::arg("z"), py::arg("rotation") = true, py::arg("reflection") = false, py::arg("shift") = false);
  m.def(
      "relative_error",
      [](const CArray& x, const CArray& z, bool rotation, bool reflection, bool shift) {
        return relative_error(to_signal(x), to_signal(z), group(rotation, reflection, shift));
      },
      py::arg("x"), py::arg("z"), py::arg("rotation") = true, py::arg("reflection") = false, py::arg("shift") = false);

  m.def(
      "enumerate_solutions",
      [](const MeasurementSet& y, std::optional<double> tol) {
        std::vector<CArray> out;
        for (const auto& s : enumerate_solutions(autocorr_from_measurements(y), tol).members) out.push_back(to_array(s));
        return out;
      },
      py::arg("y"), py::arg("tol") = std::nullopt);
  m.def("is_minimum_phase", [](const CArray& x) { return is_minimum_phase(to_signal(x)); }, py::arg("x"));
  m.def(
      "augment_min_phase",
      [](const CArray& x, std::optional<cd> delta) { return to_array(augment_min_phase(to_signal(x), delta)); },
      py::arg("x"), py::arg("delta") = std::nullopt);
  m.def("kolmogorov_recover", [](const MeasurementSet& y) { return to_array(kolmogorov_recover(y)); }, py::arg("y"));

  m.def(
      "error_reduction",
      [](const MeasurementSet& y, const CArray& x0, std::optional<std::vector<std::size_t>> support, bool nonnegative,
         std::size_t max_iter, double tol) {
        const Signal s0 = to_signal(x0);
        std::vector<std::size_t> sup = support ? *support : std::vector<std::size_t>{};
        if (!support)
          for (std::size_t i = 0; i < s0.size(); ++i) sup.push_back(i);
        const auto c = nonnegative ? TemporalConstraint::support_nonnegative(sup) : TemporalConstraint::support(sup);
        auto [z, rep] = error_reduction(y, c, s0, altproj_options(max_iter, tol));
        return py::make_tuple(to_array(z), errors(rep));
      },
      py::arg("y"), py::arg("x0"), py::arg("support") = std::nullopt, py::arg("nonnegative") = false,
      py::arg("max_iter") = 1000, py::arg("tol") = 1e-10);
  m.def(
      "griffin_lim",
      [](const MeasurementSet& y, const CArray& x0, std::size_t max_iter, double tol) {
        if (!y.model.window) throw std::invalid_argument("griffin_lim: STFT measurements required");
        auto [z, rep] = griffin_lim(y, *y.model.window, to_signal(x0), altproj_options(max_iter, tol));
        return py::make_tuple(to_array(z), errors(rep));
      },
      py::arg("y"), py::arg("x0"), py::arg("max_iter") = 1000, py::arg("tol") = 1e-10);

  auto loss_kind = [](const std::string& s) {
    if (s == "intensity") return LossKind::Intensity;
    if (s == "amplitude") return LossKind::Amplitude;
    throw std::invalid_argument("loss must be intensity or amplitude");
  };
  m.def(
      "loss",
      [loss_kind](const MeasurementSet& y, const CArray& z, const std::string& kind) {
        return loss(to_signal(z), {loss_kind(kind), y.model}, y);
      },
      py::arg("y"), py::arg("z"), py::arg("loss") = "intensity");
  m.def(
      "gradient",
      [loss_kind](const MeasurementSet& y, const CArray& z, const std::string& kind) {
        return to_array(Objective({loss_kind(kind), y.model}, y).gradient(to_signal(z).values()));
      },
      py::arg("y"), py::arg("z"), py::arg("loss") = "intensity");
  m.def(
      "gd_minimize",
      [loss_kind](const MeasurementSet& y, const CArray& x0, const std::string& kind, std::size_t max_iter, double tol) {
        DescentOptions o;
        o.max_iter = max_iter;
        o.tol = tol;
        auto [z, rep] = gd_minimize({loss_kind(kind), y.model}, y, to_signal(x0), {}, o);
        return py::make_tuple(to_array(z), errors(rep));
      },
      py::arg("y"), py::arg("x0"), py::arg("loss") = "intensity", py::arg("max_iter") = 1000, py::arg("tol") = 1e-10);

  m.def(
      "sdp_recover",
      [](const MeasurementSet& y, double eps, double tol, std::size_t max_iter) {
        return sdp_solve(build_trace_from_model(y, eps), tol, max_iter);
      },
      py::arg("y"), py::arg("eps") = 0.0, py::arg("tol") = 1e-7, py::arg("max_iter") = 20000);
  m.def(
      "sdp_recover_stft",
      [](const MeasurementSet& y, std::optional<CVec> known_prefix, double tol, std::size_t max_iter) {
        if (!y.model.window) throw std::invalid_argument("sdp_recover_stft: STFT measurements required");
        return sdp_solve(build_stft_sdp(y, *y.model.window, known_prefix), tol, max_iter);
      },
      py::arg("y"), py::arg("known_prefix") = std::nullopt, py::arg("tol") = 1e-7, py::arg("max_iter") = 20000);

  m.def(
      "stft_ls_recover",
      [](const MeasurementSet& y) {
        if (!y.model.window) throw std::invalid_argument("stft_ls_recover: STFT measurements required");
        return to_array(stft_ls_recover(y, *y.model.window));
      },
      py::arg("y"));
  m.def(
      "stft_init",
      [](const MeasurementSet& y, double lambda) {
        if (!y.model.window) throw std::invalid_argument("stft_init: STFT measurements required");
        return to_array(stft_init_heuristic(y, *y.model.window, lambda));
      },
      py::arg("y"), py::arg("lam") = 1e-6);

  m.def(
      "gespar",
      [](const MeasurementSet& y, std::size_t s, std::size_t restarts, std::uint64_t seed) {
        GesparOptions o;
        o.restarts = restarts;
        auto [z, rep] = gespar(y, s, o, Rng(seed));
        return py::make_tuple(to_array(z), rep.success);
      },
      py::arg("y"), py::arg("sparsity"), py::arg("restarts") = 100, py::arg("seed") = 0);
}
