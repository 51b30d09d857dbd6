#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hsdoa/config.hpp"
#include "hsdoa/errors.hpp"
#include "hsdoa/experiments.hpp"

namespace py = pybind11;
using namespace hsdoa;

namespace {

RunConfig scene_from(const std::string& toml_text, std::optional<std::uint64_t> seed) {
  auto rc = parse_run_config(toml_text);
  if (seed) rc.scene.seed = *seed;
  return rc;
}

py::dict estimate_dict(const EstimationResult& r, AlgorithmId id) {
  py::dict d;
  d["algorithm"] = std::string(to_string(id));
  d["theta_deg"] = r.theta_deg;
  d["support"] = r.support;
  d["warning"] = r.warning ? py::cast(*r.warning) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_hsdoa, m) {
  m.doc() = "Broadband DOA estimation for sparse uniform linear arrays";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.attr("algorithms") = [] {
    std::vector<std::string> names;
    for (const auto id : kAllAlgorithms) names.emplace_back(to_string(id));
    return names;
  }();

  m.def(
      "synthesize",
      [](const std::string& scene_toml, std::uint64_t trial, std::optional<std::uint64_t> seed) {
        const auto w = synthesize_received(scene_from(scene_toml, seed).scene, trial);
        return py::make_tuple(RMatrix(w.samples), w.fs_hz);
      },
      py::arg("scene_toml"), py::arg("trial") = 0, py::arg("seed") = py::none(),
      "Received waveforms (M x N) and the sample rate for a TOML scene.");

  m.def(
      "estimate",
      [](const std::string& scene_toml, const std::string& algo, std::uint64_t trial,
         std::optional<std::uint64_t> seed) {
        const auto rc = scene_from(scene_toml, seed);
        const auto id = parse_algorithm(algo);
        RunResult r;
        {
          py::gil_scoped_release release;
          const Pipeline p(rc.scene.geometry, rc.scene.pulse, rc.pipeline);
          r = p.run(id, synthesize_received(rc.scene, trial));
        }
        return estimate_dict(r.estimate, id);
      },
      py::arg("scene_toml"), py::arg("algo") = "ptft-hscfd", py::arg("trial") = 0,
      py::arg("seed") = py::none());

  m.def(
      "estimate_waveforms",
      [](const std::string& scene_toml, const RMatrix& samples, double fs_hz, const std::string& algo) {
        const auto rc = parse_run_config(scene_toml);
        const auto id = parse_algorithm(algo);
        const Pipeline p(rc.scene.geometry, rc.scene.pulse, rc.pipeline);
        return estimate_dict(p.run(id, SampledWaveforms{samples, fs_hz}).estimate, id);
      },
      py::arg("scene_toml"), py::arg("samples"), py::arg("fs_hz"), py::arg("algo") = "ptft-hscfd",
      "Run a pipeline on caller-supplied waveforms; the scene supplies geometry and pulse.");

  m.def(
      "sensing_matrix",
      [](int sensors, double spacing_m, double speed_mps, double delta_f_hz, double grid_step_deg) {
        ArrayGeometry g;
        g.sensors = sensors;
        g.spacing_m = spacing_m;
        g.speed_mps = speed_mps;
        g.validate();
        const auto s = sensing_matrix(g, delta_f_hz, angle_grid(-90.0, 90.0, grid_step_deg));
        return py::make_tuple(s.columns, s.grid_deg);
      },
      py::arg("sensors") = 16, py::arg("spacing_m") = 3.75, py::arg("speed_mps") = 1500.0,
      py::arg("delta_f_hz") = 200.0, py::arg("grid_step_deg") = 0.1);

  m.def(
      "solve_l1",
      [](const CMatrix& a, const CVector& z, double mu, double tol, int max_iter, bool polish) {
        L1Options opt;
        opt.mu = mu;
        opt.tol = tol;
        opt.max_iter = max_iter;
        opt.polish = polish;
        L1Solution s;
        {
          py::gil_scoped_release release;
          s = solve_l1(a, z, opt);
        }
        py::dict d;
        d["x"] = s.x;
        d["objective"] = s.objective;
        d["iterations"] = s.iterations;
        d["converged"] = s.converged;
        return d;
      },
      py::arg("a"), py::arg("z"), py::arg("mu") = 0.1, py::arg("tol") = 1e-6, py::arg("max_iter") = 2000,
      py::arg("polish") = true, "argmin ||z - A x||^2 + mu ||x||_1 over complex x.");

  m.def("l1_objective", &l1_objective, py::arg("a"), py::arg("z"), py::arg("x"), py::arg("mu"));

  m.def(
      "kkt_residual",
      [](const CMatrix& a, const CVector& z, const CVector& x, double mu) {
        const auto r = kkt_residual(a, z, x, mu);
        return py::make_tuple(r.zero_violation, r.support_violation, r.support_size);
      },
      py::arg("a"), py::arg("z"), py::arg("x"), py::arg("mu"));

  m.def(
      "estimate_doas",
      [](const std::vector<double>& pool, double zeta_deg, int k) {
        return estimate_doas(pool, zeta_deg, k).theta_deg;
      },
      py::arg("pool"), py::arg("zeta_deg") = 2.0, py::arg("k") = 2,
      "Coarse-to-fine histogram estimate from a pool of peak angles.");

  m.def("rmse", &rmse, py::arg("truth"), py::arg("estimates"));
  m.def("quantization_floor", &quantization_floor, py::arg("grid_step_deg") = 0.1);
}
