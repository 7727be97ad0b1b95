// Copyright (C) 2026 The tailscore Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "tailscore/commands.hpp"
#include "tailscore/config.hpp"
#include "tailscore/drift.hpp"
#include "tailscore/error.hpp"
#include "tailscore/json_io.hpp"
#include "tailscore/marginals.hpp"
#include "tailscore/pipeline.hpp"
#include "tailscore/random.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace tailscore;

namespace {

std::vector<DataPoint> zip_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("x and y must have the same length");
  std::vector<DataPoint> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = {x[i], y[i]};
  return out;
}

// Run-config JSON text (same schema as the CLI --config file) on top of
// optional experiment defaults.
RunConfig config_from(const std::string& config_json, const std::string& experiment) {
  const RunConfig base = experiment.empty() ? RunConfig{} : experiment_defaults(experiment);
  return parse_run_config(nlohmann::json::parse(config_json.empty() ? "{}" : config_json), base);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tail-adaptive conditional score-based diffusion";

  auto base = py::register_exception<Error>(m, "TailscoreError", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

  m.def("laplace_quantile", &laplace_quantile, py::arg("u"));
  m.def("laplace_cdf", &laplace_cdf, py::arg("z"));

  py::class_<DriftSpec>(m, "DriftSpec")
      .def(py::init([](const std::string& family, double smooth_b, double smooth_c, double location, double scale) {
             DriftSpec d{parse_drift_family(family), smooth_b, smooth_c, location, scale};
             d.validate();
             return d;
           }),
           py::arg("family") = "gaussian", py::arg("smooth_b") = 0.0, py::arg("smooth_c") = 0.0,
           py::arg("location") = 0.0, py::arg("scale") = 1.0)
      .def_static("gaussian", &DriftSpec::gaussian, py::arg("location") = 0.0, py::arg("scale") = 1.0)
      .def_static("laplace", &DriftSpec::laplace, py::arg("b") = 0.5, py::arg("c") = 0.1, py::arg("location") = 0.0,
                  py::arg("scale") = 1.0)
      .def_static("gumbel", &DriftSpec::gumbel, py::arg("b") = 2.0, py::arg("c") = 1.0, py::arg("location") = 0.0,
                  py::arg("scale") = 1.0)
      .def_property_readonly("family", [](const DriftSpec& d) { return to_string(d.family); })
      .def_readonly("smooth_b", &DriftSpec::smooth_b)
      .def_readonly("smooth_c", &DriftSpec::smooth_c)
      .def_readonly("location", &DriftSpec::location)
      .def_readonly("scale", &DriftSpec::scale)
      .def("grad", [](const DriftSpec& d, double z) { return grad(d, z); }, py::arg("z"))
      .def("hessian", [](const DriftSpec& d, double z) { return hessian(d, z); }, py::arg("z"))
      .def("condition_number", [](const DriftSpec& d) { return condition_number(d); })
      .def("sample_equilibrium",
           [](const DriftSpec& d, std::size_t n, std::uint64_t seed) {
             Rng rng(seed);
             return sample_equilibrium(d, rng, n);
           },
           py::arg("n"), py::arg("seed") = 0)
      .def("__repr__", [](const DriftSpec& d) { return "DriftSpec(" + nlohmann::json(d).dump() + ")"; });

  py::class_<FittedPipeline>(m, "Pipeline")
      .def_static(
          "fit",
          [](const std::vector<double>& x, const std::vector<double>& y, const std::string& config_json,
             std::uint64_t seed) {
            const auto cfg = config_from(config_json, "");
            const auto data = zip_pairs(x, y);
            Rng rng = Rng::substream(seed, "train");
            py::gil_scoped_release release;
            return fit(data, cfg.pipeline, rng);
          },
          py::arg("x"), py::arg("y"), py::arg("config") = "{}", py::arg("seed") = 0)
      .def_static("load", &load_bundle, py::arg("path"))
      .def("save", [](const FittedPipeline& p, const std::filesystem::path& dir) { save_bundle(p, dir); },
           py::arg("path"))
      .def(
          "sample",
          [](const FittedPipeline& p, double x, std::size_t n, std::uint64_t seed) {
            Rng rng = Rng::substream(seed, "sample");
            py::gil_scoped_release release;
            return sample_conditional(p, x, n, rng);
          },
          py::arg("x"), py::arg("n"), py::arg("seed") = 0)
      .def_property_readonly("mode", [](const FittedPipeline& p) { return to_string(p.mode); })
      .def_property_readonly("drift", [](const FittedPipeline& p) { return p.drift; })
      .def_readonly("loss_history", &FittedPipeline::loss_history)
      .def_property_readonly("tail_params", [](const FittedPipeline& p) -> py::object {
        if (!p.cevt) return py::none();
        return py::str(nlohmann::json(*p.cevt).dump());
      });

  m.def(
      "repro",
      [](const std::string& experiment, const std::string& config_json, const std::filesystem::path& out_dir) {
        const auto cfg = config_from(config_json, experiment);
        py::gil_scoped_release release;
        return cmd_repro(experiment, cfg, out_dir).dump();
      },
      py::arg("experiment"), py::arg("config") = "{}", py::arg("out_dir"),
      "Runs both modes of a synthetic experiment; returns comparison.json text.");

  m.def(
      "experiment_defaults",
      [](const std::string& experiment) { return to_json(experiment_defaults(experiment)).dump(); },
      py::arg("experiment"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
