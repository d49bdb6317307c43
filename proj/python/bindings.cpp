#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specgraph/bloch.hpp"
#include "specgraph/error.hpp"
#include "specgraph/io.hpp"
#include "specgraph/parallel.hpp"
#include "specgraph/pipeline.hpp"
#include "specgraph/sweep.hpp"

namespace py = pybind11;
using namespace specgraph;

namespace {

LaurentCharPoly as_poly(const py::object& obj) {
  if (py::isinstance<LaurentCharPoly>(obj)) return obj.cast<LaurentCharPoly>();
  return parse_char_poly(obj.cast<std::string>());
}

GraphDocument run_extract(const py::object& poly_obj, int resolution, int refine,
                          double merge_tol, double short_edge, bool use_symmetry,
                          std::optional<std::vector<double>> window, int workers) {
  const LaurentCharPoly poly = as_poly(poly_obj);
  ExtractionConfig config;
  config.base_resolution = resolution;
  config.subdivision = refine;
  config.merge_tol_px = merge_tol;
  config.short_edge_px = short_edge;
  config.use_symmetry = use_symmetry;
  config.workers = workers;
  if (window) {
    if (window->size() != 4) throw InvalidInput("usage", "window takes re_min, re_max, im_min, im_max");
    const auto& w = *window;
    config.window = EnergyWindow{w[0], w[1], w[2], w[3], resolution};
    config.window->validate();
  }
  py::gil_scoped_release release;
  return make_document(poly, config, extract(poly, config));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-boundary spectral graphs of one-dimensional lattice models";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ParseError> parse_error(m, "ParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::object exc = py::handle(parse_error.ptr())(e.what());
      exc.attr("stage") = e.stage();
      exc.attr("position") = e.position();
      PyErr_SetObject(parse_error.ptr(), exc.ptr());
    } catch (const Error& e) {
      py::object exc = py::handle(error.ptr())(e.what());
      exc.attr("stage") = e.stage();
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.attr("SCHEMA_VERSION") = std::string(kSchemaVersion);

  py::class_<LaurentCharPoly>(m, "Polynomial")
      .def(py::init([](const std::string& text) { return parse_char_poly(text); }), py::arg("text"))
      .def_property_readonly("p", &LaurentCharPoly::p)
      .def_property_readonly("q", &LaurentCharPoly::q)
      .def_property_readonly("bands", &LaurentCharPoly::bands)
      .def_property_readonly("class_key",
                             [](const LaurentCharPoly& poly) { return class_signature(poly).canonical_key; })
      .def("reciprocal", &reciprocal)
      .def("__str__", &LaurentCharPoly::to_string)
      .def("__repr__", [](const LaurentCharPoly& poly) { return "Polynomial('" + poly.to_string() + "')"; })
      .def(py::self == py::self);

  py::class_<GraphDocument>(m, "Graph")
      .def_static("from_json", [](const std::string& text) { return parse_graph(text); })
      .def_property_readonly("polynomial", [](const GraphDocument& d) { return d.polynomial; })
      .def_property_readonly("node_count", [](const GraphDocument& d) { return d.stats.node_count; })
      .def_property_readonly("edge_count", [](const GraphDocument& d) { return d.stats.edge_count; })
      .def_property_readonly("component_count",
                             [](const GraphDocument& d) { return d.stats.component_count; })
      .def_property_readonly("refined_fraction",
                             [](const GraphDocument& d) { return d.stats.refined_fraction; })
      .def_property_readonly("window", [](const GraphDocument& d) {
        return std::vector<double>{d.window.re_min, d.window.re_max, d.window.im_min,
                                   d.window.im_max};
      })
      .def("to_json", &serialize_graph)
      .def("to_graphml",
           [](const GraphDocument& d, bool include_pts) { return export_graphml(d.graph, include_pts); },
           py::arg("include_pts") = true)
      .def(py::self == py::self);

  m.def("extract", &run_extract, py::arg("poly"), py::arg("resolution") = 256, py::arg("refine") = 4,
        py::arg("merge_tol") = 5.0, py::arg("short_edge") = 20.0, py::arg("use_symmetry") = true,
        py::arg("window") = py::none(), py::arg("workers") = 0,
        "Extract the spectral graph of a polynomial given as text or Polynomial.");

  m.def(
      "chain_spectrum",
      [](const py::object& poly_obj, int cells, bool periodic) {
        const LaurentCharPoly poly = as_poly(poly_obj);
        py::gil_scoped_release release;
        return chain_spectrum(poly, cells, periodic ? Boundary::Periodic : Boundary::Open);
      },
      py::arg("poly"), py::arg("cells") = 200, py::arg("periodic") = false);

  m.def(
      "enumerate_classes",
      [](int bands, std::vector<int> ranges, int free_coefficients, bool constant_interior,
         bool free_on_energy_slots) {
        ClassEnumSpec spec;
        spec.bands = bands;
        spec.ranges = std::move(ranges);
        spec.free_coefficients = free_coefficients;
        spec.constant_interior = constant_interior;
        spec.free_on_energy_slots = free_on_energy_slots;
        const Enumeration e = enumerate_classes(spec);
        py::list out;
        for (const EnumeratedClass& c : e.classes) {
          py::dict row;
          row["template"] = c.representative.text();
          row["class_key"] = c.signature.canonical_key;
          row["p"] = c.p;
          row["q"] = c.q;
          out.append(row);
        }
        return out;
      },
      py::arg("bands") = 1, py::arg("ranges") = std::vector<int>{4, 5, 6},
      py::arg("free_coefficients") = 2, py::arg("constant_interior") = false,
      py::arg("free_on_energy_slots") = true);

  m.def(
      "run_sweep_config",
      [](const std::string& config_json, const std::string& out_dir) {
        const SweepConfig cfg = parse_sweep_config(config_json);
        const ParamPolyTemplate t = ParamPolyTemplate::parse(cfg.template_text);
        py::gil_scoped_release release;
        const SweepResult result = run_sweep(t, cfg.spec);
        write_sweep(result, out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir));
        return manifest_csv(result);
      },
      py::arg("config_json"), py::arg("out_dir") = "",
      "Run a sweep described by a JSON config; returns the manifest CSV.");

  m.def("set_default_workers", &set_default_workers, py::arg("workers"));
}
