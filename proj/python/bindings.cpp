#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holofg/graph.hpp"
#include "holofg/heat.hpp"
#include "holofg/propagator.hpp"
#include "holofg/runner.hpp"

namespace py = pybind11;
using namespace holofg;

namespace {

RVec to_rvec(const std::vector<double>& x, const Lattice& lat) {
  if (static_cast<int>(x.size()) != lat.real_dim()) throw std::invalid_argument("point needs 2n real coordinates");
  RVec v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i];
  return v;
}

HeatMethod method_from(const std::string& m) {
  if (m == "image") return HeatMethod::Image;
  if (m == "spectral") return HeatMethod::Spectral;
  if (m == "auto") return HeatMethod::Auto;
  throw std::invalid_argument("method must be 'image', 'spectral' or 'auto'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flat-torus heat kernels, propagators and config runner";
  m.attr("SCHEMA_VERSION") = kSchemaVersion;
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Lattice>(m, "Lattice")
      .def(py::init([](int n, const std::vector<std::vector<double>>& rows) {
             std::vector<double> flat;
             for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
             if (static_cast<int>(flat.size()) != 4 * n * n) throw std::invalid_argument("basis must be 2n x 2n");
             return Lattice(n, flat);
           }),
           py::arg("n"), py::arg("basis"))
      .def_static("square", &Lattice::square, py::arg("n"))
      .def_property_readonly("n", &Lattice::n)
      .def_property_readonly("covolume", &Lattice::covolume)
      .def_property_readonly("shortest_vector", &Lattice::shortest_vector)
      .def("scaled", &Lattice::scaled)
      .def("hash", &Lattice::hash);

  py::class_<HeatKernel>(m, "HeatKernel")
      .def(py::init<Lattice>())
      .def("scalar",
           [](const HeatKernel& h, const std::vector<double>& x, double t, const std::string& method) {
             CertifiedValue v = h.scalar(to_rvec(x, h.lattice()), t, method_from(method));
             return py::make_tuple(v.value, v.tail_bound);
           },
           py::arg("x"), py::arg("t"), py::arg("method") = "auto",
           "Scalar coefficient at x = z - w and its certified tail bound.")
      .def_property_readonly("crossover_t", &HeatKernel::crossover_t);

  py::class_<Propagator>(m, "Propagator")
      .def(py::init([](Lattice lat, double split_L, double tol) { return Propagator(std::move(lat), {split_L, tol}); }),
           py::arg("lattice"), py::arg("split_L") = 0.2, py::arg("tol") = 1e-12)
      .def("components",
           [](const Propagator& p, const std::vector<double>& x) { return p.components(to_rvec(x, p.lattice())); },
           py::arg("x"));

  m.def(
      "zero_by_type",
      [](int vertices, const std::vector<std::pair<int, int>>& edges, int n) {
        DirectedGraph g{vertices, {}};
        for (auto [t, h] : edges) g.edges.push_back({t, h});
        return degree_selection(g, n) == TypeVerdict::ZeroByType;
      },
      py::arg("vertices"), py::arg("edges"), py::arg("n"));

  m.def(
      "run_config",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<unsigned> threads,
         const std::string& cache_dir, const std::string& base_dir) {
        RunOverrides ov;
        ov.seed = seed;
        ov.threads = threads;
        ov.cache_dir = cache_dir;
        ov.base_dir = base_dir;
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = run_config(text, ov);
        }
        py::dict d;
        d["command"] = out.command;
        d["json"] = out.json;
        d["csv"] = out.csv;
        d["files"] = out.files;
        d["log"] = out.log;
        d["exit_code"] = out.exit_code;
        return d;
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = py::none(), py::arg("cache_dir") = "",
      py::arg("base_dir") = ".");
  m.def("config_hash", &config_hash);
}
