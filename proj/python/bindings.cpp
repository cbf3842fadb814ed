// Python bindings. Structured results cross the boundary as JSON text and are
// decoded on the Python side; profiles come back as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavefront/asymptotics.hpp"
#include "wavefront/charfun.hpp"
#include "wavefront/error.hpp"
#include "wavefront/io.hpp"
#include "wavefront/models.hpp"
#include "wavefront/verify.hpp"
#include "wavefront/wavesolver.hpp"

namespace py = pybind11;
using namespace wavefront;
using io::json;

namespace {

struct PyModel {
  ModelSpec spec;
  std::string source;  // JSON text the model was built from
};

PyModel model_from_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("model: ") + e.what());
  }
  return {io::model_from_json(j, base_dir), text};
}

double speed_of(const PyModel& m, std::optional<double> c) {
  if (c) return *c;
  if (m.spec.c) return *m.spec.c;
  throw Error(ErrorCode::InvalidArgument, "no speed: pass c or set \"c\" in the model");
}

Grid grid_of(const std::tuple<double, double, int>& g) {
  return Grid::make(std::get<0>(g), std::get<1>(g), std::get<2>(g));
}

SolveOptions solve_options(double tol, int max_iter, double damping) {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  o.damping = damping;
  return o;
}

py::tuple profile_tuple(const WaveProfile& p, bool stalled) {
  py::array_t<double> t(p.grid.n), v(p.grid.n);
  auto tw = t.mutable_unchecked<1>();
  auto vw = v.mutable_unchecked<1>();
  for (int i = 0; i < p.grid.n; ++i) {
    tw(i) = p.t(i);
    vw(i) = p.values[i];
  }
  json meta = io::to_json(p);
  meta["stalled"] = stalled;
  try {
    meta["decay_fit"] = io::to_json(fit_decay(p));
  } catch (const Error&) {
    meta["decay_fit"] = nullptr;
  }
  return py::make_tuple(t, v, io::dump(meta, 0));
}

}  // namespace

PYBIND11_MODULE(_wavefront, m) {
  m.doc() = "Semi-wavefronts of scalar convolution equations: spectra, speeds, profiles and checks.";

  static py::exception<Error> exc(m, "WavefrontError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = exc;
      py::object inst = err(std::string(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  py::class_<PyModel>(m, "Model")
      .def_static("from_json", &model_from_text, py::arg("text"), py::arg("base_dir") = "")
      .def_property_readonly("family", [](const PyModel& self) { return self.spec.family_name(); })
      .def_property_readonly("c", [](const PyModel& self) { return self.spec.c; })
      .def_property_readonly("bound", [](const PyModel& self) { return self.spec.bound; })
      .def_property_readonly("source", [](const PyModel& self) { return self.source; })
      .def("__repr__", [](const PyModel& self) { return "<wavefront.Model " + self.spec.family_name() + ">"; });

  m.def("version", [] { return std::string(io::version()); });

  m.def(
      "chi",
      [](const PyModel& model, cplx z, std::optional<double> c) {
        return to_convolution_form(model.spec, speed_of(model, c)).chi()(z);
      },
      py::arg("model"), py::arg("z"), py::arg("c") = py::none());

  m.def(
      "analyze",
      [](const PyModel& model, std::optional<double> c) {
        auto p = to_convolution_form(model.spec, speed_of(model, c));
        return io::dump(io::to_json(p.analyze()), 0);
      },
      py::arg("model"), py::arg("c") = py::none());

  m.def("min_speed", [](const PyModel& model) {
    const auto ms = model_min_speed(model.spec);
    return py::make_tuple(ms.c_star, ms.z_star);
  });

  m.def("uniqueness_speed", [](const PyModel& model) { return uniqueness_speed(model.spec).c_star; });

  m.def(
      "solve",
      [](const PyModel& model, std::optional<double> c, std::tuple<double, double, int> grid, double tol,
         int max_iter, double damping) {
        auto p = to_convolution_form(model.spec, speed_of(model, c));
        p.analyze();
        WaveProfile prof;
        bool stalled = false;
        {
          py::gil_scoped_release release;
          try {
            prof = solve_profile(p, grid_of(grid), Init::capped_exponential(), solve_options(tol, max_iter, damping));
          } catch (const MaxIterError& e) {
            prof = e.profile();
            stalled = true;
          }
        }
        return profile_tuple(prof, stalled);
      },
      py::arg("model"), py::arg("c") = py::none(), py::arg("grid") = std::make_tuple(-60.0, 40.0, 4096),
      py::arg("tol") = 1e-10, py::arg("max_iter") = 200000, py::arg("damping") = 0.5);

  m.def(
      "verify",
      [](const PyModel& model, std::optional<double> c, std::tuple<double, double, int> grid, double probe_tol,
         std::vector<double> shifts) {
        const double speed = speed_of(model, c);
        std::vector<Init> inits;
        for (double s : shifts) {
          Init i = Init::capped_exponential();
          i.shift = s;
          inits.push_back(i);
        }
        ProbeOptions po;
        po.tol = probe_tol;
        VerifyReport rep;
        {
          py::gil_scoped_release release;
          rep = uniqueness_probe(model.spec, speed, grid_of(grid), inits, po);
        }
        json j = io::to_json(rep);
        j["exit_code"] = rep.exit_code();
        return io::dump(j, 0);
      },
      py::arg("model"), py::arg("c") = py::none(), py::arg("grid") = std::make_tuple(-60.0, 40.0, 4096),
      py::arg("probe_tol") = 1e-3, py::arg("shifts") = std::vector<double>{0.0, 2.5});

  m.def(
      "scan",
      [](const PyModel& model, std::optional<double> c, double y_max, int nx, int ny) {
        auto p = to_convolution_form(model.spec, speed_of(model, c));
        const auto sd = p.analyze();
        ScanOptions so;
        so.y_max = y_max;
        so.nx = nx;
        so.ny = ny;
        return io::dump(io::to_json(strip_zero_scan(p.chi(), sd, so)), 0);
      },
      py::arg("model"), py::arg("c") = py::none(), py::arg("y_max") = 50.0, py::arg("nx") = 201,
      py::arg("ny") = 2001);
}
