#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nodalcover/cli.hpp"
#include "nodalcover/error.hpp"
#include "nodalcover/io.hpp"

namespace py = pybind11;
using namespace nodalcover;

namespace {

SolverOptions options(int m, double tol, std::uint64_t seed) {
  SolverOptions o;
  o.count = m;
  o.tol = tol;
  o.seed = seed;
  return o;
}

LaplaceKind laplace_kind(const std::string& name) {
  if (name == "graph") return LaplaceKind::kGraph;
  if (name == "cotangent") return LaplaceKind::kCotangent;
  throw Error(ErrorCode::kInvalidParams, "kind must be graph or cotangent");
}

std::string spectrum_json(const SurfaceComplex& c, int m, const std::string& kind, bool dense, double tol, std::uint64_t seed) {
  auto op = assemble(c, laplace_kind(kind));
  auto opt = options(std::min(m, op.dim()), tol, seed);
  return io::to_json(dense ? dense_eigenpairs(op, opt) : lowest_eigenpairs(op, opt)).dump();
}

Spectrum certified(const LaplaceOperator& op, double lambda, int m, double margin) {
  m = std::min(m, op.dim());
  while (true) {
    auto s = lowest_eigenpairs(op, options(m, 1e-10, 7));
    if (s.complete() || s.values.back() > lambda + 2 * margin) return s;
    m = std::min(2 * m, op.dim());
  }
}

}  // namespace

PYBIND11_MODULE(_nodalcover, m) {
  m.doc() = "Spectral instability under finite covers of discrete surfaces";

  py::register_exception<Error>(m, "NodalcoverError", PyExc_RuntimeError);

  py::class_<SurfaceComplex>(m, "Complex")
      .def_readonly("vertex_count", &SurfaceComplex::vertex_count)
      .def_property_readonly("edge_count", &SurfaceComplex::edge_count)
      .def_property_readonly("face_count", &SurfaceComplex::face_count)
      .def_property_readonly("euler_characteristic", [](const SurfaceComplex& c) { return euler_characteristic(c); })
      .def_property_readonly("edges",
                             [](const SurfaceComplex& c) {
                               std::vector<std::tuple<int, int, double>> out;
                               for (const auto& e : c.edges) out.emplace_back(e.u, e.v, e.weight);
                               return out;
                             })
      .def_readonly("mass", &SurfaceComplex::mass)
      .def("to_json", [](const SurfaceComplex& c) { return io::to_json(c).dump(); })
      .def("__repr__", [](const SurfaceComplex& c) {
        return "<Complex V=" + std::to_string(c.vertex_count) + " E=" + std::to_string(c.edge_count()) +
               " F=" + std::to_string(c.face_count()) + ">";
      });

  py::class_<Cover>(m, "Cover")
      .def_readonly("degree", &Cover::degree)
      .def_readonly("connected", &Cover::connected)
      .def_readonly("total", &Cover::total)
      .def("preimage_components",
           [](const Cover& c, std::vector<int> sub) { return preimage_components(c, sub); }, py::arg("subset"));

  m.def("make_surface",
        [](const std::string& kind, std::vector<int> params) {
          auto k = parse_preset_kind(kind);
          if (!k) throw Error(ErrorCode::kInvalidParams, "unknown preset kind " + kind);
          return build_preset(*k, params);
        },
        py::arg("kind"), py::arg("params"));
  m.def("complex_from_json", [](const std::string& text) { return io::complex_from_json(io::Json::parse(text)); });
  m.def("load_complex", [](const std::string& path) { return io::load_complex(path); });
  m.def("load_cover", [](const std::string& path) { return io::load_cover(path).cover; });

  m.def("cyclic_cover",
        [](const SurfaceComplex& c, std::vector<std::int64_t> cochain, int degree) {
          return build_cover(c, cyclic_spec_from_cochain(c, canonical_spanning_tree(c), cochain, degree));
        },
        py::arg("complex"), py::arg("cochain"), py::arg("degree"));

  m.def("spectrum_json", &spectrum_json, py::arg("complex"), py::arg("m") = 6, py::arg("kind") = "graph",
        py::arg("dense") = false, py::arg("tol") = 1e-10, py::arg("seed") = 7);
  m.def("eigenpairs",
        [](const SurfaceComplex& c, int count, const std::string& kind) {
          auto op = assemble(c, laplace_kind(kind));
          auto s = lowest_eigenpairs(op, options(std::min(count, op.dim()), 1e-10, 7));
          return std::make_pair(s.values, Eigen::MatrixXd(s.vectors));
        },
        py::arg("complex"), py::arg("m") = 6, py::arg("kind") = "graph");

  m.def("nodal_json",
        [](const SurfaceComplex& c, const Eigen::VectorXd& phi, double eps) { return io::to_json(nodal_decomposition(c, phi, eps)).dump(); },
        py::arg("complex"), py::arg("vector"), py::arg("zero_eps") = 1e-8);

  m.def("unstable_cover",
        [](const SurfaceComplex& c, int eigen, int domain, int degree) {
          auto op = assemble(c);
          auto first = lowest_eigenpairs(op, options(std::min(eigen + 4, op.dim()), 1e-10, 7));
          auto s = certified(op, first.values.at(static_cast<std::size_t>(eigen)), first.size(), 1e-8);
          auto phi = canonical_cluster_vector(s, s.cluster[static_cast<std::size_t>(eigen)]);
          auto plan = unstable_cover_plan(c, nodal_decomposition(c, phi), domain, degree);
          return build_cover(c, plan.spec);
        },
        py::arg("complex"), py::arg("eigen") = 1, py::arg("domain") = 0, py::arg("degree") = 2);

  m.def("verdict_json",
        [](const SurfaceComplex& base, const Cover& cover, int eigen, double margin) {
          auto bop = assemble(base);
          auto first = lowest_eigenpairs(bop, options(std::min(eigen + 4, bop.dim()), 1e-10, 7));
          const double lambda = first.values.at(static_cast<std::size_t>(eigen));
          auto bs = certified(bop, lambda, first.size(), margin);
          auto cs = certified(assemble(cover.total), lambda, 6, margin);
          return io::to_json(stability_verdict(bs, cs, Target::eigenvalue(eigen), margin)).dump();
        },
        py::arg("base"), py::arg("cover"), py::arg("eigen") = 1, py::arg("margin") = 1e-8);

  m.def("count_subgroups",
        [](const std::string& group, int rank_or_genus, int index) {
          auto p = group == "free" ? free_group(rank_or_genus) : surface_group(rank_or_genus);
          return enumerate_index_n(p, index).size();
        },
        py::arg("group"), py::arg("rank_or_genus"), py::arg("index"));

  m.def("abelian_mu", [](std::vector<int> orders) {
    AbelianInvariants inv;
    for (int k : orders)
      if (k > 1) inv.torsion.push_back(BigInt(k));
    return abelian_mu(inv);
  });

  m.def("respec_json", [](int n, std::uint64_t seed) { return io::to_json(respec_check(random_respec_instance(n, seed))).dump(); },
        py::arg("n") = 50, py::arg("seed") = 1);

  m.def("run_cli",
        [](std::vector<std::string> args) {
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
