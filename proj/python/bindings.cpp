#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ustlab/cumulant.hpp"
#include "ustlab/degree.hpp"
#include "ustlab/grassmann.hpp"
#include "ustlab/graph.hpp"
#include "ustlab/green.hpp"
#include "ustlab/potential_kernel.hpp"
#include "ustlab/sampler.hpp"
#include "ustlab/scaling.hpp"
#include "ustlab/transfer_current.hpp"

namespace py = pybind11;
using namespace ustlab;

namespace {

std::vector<DirectedEdge> to_edges(const std::vector<std::pair<int, int>>& pairs) {
  std::vector<DirectedEdge> out;
  for (auto& [u, v] : pairs) out.push_back({u, v});
  return out;
}

}  // namespace

PYBIND11_MODULE(_ustlab, m) {
  m.doc() = "exact uniform-spanning-tree statistics";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<GuardError>(m, "GuardError", PyExc_RuntimeError);

  py::class_<FiniteGraph>(m, "FiniteGraph")
      .def(py::init<int, std::vector<std::pair<int, int>>, std::vector<int>>(),
           py::arg("n"), py::arg("edges"), py::arg("boundary") = std::vector<int>{})
      .def_static("complete", &FiniteGraph::complete)
      .def_static("cycle", &FiniteGraph::cycle)
      .def_static("path", &FiniteGraph::path)
      .def_property_readonly("vertex_count", &FiniteGraph::vertex_count)
      .def_property_readonly("interior_count", &FiniteGraph::interior_count)
      .def_property_readonly("edges", &FiniteGraph::edges)
      .def_property_readonly("boundary", &FiniteGraph::boundary)
      .def("degree", &FiniteGraph::degree)
      .def("adjacent", &FiniteGraph::adjacent)
      .def("vertex_at",
           [](const FiniteGraph& g, int n, int mm, int s) {
             auto v = g.vertex_at(n, mm, s);
             return v ? py::cast(*v) : py::none().cast<py::object>();
           },
           py::arg("n"), py::arg("m"), py::arg("sub") = 0)
      .def("to_json", &graph_to_json);

  m.def("grid", [](const std::string& lattice, int w, int h) {
    return build_grid(LatticeSpec::parse(lattice), w, h);
  });
  m.def("disk_grid", &build_disk_grid);
  m.def("graph_from_json", &graph_from_json);

  py::class_<TransferMatrix>(m, "TransferMatrix")
      .def_property_readonly("matrix", &TransferMatrix::matrix)
      .def("entry", [](const TransferMatrix& t, std::pair<int, int> f,
                       std::pair<int, int> g) {
        return t.entry({f.first, f.second}, {g.first, g.second});
      });
  m.def("transfer_matrix", &transfer_matrix);

  m.def("green_table", [](const FiniteGraph& g) {
    return green_auto(g).table();
  });

  m.def("edge_probability",
        [](const TransferMatrix& t, std::vector<std::pair<int, int>> req,
           std::vector<std::pair<int, int>> forb) {
          return edge_probability(t, {to_edges(req), to_edges(forb)});
        },
        py::arg("m"), py::arg("required"),
        py::arg("forbidden") = std::vector<std::pair<int, int>>{});
  m.def("inclusion_exclusion_probability",
        [](const TransferMatrix& t, std::vector<std::pair<int, int>> req,
           std::vector<std::pair<int, int>> forb, int max_enum) {
          return inclusion_exclusion_probability(
              t, {to_edges(req), to_edges(forb)}, max_enum);
        },
        py::arg("m"), py::arg("required"),
        py::arg("forbidden") = std::vector<std::pair<int, int>>{},
        py::arg("max_enum") = 20);

  m.def("degree_pmf_single", &degree_pmf_single, py::arg("m"), py::arg("v"),
        py::arg("k"), py::arg("max_enum") = 20);
  m.def("degree_pmf_joint",
        [](const TransferMatrix& t, std::vector<int> vs, std::vector<int> ks,
           int guard) { return degree_pmf_joint(t, vs, ks, guard); },
        py::arg("m"), py::arg("vertices"), py::arg("degrees"),
        py::arg("max_enum_joint") = 24);
  m.def("kn_degree_closed_form", &kn_degree_closed_form);
  m.def("poisson_limit_gap", &poisson_limit_gap);

  m.def("cumulant_direct",
        [](const TransferMatrix& t, std::vector<int> vs, std::vector<int> ks,
           int budget) { return cumulant_direct(t, {vs, ks}, budget); },
        py::arg("m"), py::arg("vertices"), py::arg("degrees"),
        py::arg("max_sum_edges") = 13);
  m.def("cumulant_via_moments",
        [](const TransferMatrix& t, std::vector<int> vs, std::vector<int> ks) {
          return cumulant_via_moments(t, {vs, ks});
        });
  m.def("neighbor_cumulant", &neighbor_cumulant, py::arg("m"), py::arg("v"),
        py::arg("w"), py::arg("k_v"), py::arg("k_w"), py::arg("edge_in_tree"),
        py::arg("max_sum_edges") = 13);
  m.def("neighbor_joint_probability", &neighbor_joint_probability, py::arg("m"),
        py::arg("v"), py::arg("w"), py::arg("k_v"), py::arg("k_w"),
        py::arg("edge_in_tree"), py::arg("max_sum_edges") = 13);

  m.def("lattice_constant",
        [](const std::string& lattice, int k, double tol) {
          auto spec = LatticeSpec::parse(lattice);
          PotentialKernel kernel(spec, tol);
          return lattice_constant(spec, k, kernel);
        },
        py::arg("lattice"), py::arg("k"), py::arg("tol") = 1e-10);
  m.def("potential_kernel",
        [](const std::string& lattice, int n, int mm, int sub, double tol) {
          PotentialKernel kernel(LatticeSpec::parse(lattice), tol);
          return kernel.at(n, mm, sub);
        },
        py::arg("lattice"), py::arg("n"), py::arg("m"), py::arg("sub") = 0,
        py::arg("tol") = 1e-10);
  m.def("reference_constants", [] {
    py::list rows;
    for (auto& ref : reference_constants()) {
      py::dict d;
      d["lattice"] = ref.lattice;
      d["k"] = ref.k;
      d["value"] = ref.value;
      d["tolerance"] = ref.tolerance;
      rows.append(d);
    }
    return rows;
  });

  m.def("spanning_tree_count", &spanning_tree_count);
  m.def("wilson_sample",
        [](const FiniteGraph& g, uint64_t seed, uint64_t stream) {
          return wilson_sample(g, seed, stream).edge_ids;
        },
        py::arg("graph"), py::arg("seed"), py::arg("stream") = 0);
  m.def("mc_edge_probability",
        [](const FiniteGraph& g, std::vector<std::pair<int, int>> req,
           std::vector<std::pair<int, int>> forb, long long samples,
           uint64_t seed, int threads) {
          auto s = mc_edge_probability(g, to_edges(req), to_edges(forb), samples,
                                       seed, threads);
          return py::make_tuple(s.estimate, s.std_error);
        },
        py::arg("graph"), py::arg("required"), py::arg("forbidden"),
        py::arg("samples"), py::arg("seed"), py::arg("threads") = 1);

  m.def("wick_check",
        [](const Eigen::MatrixXd& a, std::vector<int> i_seq,
           std::vector<int> j_seq) {
          auto w = wick_check_part1(a, i_seq, j_seq);
          return py::make_tuple(w.lhs, w.rhs);
        });
}
