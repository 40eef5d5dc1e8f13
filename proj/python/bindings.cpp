#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pickmap/errors.hpp"
#include "pickmap/experiment.hpp"
#include "pickmap/holomap.hpp"
#include "pickmap/kernel.hpp"
#include "pickmap/operator_r.hpp"
#include "pickmap/pick.hpp"

namespace py = pybind11;
using namespace pickmap;

namespace {

std::vector<BallPoint> to_points(const std::vector<std::vector<Complex>>& raw, const Tolerances& tol) {
  std::vector<BallPoint> out;
  out.reserve(raw.size());
  for (const auto& r : raw)
    out.emplace_back(r, tol.eps_ball);
  return out;
}

py::dict union_to_dict(const UnionReport& u) {
  py::dict d;
  d["union_norm"] = u.union_norm;
  d["piece_norms"] = u.piece_norms;
  d["separator_norms"] = u.separator_norms;
  d["bound"] = u.bound;
  d["slack"] = u.slack;
  d["holds"] = u.holds;
  return d;
}

} // namespace

PYBIND11_MODULE(_pickmap, m) {
  m.doc() = "Drury-Arveson kernels, Pick multiplier norms and holomap operators";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("eps_ball", &Tolerances::eps_ball)
      .def_readwrite("tol_node", &Tolerances::tol_node)
      .def_readwrite("tol_psd", &Tolerances::tol_psd)
      .def_readwrite("tol_herm", &Tolerances::tol_herm)
      .def_readwrite("tol_eig", &Tolerances::tol_eig)
      .def_readwrite("tol_chol", &Tolerances::tol_chol)
      .def_readwrite("tol_transversal", &Tolerances::tol_transversal)
      .def_readwrite("tol_inj", &Tolerances::tol_inj)
      .def_readwrite("tol_proper", &Tolerances::tol_proper)
      .def_readwrite("tol_kernel", &Tolerances::tol_kernel)
      .def_readwrite("tol_oracle", &Tolerances::tol_oracle)
      .def_readwrite("tol_sep", &Tolerances::tol_sep)
      .def_readwrite("tol_union", &Tolerances::tol_union);

  // kernel
  m.def("kernel_eval",
        [](const std::vector<Complex>& z, const std::vector<Complex>& w) {
          return kernel_eval(BallPoint(z), BallPoint(w));
        },
        py::arg("z"), py::arg("w"));
  m.def("gram",
        [](const std::vector<std::vector<Complex>>& nodes, const Tolerances& tol) {
          return gram(to_points(nodes, tol), tol).entries;
        },
        py::arg("nodes"), py::arg("tol") = Tolerances{});
  m.def("min_eig_hermitian",
        [](const CMatrix& a, const Tolerances& tol) { return min_eig_hermitian(a, tol); },
        py::arg("a"), py::arg("tol") = Tolerances{});
  m.def("whiten",
        [](const CMatrix& k, const Tolerances& tol) {
          auto w = whiten(k, tol);
          return py::make_tuple(w.lower, w.jitter_applied);
        },
        py::arg("k"), py::arg("tol") = Tolerances{});

  // pick
  py::class_<PickReport>(m, "PickReport")
      .def_readonly("norm", &PickReport::norm)
      .def_readonly("min_eig_at_norm", &PickReport::min_eig_at_norm)
      .def_readonly("whitening_jitter", &PickReport::whitening_jitter)
      .def_readonly("gram_min_eig", &PickReport::gram_min_eig)
      .def_readonly("gram_trace", &PickReport::gram_trace)
      .def_readonly("gram_psd", &PickReport::gram_psd)
      .def("__repr__", [](const PickReport& r) {
        return "PickReport(norm=" + format_double(r.norm) + ")";
      });
  m.def("multiplier_norm",
        [](const std::vector<std::vector<Complex>>& nodes, const std::vector<Complex>& values,
           const Tolerances& tol) {
          return multiplier_norm(PickProblem{to_points(nodes, tol), values}, tol);
        },
        py::arg("nodes"), py::arg("values"), py::arg("tol") = Tolerances{});
  m.def("separator_bound",
        [](const std::vector<std::vector<Complex>>& a, const std::vector<std::vector<Complex>>& b,
           const Tolerances& tol) { return separator_bound(to_points(a, tol), to_points(b, tol), tol); },
        py::arg("a_nodes"), py::arg("b_nodes"), py::arg("tol") = Tolerances{});
  m.def("union_norm_check",
        [](const std::vector<std::vector<Complex>>& a, const std::vector<Complex>& av,
           const std::vector<std::vector<Complex>>& b, const std::vector<Complex>& bv,
           const Tolerances& tol) {
          return union_to_dict(
              union_norm_check(to_points(a, tol), av, to_points(b, tol), bv, tol));
        },
        py::arg("a_nodes"), py::arg("a_values"), py::arg("b_nodes"), py::arg("b_values"),
        py::arg("tol") = Tolerances{});

  // holomap
  py::class_<Holomap>(m, "Holomap")
      .def(py::init<std::vector<std::vector<Complex>>>(), py::arg("components"))
      .def_property_readonly("dim", &Holomap::dim)
      .def_property_readonly("degree", &Holomap::degree)
      .def_property_readonly("components", &Holomap::components)
      .def("eval", &Holomap::eval, py::arg("z"))
      .def("deriv", &Holomap::deriv, py::arg("z"));
  py::class_<BoundaryGrid>(m, "BoundaryGrid")
      .def(py::init<std::size_t>(), py::arg("n"))
      .def("__len__", &BoundaryGrid::size)
      .def_property_readonly("nodes", &BoundaryGrid::nodes)
      .def_property_readonly("weight", &BoundaryGrid::weight);
  m.def("transversality_margin", &transversality_margin, py::arg("h"), py::arg("grid"));
  m.def("boundary_injectivity_check",
        [](const Holomap& h, const BoundaryGrid& g, const Tolerances& tol) {
          auto r = boundary_injectivity_check(h, g, tol);
          return py::make_tuple(r.injective, r.witness, r.min_separation);
        },
        py::arg("h"), py::arg("grid"), py::arg("tol") = Tolerances{});

  // operator R
  py::class_<MonomialMap>(m, "MonomialMap")
      .def(py::init([](int p, int q, double alpha, double beta) {
             MonomialMap mm{p, q, alpha, beta};
             mm.validate();
             return mm;
           }),
           py::arg("p"), py::arg("q"), py::arg("alpha"), py::arg("beta"))
      .def_readonly("p", &MonomialMap::p)
      .def_readonly("q", &MonomialMap::q)
      .def_readonly("alpha", &MonomialMap::alpha)
      .def_readonly("beta", &MonomialMap::beta)
      .def("to_holomap", &MonomialMap::to_holomap);
  m.def("c_m_oracle", &c_m_oracle, py::arg("map"), py::arg("m"));
  m.def("toeplitz_symbol", &toeplitz_symbol, py::arg("map"));
  m.def("semigroup_gaps",
        [](const std::vector<int>& gens, int max_mode) { return semigroup_gaps(gens, max_mode); },
        py::arg("generators"), py::arg("max_mode"));
  m.def("r_matrix",
        [](const Holomap& h, const BoundaryGrid& g, int modes, const Tolerances& tol) {
          return r_matrix(h, g, modes, tol).entries;
        },
        py::arg("h"), py::arg("grid"), py::arg("modes"), py::arg("tol") = Tolerances{});
  m.def("m_kernel_matrix",
        [](const Holomap& h, const BoundaryGrid& g, const Tolerances& tol) {
          auto mk = m_kernel_matrix(h, g, tol);
          py::dict d;
          d["values"] = mk.values;
          d["sup_abs"] = mk.sup_abs;
          d["hs_norm"] = mk.hs_norm;
          d["diagonal_fill_discrepancy"] = mk.diagonal_fill_discrepancy;
          d["regime"] = to_string(mk.regime);
          return d;
        },
        py::arg("h"), py::arg("grid"), py::arg("tol") = Tolerances{});
  m.def("spectrum_report",
        [](const Holomap& h, const BoundaryGrid& g, int modes, const Tolerances& tol) {
          auto s = spectrum_report(h, g, modes, tol);
          py::dict d;
          d["eigenvalues"] = s.eigenvalues;
          d["dominant_mode"] = s.dominant_mode;
          d["gap_modes"] = s.gap_modes;
          d["near_zero_count"] = s.near_zero.size();
          d["near_zero_gap_mass"] = s.near_zero_gap_mass;
          d["kernel_matches_gaps"] = s.kernel_matches_gaps;
          d["min_invertible_eigenvalue"] = s.min_invertible_eigenvalue;
          return d;
        },
        py::arg("h"), py::arg("grid"), py::arg("modes"), py::arg("tol") = Tolerances{});

  // experiments: JSON in, JSON out
  m.def("run_experiment_json", [](const std::string& config) {
    auto report = run_experiment(parse_config(nlohmann::json::parse(config)));
    return report.to_json().dump();
  }, py::arg("config"));
  m.def("run_experiment_tables", [](const std::string& config) {
    return run_experiment(parse_config(nlohmann::json::parse(config))).tables;
  }, py::arg("config"));
}
