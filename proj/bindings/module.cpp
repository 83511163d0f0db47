// Copyright 2026 The Dissim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dissim/amplitude.hpp"
#include "dissim/channels.hpp"
#include "dissim/device.hpp"
#include "dissim/errors.hpp"
#include "dissim/hilbert.hpp"
#include "dissim/master.hpp"
#include "dissim/serialize.hpp"

namespace py = pybind11;
using namespace dissim;

namespace {

py::object state_to_py(const DeviceState& state) {
  if (const Vector* alpha = std::get_if<Vector>(&state)) {
    return py::cast(*alpha);
  }
  if (const DensityMatrix* rho = std::get_if<DensityMatrix>(&state)) {
    return py::cast(*rho);
  }
  return py::cast(std::get<PopulationVector>(state));
}

DeviceState state_from_py(const py::object& obj) {
  if (py::isinstance<DensityMatrix>(obj)) return obj.cast<DensityMatrix>();
  if (py::isinstance<PopulationVector>(obj)) return obj.cast<PopulationVector>();
  return obj.cast<Vector>();
}

}  // namespace

PYBIND11_MODULE(_dissim, m) {
  m.doc() = "bipartite designed-loss device simulator";

  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<TruncatedSpace>(m, "TruncatedSpace")
      .def(py::init<int, std::vector<int>>(), py::arg("num_modes"), py::arg("cutoffs"))
      .def_property_readonly("num_modes", &TruncatedSpace::num_modes)
      .def_property_readonly("cutoffs", &TruncatedSpace::cutoffs)
      .def_property_readonly("dim", &TruncatedSpace::dim)
      .def("__eq__", [](const TruncatedSpace& a, const TruncatedSpace& b) { return a == b; });

  py::class_<OperatorMatrix>(m, "OperatorMatrix")
      .def(py::init<TruncatedSpace, Matrix>(), py::arg("space"), py::arg("entries"))
      .def_property_readonly("space", &OperatorMatrix::space)
      .def_property_readonly("entries", &OperatorMatrix::entries)
      .def("adjoint", &OperatorMatrix::adjoint)
      .def("is_hermitian", &OperatorMatrix::is_hermitian, py::arg("tol") = 1e-10);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<TruncatedSpace, Matrix>(), py::arg("space"), py::arg("entries"))
      .def_property_readonly("space", &DensityMatrix::space)
      .def_property_readonly("entries", &DensityMatrix::entries)
      .def_property_readonly("trace", &DensityMatrix::trace_real)
      .def("min_eigenvalue", &DensityMatrix::min_eigenvalue);

  py::class_<PopulationVector>(m, "PopulationVector")
      .def(py::init<TruncatedSpace, RealVector>(), py::arg("space"), py::arg("probs"))
      .def_property_readonly("space", &PopulationVector::space)
      .def_property_readonly("probs", &PopulationVector::probs)
      .def_property_readonly("mean", &PopulationVector::mean);

  m.def("make_space", [](int num_modes, std::vector<int> cutoffs) {
    return TruncatedSpace(num_modes, std::move(cutoffs));
  });
  m.def("annihilation", &annihilation, py::arg("space"), py::arg("mode"));
  m.def("creation", &creation);
  m.def("number_operator", &number_operator);
  m.def("identity_operator", &identity_operator);
  m.def("coherent_state", &coherent_state);
  m.def("fock_state", &fock_state);
  m.def("pure_state", &pure_state);
  m.def("single_photon_superposition", &single_photon_superposition);
  m.def("poisson_populations", &poisson_populations);
  m.def("default_cutoff", &default_cutoff);
  m.def("expectation", &expectation);
  m.def("photon_distribution", &photon_distribution);
  m.def("mandel_q", &mandel_q);
  m.def("mean_photon_number", &mean_photon_number);

  // master engine
  py::class_<LindbladTerm>(m, "LindbladTerm")
      .def(py::init<double, OperatorMatrix>(), py::arg("rate"), py::arg("op"))
      .def_readonly("rate", &LindbladTerm::rate)
      .def_readonly("op", &LindbladTerm::op);
  m.def("two_photon_loss_op", &two_photon_loss_op);
  m.def("nonlinear_coherent_loss_op", &nonlinear_coherent_loss_op);

  py::class_<DiagonalLossFamily>(m, "DiagonalLossFamily")
      .def(py::init<>())
      .def("add", &DiagonalLossFamily::add)
      .def("add_single_photon", &DiagonalLossFamily::add_single_photon)
      .def("add_two_photon", &DiagonalLossFamily::add_two_photon)
      .def("add_ncl", &DiagonalLossFamily::add_ncl)
      .def("lindblad_terms", &DiagonalLossFamily::lindblad_terms);

  py::class_<Superoperator>(m, "Superoperator")
      .def_property_readonly("entries", &Superoperator::entries)
      .def("trace_preservation_defect", &Superoperator::trace_preservation_defect);
  m.def("build_liouvillian", &build_liouvillian);
  m.def("apply_generator", &apply_generator);
  m.def(
      "evolve",
      [](const DensityMatrix& rho, const std::vector<LindbladTerm>& terms,
         double duration, double rel_tol) {
        EvolveOptions options;
        options.rel_tol = rel_tol;
        return evolve(rho, terms, duration, options);
      },
      py::arg("rho"), py::arg("terms"), py::arg("duration"), py::arg("rel_tol") = 1e-8);
  m.def("evolve_populations", &evolve_populations);
  m.def("population_generator", &population_generator);
  m.def("population_propagator", &population_propagator);
  m.def("stationary_residual", &stationary_residual);

  // amplitude engine
  py::class_<LinearLindblad>(m, "LinearLindblad")
      .def(py::init<double, Vector>(), py::arg("rate"), py::arg("coeffs"))
      .def_readonly("rate", &LinearLindblad::rate)
      .def_readonly("coeffs", &LinearLindblad::coeffs);
  py::class_<CouplingMatrix>(m, "CouplingMatrix")
      .def(py::init<Matrix>())
      .def_property_readonly("entries", &CouplingMatrix::entries);
  py::class_<ScatteringMatrix>(m, "ScatteringMatrix")
      .def(py::init<Matrix>())
      .def_property_readonly("entries", &ScatteringMatrix::entries);
  m.def("coupling_matrix", &coupling_matrix);
  m.def("propagate", &propagate);
  m.def("asymptotic_scatter", &asymptotic_scatter);
  m.def("compose", &compose);
  m.def("asymmetry_ratio", &asymmetry_ratio);
  m.def("loss_diag", &loss_diag);
  m.def("reciprocal_mod_gauge", [](const ScatteringMatrix& s, double tol) {
    const GaugeCheckResult r = reciprocal_mod_gauge(s, tol);
    py::dict out;
    out["reciprocal"] = r.reciprocal;
    out["output_phases"] = r.output_phases;
    out["witness"] = r.witness ? py::cast(*r.witness) : py::none();
    return out;
  }, py::arg("s"), py::arg("tol") = 1e-9);

  // channels
  py::class_<KrausChannel>(m, "KrausChannel")
      .def(py::init<TruncatedSpace, std::vector<Matrix>>(), py::arg("space"), py::arg("ops"))
      .def_property_readonly("ops", &KrausChannel::ops)
      .def("completeness_defect", &KrausChannel::completeness_defect);
  py::class_<UnitaryChannel>(m, "UnitaryChannel")
      .def_property_readonly("matrix", &UnitaryChannel::matrix)
      .def("as_kraus", &UnitaryChannel::as_kraus);
  m.def("apply_channel",
        py::overload_cast<const KrausChannel&, const DensityMatrix&>(&apply));
  m.def("apply_unitary",
        py::overload_cast<const UnitaryChannel&, const DensityMatrix&>(&apply));
  m.def("threshold_channel", &threshold_channel);
  m.def("dephase", py::overload_cast<const TruncatedSpace&>(&dephase));
  m.def("dephase_in_basis",
        py::overload_cast<const TruncatedSpace&, const std::vector<Vector>&>(&dephase));
  m.def("beam_splitter", &beam_splitter);
  m.def("correlation_observable", &correlation_observable);
  m.def("noncommutativity_witness", &noncommutativity_witness);

  // device model
  py::class_<DeviceSpec>(m, "DeviceSpec")
      .def_readonly("modes", &DeviceSpec::modes)
      .def_readonly("cutoffs", &DeviceSpec::cutoffs)
      .def_property_readonly("num_parts",
                             [](const DeviceSpec& d) { return d.parts.size(); })
      .def("space", &DeviceSpec::space)
      .def("reversed", &DeviceSpec::reversed);
  m.def("parse_device", &parse_device);
  m.def("forward", [](const DeviceSpec& device, const py::object& state) {
    return state_to_py(forward(device, state_from_py(state)));
  });
  m.def("backward", [](const DeviceSpec& device, const py::object& state) {
    return state_to_py(backward(device, state_from_py(state)));
  });
  m.def("reciprocity_report",
        [](const DeviceSpec& device, const DensityMatrix& probe,
           const std::vector<std::pair<std::string, OperatorMatrix>>& observables,
           double tol) {
          const ReciprocityReport r = reciprocity_report(device, probe, observables, tol);
          py::list entries;
          for (const auto& e : r.entries) {
            py::dict d;
            d["observable"] = e.observable;
            d["p_in"] = e.p_in;
            d["p_forward"] = e.p_forward;
            d["p_backward"] = e.p_backward;
            d["discrepancy"] = e.discrepancy;
            entries.append(d);
          }
          py::dict out;
          out["entries"] = entries;
          out["max_discrepancy"] = r.max_discrepancy;
          out["tolerance"] = r.tolerance;
          out["non_reciprocal"] = r.non_reciprocal;
          return out;
        });
}
