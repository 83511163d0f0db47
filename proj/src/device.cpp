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

#include "dissim/device.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "dissim/errors.hpp"

namespace dissim {

using nlohmann::json;

const char* engine_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::Amplitude: return "amplitude";
    case EngineKind::MasterFull: return "master-full";
    case EngineKind::MasterDiagonal: return "master-diagonal";
    case EngineKind::Kraus: return "kraus";
    case EngineKind::Unitary: return "unitary";
  }
  return "?";
}

const char* state_kind_name(const DeviceState& state) {
  if (std::holds_alternative<Vector>(state)) return "amplitudes";
  if (std::holds_alternative<DensityMatrix>(state)) return "density";
  return "populations";
}

DeviceSpec DeviceSpec::reversed() const {
  DeviceSpec r = *this;
  std::reverse(r.parts.begin(), r.parts.end());
  return r;
}

namespace {

EngineKind engine_from_string(const std::string& tag, const std::string& path) {
  if (tag == "amplitude") return EngineKind::Amplitude;
  if (tag == "master-full") return EngineKind::MasterFull;
  if (tag == "master-diagonal") return EngineKind::MasterDiagonal;
  if (tag == "kraus") return EngineKind::Kraus;
  if (tag == "unitary") return EngineKind::Unitary;
  throw SchemaError(path, "unknown engine tag '" + tag + "'");
}

const json& require_field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(path, std::string("missing required field '") + key + "'");
  }
  return *it;
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

int require_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<int>();
}

TermSpec parse_term(const json& v, int modes, const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  TermSpec term;
  term.rate = require_number(require_field(v, "rate", path), path + ".rate");
  if (term.rate < 0.0) throw SchemaError(path + ".rate", "rate must be >= 0");

  const bool has_coeffs = v.contains("coeffs");
  const bool has_kind = v.contains("kind");
  if (has_coeffs == has_kind) {
    throw SchemaError(path, "term needs exactly one of 'coeffs' or 'kind'");
  }
  if (has_coeffs) {
    const json& cs = v["coeffs"];
    if (!cs.is_array() || static_cast<int>(cs.size()) != modes) {
      throw SchemaError(path + ".coeffs", "expected one [re, im] pair per mode");
    }
    for (size_t i = 0; i < cs.size(); ++i) {
      const std::string cpath = path + ".coeffs[" + std::to_string(i) + "]";
      const json& c = cs[i];
      if (!c.is_array() || c.size() != 2) {
        throw SchemaError(cpath, "expected an [re, im] pair");
      }
      term.coeffs.emplace_back(require_number(c[0], cpath),
                               require_number(c[1], cpath));
    }
    bool any_nonzero = false;
    for (const Complex& c : term.coeffs) any_nonzero |= (std::abs(c) != 0.0);
    if (!any_nonzero) {
      throw SchemaError(path + ".coeffs", "all coefficients are zero");
    }
  } else {
    term.kind = v["kind"].get<std::string>();
    if (term.kind != "a" && term.kind != "a2" && term.kind != "ncl") {
      throw SchemaError(path + ".kind", "expected 'a', 'a2' or 'ncl'");
    }
    if (modes != 1) {
      throw SchemaError(path + ".kind",
                        "named loss kinds require a single-mode device");
    }
    if (term.kind == "ncl") {
      term.m = require_int(require_field(v, "m", path), path + ".m");
      if (term.m < 0) throw SchemaError(path + ".m", "threshold must be >= 0");
    }
  }
  return term;
}

PartSpec parse_part(const json& v, int modes, const std::vector<int>& cutoffs,
                    const std::string& path) {
  if (!v.is_object()) throw SchemaError(path, "expected an object");
  PartSpec part;
  part.engine = engine_from_string(
      require_field(v, "engine", path).get<std::string>(), path + ".engine");

  const bool needs_duration = part.engine == EngineKind::Amplitude ||
                              part.engine == EngineKind::MasterFull ||
                              part.engine == EngineKind::MasterDiagonal;
  if (v.contains("duration")) {
    const json& d = v["duration"];
    if (d.is_string()) {
      if (d.get<std::string>() != "asymptotic") {
        throw SchemaError(path + ".duration", "expected a number or \"asymptotic\"");
      }
      if (part.engine != EngineKind::Amplitude) {
        throw SchemaError(path + ".duration",
                          "asymptotic durations are supported for amplitude parts only");
      }
      part.asymptotic = true;
    } else {
      part.duration = require_number(d, path + ".duration");
      if (part.duration < 0.0) {
        throw SchemaError(path + ".duration", "duration must be >= 0");
      }
    }
  } else if (needs_duration) {
    throw SchemaError(path, "missing required field 'duration'");
  }

  const json& params = require_field(v, "params", path);
  const std::string ppath = path + ".params";
  switch (part.engine) {
    case EngineKind::Amplitude:
    case EngineKind::MasterFull:
    case EngineKind::MasterDiagonal: {
      LindbladParams lp;
      const json& terms = require_field(params, "lindblad", ppath);
      if (!terms.is_array() ) {
        throw SchemaError(ppath + ".lindblad", "expected an array of terms");
      }
      for (size_t i = 0; i < terms.size(); ++i) {
        lp.terms.push_back(parse_term(terms[i], modes,
                                      ppath + ".lindblad[" + std::to_string(i) + "]"));
      }
      if (part.engine == EngineKind::Amplitude) {
        for (size_t i = 0; i < lp.terms.size(); ++i) {
          if (!lp.terms[i].kind.empty()) {
            throw SchemaError(ppath + ".lindblad[" + std::to_string(i) + "]",
                              "amplitude parts take linear 'coeffs' terms only");
          }
        }
      }
      if (part.engine == EngineKind::MasterDiagonal) {
        if (modes != 1) {
          throw SchemaError(path + ".engine",
                            "master-diagonal requires a single-mode device");
        }
        for (size_t i = 0; i < lp.terms.size(); ++i) {
          if (lp.terms[i].kind.empty()) {
            throw SchemaError(ppath + ".lindblad[" + std::to_string(i) + "]",
                              "master-diagonal takes named loss kinds only");
          }
        }
      }
      part.params = std::move(lp);
      break;
    }
    case EngineKind::Kraus: {
      KrausParams kp;
      kp.kind = require_field(params, "kind", ppath).get<std::string>();
      if (kp.kind == "threshold") {
        if (modes != 1) {
          throw SchemaError(ppath + ".kind",
                            "threshold channels require a single-mode device");
        }
        kp.m = require_int(require_field(params, "m", ppath), ppath + ".m");
        if (kp.m < 1 || kp.m > cutoffs[0]) {
          throw SchemaError(ppath + ".m", "threshold outside 1..cutoff");
        }
      } else if (kp.kind == "dephase") {
        kp.basis = require_field(params, "basis", ppath).get<std::string>();
        if (kp.basis != "fock") {
          throw SchemaError(ppath + ".basis", "only the 'fock' basis is supported");
        }
      } else {
        throw SchemaError(ppath + ".kind", "expected 'threshold' or 'dephase'");
      }
      part.params = std::move(kp);
      break;
    }
    case EngineKind::Unitary: {
      UnitaryParams up;
      up.kind = require_field(params, "kind", ppath).get<std::string>();
      if (up.kind == "bs50") {
        if (modes != 2) {
          throw SchemaError(ppath + ".kind", "bs50 requires a two-mode device");
        }
      } else if (up.kind != "identity") {
        throw SchemaError(ppath + ".kind", "expected 'bs50' or 'identity'");
      }
      part.params = std::move(up);
      break;
    }
  }
  return part;
}

}  // namespace

namespace {

StateKind part_state_kind(const PartSpec& part) {
  switch (part.engine) {
    case EngineKind::Amplitude: return StateKind::Amplitudes;
    case EngineKind::MasterFull:
    case EngineKind::Kraus: return StateKind::Density;
    case EngineKind::MasterDiagonal: return StateKind::Populations;
    case EngineKind::Unitary:
      return std::get<UnitaryParams>(part.params).kind == "identity"
                 ? StateKind::Any
                 : StateKind::Density;
  }
  return StateKind::Any;
}

}  // namespace

DeviceSpec parse_device(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("$", "expected a JSON object");

  DeviceSpec device;
  device.modes = require_int(require_field(root, "modes", "$"), "$.modes");
  if (device.modes < 1) throw SchemaError("$.modes", "need at least one mode");

  const json& cutoffs = require_field(root, "cutoffs", "$");
  if (!cutoffs.is_array() || static_cast<int>(cutoffs.size()) != device.modes) {
    throw SchemaError("$.cutoffs", "expected one cutoff per mode");
  }
  for (size_t i = 0; i < cutoffs.size(); ++i) {
    const std::string cpath = "$.cutoffs[" + std::to_string(i) + "]";
    const int c = require_int(cutoffs[i], cpath);
    if (c < 1) throw SchemaError(cpath, "cutoffs must be >= 1");
    device.cutoffs.push_back(c);
  }

  const json& parts = require_field(root, "parts", "$");
  if (!parts.is_array() || parts.empty()) {
    throw SchemaError("$.parts", "expected a non-empty array of parts");
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    device.parts.push_back(parse_part(parts[i], device.modes, device.cutoffs,
                                      "$.parts[" + std::to_string(i) + "]"));
  }

  // All parts must agree on the state kind they carry.
  StateKind kind = StateKind::Any;
  for (size_t i = 0; i < device.parts.size(); ++i) {
    const StateKind part_kind = part_state_kind(device.parts[i]);
    if (part_kind == StateKind::Any) continue;
    if (kind == StateKind::Any) {
      kind = part_kind;
    } else if (kind != part_kind) {
      throw SchemaError("$.parts[" + std::to_string(i) + "].engine",
                        "part state kind conflicts with earlier parts");
    }
  }
  return device;
}

StateKind required_state_kind(const DeviceSpec& device) {
  StateKind kind = StateKind::Any;
  for (const PartSpec& part : device.parts) {
    const StateKind part_kind = part_state_kind(part);
    if (part_kind != StateKind::Any && kind == StateKind::Any) kind = part_kind;
  }
  return kind;
}

namespace {

std::vector<LinearLindblad> linear_terms_of(const LindbladParams& params,
                                            int modes) {
  std::vector<LinearLindblad> out;
  for (const TermSpec& t : params.terms) {
    Vector c(modes);
    for (int i = 0; i < modes; ++i) c[i] = t.coeffs[i];
    out.emplace_back(t.rate, std::move(c));
  }
  return out;
}

std::vector<LindbladTerm> master_terms_of(const LindbladParams& params,
                                          const TruncatedSpace& space) {
  std::vector<LindbladTerm> out;
  for (const TermSpec& t : params.terms) {
    if (!t.coeffs.empty()) {
      Matrix l = Matrix::Zero(space.dim(), space.dim());
      for (int m = 0; m < space.num_modes(); ++m) {
        if (std::abs(t.coeffs[m]) != 0.0) {
          l += t.coeffs[m] * annihilation(space, m).entries();
        }
      }
      out.emplace_back(t.rate, OperatorMatrix(space, std::move(l)));
    } else if (t.kind == "a") {
      out.emplace_back(t.rate, annihilation(space, 0));
    } else if (t.kind == "a2") {
      out.emplace_back(t.rate, two_photon_loss_op(space, 0));
    } else {
      out.emplace_back(t.rate, nonlinear_coherent_loss_op(space, 0, t.m));
    }
  }
  return out;
}

DiagonalLossFamily family_of(const LindbladParams& params) {
  DiagonalLossFamily family;
  for (const TermSpec& t : params.terms) {
    if (t.kind == "a") {
      family.add_single_photon(t.rate);
    } else if (t.kind == "a2") {
      family.add_two_photon(t.rate);
    } else {
      family.add_ncl(t.rate, t.m);
    }
  }
  return family;
}

DeviceState apply_part(const DeviceSpec& device, const PartSpec& part,
                       const DeviceState& state) {
  // Identity interconnects pass any state kind through untouched.
  if (part.engine == EngineKind::Unitary &&
      std::get<UnitaryParams>(part.params).kind == "identity") {
    return state;
  }

  auto kind_mismatch = [&](const char* wanted) -> std::invalid_argument {
    return std::invalid_argument(
        std::string("device: ") + engine_name(part.engine) + " part needs a " +
        wanted + " state, got " + state_kind_name(state));
  };

  switch (part.engine) {
    case EngineKind::Amplitude: {
      const Vector* alpha = std::get_if<Vector>(&state);
      if (!alpha) throw kind_mismatch("amplitudes");
      const CouplingMatrix m =
          coupling_matrix(linear_terms_of(std::get<LindbladParams>(part.params),
                                          device.modes),
                          device.modes);
      if (part.asymptotic) {
        return DeviceState(Vector(asymptotic_scatter(m).entries() * (*alpha)));
      }
      return DeviceState(propagate(*alpha, m, part.duration));
    }
    case EngineKind::MasterFull: {
      const DensityMatrix* rho = std::get_if<DensityMatrix>(&state);
      if (!rho) throw kind_mismatch("density");
      return DeviceState(evolve(
          *rho, master_terms_of(std::get<LindbladParams>(part.params), rho->space()),
          part.duration));
    }
    case EngineKind::MasterDiagonal: {
      const PopulationVector* p = std::get_if<PopulationVector>(&state);
      if (!p) throw kind_mismatch("populations");
      return DeviceState(evolve_populations(
          *p, family_of(std::get<LindbladParams>(part.params)), part.duration));
    }
    case EngineKind::Kraus: {
      const DensityMatrix* rho = std::get_if<DensityMatrix>(&state);
      if (!rho) throw kind_mismatch("density");
      const KrausParams& kp = std::get<KrausParams>(part.params);
      const KrausChannel channel = (kp.kind == "threshold")
                                       ? threshold_channel(rho->space(), kp.m)
                                       : dephase(rho->space());
      return DeviceState(apply(channel, *rho));
    }
    case EngineKind::Unitary: {
      const DensityMatrix* rho = std::get_if<DensityMatrix>(&state);
      if (!rho) throw kind_mismatch("density");
      return DeviceState(apply(beam_splitter(rho->space()), *rho));
    }
  }
  throw std::logic_error("apply_part: unreachable");
}

DeviceState traverse(const DeviceSpec& device, const DeviceState& input,
                     bool reversed) {
  DeviceState state = input;
  if (reversed) {
    for (auto it = device.parts.rbegin(); it != device.parts.rend(); ++it) {
      state = apply_part(device, *it, state);
    }
  } else {
    for (const PartSpec& part : device.parts) {
      state = apply_part(device, part, state);
    }
  }
  return state;
}

}  // namespace

DeviceState forward(const DeviceSpec& device, const DeviceState& input) {
  return traverse(device, input, false);
}

DeviceState backward(const DeviceSpec& device, const DeviceState& input) {
  return traverse(device, input, true);
}

ScatteringMatrix amplitude_device_map(const DeviceSpec& device, bool reversed) {
  std::vector<ScatteringMatrix> maps;
  for (const PartSpec& part : device.parts) {
    if (part.engine == EngineKind::Unitary &&
        std::get<UnitaryParams>(part.params).kind == "identity") {
      continue;
    }
    if (part.engine != EngineKind::Amplitude) {
      throw std::invalid_argument(
          "amplitude_device_map: device has non-amplitude parts");
    }
    const CouplingMatrix m = coupling_matrix(
        linear_terms_of(std::get<LindbladParams>(part.params), device.modes),
        device.modes);
    if (part.asymptotic) {
      maps.push_back(asymptotic_scatter(m));
    } else {
      maps.emplace_back(Matrix((-m.entries() * part.duration).exp()));
    }
  }
  if (maps.empty()) {
    return ScatteringMatrix(Matrix::Identity(device.modes, device.modes));
  }
  if (reversed) std::reverse(maps.begin(), maps.end());
  return compose(maps);
}

ReciprocityReport reciprocity_report(
    const DeviceSpec& device, const DensityMatrix& probe,
    const std::vector<std::pair<std::string, OperatorMatrix>>& observables,
    double tol) {
  for (const auto& [name, op] : observables) {
    if (!op.is_hermitian()) {
      throw std::invalid_argument("reciprocity_report: observable '" + name +
                                  "' is not Hermitian");
    }
  }
  const DeviceState in(probe);
  const DensityMatrix fwd = std::get<DensityMatrix>(forward(device, in));
  const DensityMatrix bwd = std::get<DensityMatrix>(backward(device, in));

  ReciprocityReport report;
  report.tolerance = tol;
  for (const auto& [name, op] : observables) {
    ReciprocityReport::Entry entry;
    entry.observable = name;
    entry.p_in = expectation(probe, op).real();
    entry.p_forward = expectation(fwd, op).real();
    entry.p_backward = expectation(bwd, op).real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(op.entries(), Eigen::EigenvaluesOnly);
    const double spectral_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    const double gap = std::abs(entry.p_forward - entry.p_backward);
    entry.discrepancy = (spectral_norm > 0.0) ? gap / spectral_norm : 0.0;
    report.max_discrepancy = std::max(report.max_discrepancy, entry.discrepancy);
    report.entries.push_back(std::move(entry));
  }
  report.non_reciprocal = report.max_discrepancy > tol;
  return report;
}

}  // namespace dissim
