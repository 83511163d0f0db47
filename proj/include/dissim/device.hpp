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

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dissim/amplitude.hpp"
#include "dissim/channels.hpp"
#include "dissim/hilbert.hpp"
#include "dissim/master.hpp"

namespace dissim {

enum class EngineKind { Amplitude, MasterFull, MasterDiagonal, Kraus, Unitary };

const char* engine_name(EngineKind kind);

// Declarative Lindblad term: either an explicit coefficient vector
// L = sum_i c_i a_i, or a named single-mode operator.
struct TermSpec {
  double rate = 0.0;
  std::vector<Complex> coeffs;  // linear collective loss when non-empty
  std::string kind;             // "a" | "a2" | "ncl" when coeffs is empty
  int m = 0;                    // NCL threshold
};

struct LindbladParams {
  std::vector<TermSpec> terms;
};

struct KrausParams {
  std::string kind;   // "threshold" | "dephase"
  int m = 0;          // threshold
  std::string basis;  // "fock" for dephase
};

struct UnitaryParams {
  std::string kind;  // "bs50" | "identity"
};

// One device part: an engine tag, a duration (or the asymptotic flag, for
// amplitude parts), and the engine parameter payload.
struct PartSpec {
  EngineKind engine = EngineKind::Amplitude;
  bool asymptotic = false;
  double duration = 0.0;
  std::variant<LindbladParams, KrausParams, UnitaryParams> params;
};

struct DeviceSpec {
  int modes = 0;
  std::vector<int> cutoffs;
  std::vector<PartSpec> parts;

  TruncatedSpace space() const { return TruncatedSpace(modes, cutoffs); }
  DeviceSpec reversed() const;
};

// Parse and validate a device description (schema in the README). Throws
// SchemaError with a path-precise message on any violation.
DeviceSpec parse_device(const std::string& json_text);

// States a device can carry: mean modal amplitudes, a full density
// matrix, or a single-mode photon-number distribution. Each part's engine
// accepts exactly one kind (identity parts pass anything through).
using DeviceState = std::variant<Vector, DensityMatrix, PopulationVector>;

const char* state_kind_name(const DeviceState& state);

enum class StateKind { Amplitudes, Density, Populations, Any };

// The state kind a device's parts agree on; parse_device rejects devices
// whose parts demand different kinds. `Any` means every part is an
// identity interconnect.
StateKind required_state_kind(const DeviceSpec& device);

// Traverse the parts in listed order / reversed order. Each part applies
// its own map unchanged in both directions; direction only selects the
// traversal order.
DeviceState forward(const DeviceSpec& device, const DeviceState& input);
DeviceState backward(const DeviceSpec& device, const DeviceState& input);

// Composed mean-amplitude map of an all-amplitude device (asymptotic
// projectors and finite-time exponentials alike), in the given traversal
// order.
ScatteringMatrix amplitude_device_map(const DeviceSpec& device, bool reversed);

struct ReciprocityReport {
  struct Entry {
    std::string observable;
    double p_in = 0.0;
    double p_forward = 0.0;
    double p_backward = 0.0;
    double discrepancy = 0.0;  // |forward - backward| / spectral norm
  };
  std::vector<Entry> entries;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;
  bool non_reciprocal = false;
};

// Evaluate Hermitian observables on the input and on both propagation
// directions. Discrepancies are normalized by each observable's spectral
// norm before the verdict so that rescaling an observable cannot flip it.
ReciprocityReport reciprocity_report(
    const DeviceSpec& device, const DensityMatrix& probe,
    const std::vector<std::pair<std::string, OperatorMatrix>>& observables,
    double tol);

}  // namespace dissim
