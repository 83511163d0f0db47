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

#include <vector>

#include "dissim/hilbert.hpp"

namespace dissim {

// Completely positive trace-preserving map in operator-sum form.
class KrausChannel {
 public:
  KrausChannel(TruncatedSpace space, std::vector<Matrix> ops);

  const TruncatedSpace& space() const { return space_; }
  const std::vector<Matrix>& ops() const { return ops_; }

  // max-norm of sum_j D_j^dag D_j - I.
  double completeness_defect() const;

 private:
  TruncatedSpace space_;
  std::vector<Matrix> ops_;
};

class UnitaryChannel {
 public:
  UnitaryChannel(TruncatedSpace space, Matrix u);

  const TruncatedSpace& space() const { return space_; }
  const Matrix& matrix() const { return u_; }
  KrausChannel as_kraus() const { return KrausChannel(space_, {u_}); }

 private:
  TruncatedSpace space_;
  Matrix u_;
};

// rho -> sum_j D_j rho D_j^dag.
DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho);
DensityMatrix apply(const UnitaryChannel& channel, const DensityMatrix& rho);

// Single-mode threshold map: D_m = |m_t><m| for m >= m_t, |0><m| below.
// Fock inputs at or above the threshold collapse onto |m_t>, everything
// else drains to vacuum.
KrausChannel threshold_channel(const TruncatedSpace& space, int m_thresh);

// Full dephaser in the joint Fock basis: zeroes every off-diagonal
// element; the basis-diagonal states are exactly the stationary ones.
KrausChannel dephase(const TruncatedSpace& space);

// Dephaser in an arbitrary orthonormal complete basis.
KrausChannel dephase(const TruncatedSpace& space,
                     const std::vector<Vector>& basis);

// 50/50 beam splitter on a two-mode space. The state-picture unitary is
// number-conserving and acts on the single-photon sector as
// |1,0> -> (|1,0> - i|0,1>)/sqrt(2); mean amplitudes then transform as
// <a> -> (<a> - i<b>)/sqrt(2), <b> -> (-i<a> + <b>)/sqrt(2).
UnitaryChannel beam_splitter(const TruncatedSpace& space);

// P = lambda a^dag b + conj(lambda) b^dag a (Hermitian by construction).
OperatorMatrix correlation_observable(const TruncatedSpace& space, Complex lambda);

// max over probes and observables of
// |Tr{P ch2(ch1(rho))} - Tr{P ch1(ch2(rho))}|: nonzero values witness
// non-commuting part maps, the mechanism behind order-dependent devices.
double noncommutativity_witness(const KrausChannel& ch1, const KrausChannel& ch2,
                                const std::vector<DensityMatrix>& probes,
                                const std::vector<OperatorMatrix>& observables);

}  // namespace dissim
