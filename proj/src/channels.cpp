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

#include "dissim/channels.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace dissim {

namespace {
constexpr double kCompletenessTol = 1e-10;
constexpr double kUnitarityTol = 1e-10;
}  // namespace

KrausChannel::KrausChannel(TruncatedSpace space, std::vector<Matrix> ops)
    : space_(std::move(space)), ops_(std::move(ops)) {
  if (ops_.empty()) {
    throw std::invalid_argument("KrausChannel: empty operator list");
  }
  for (const Matrix& op : ops_) {
    if (op.rows() != space_.dim() || op.cols() != space_.dim()) {
      throw std::invalid_argument("KrausChannel: operator dimension mismatch");
    }
  }
  if (completeness_defect() > kCompletenessTol) {
    throw std::invalid_argument(
        "KrausChannel: operators do not satisfy sum D^dag D = identity");
  }
}

double KrausChannel::completeness_defect() const {
  Matrix sum = Matrix::Zero(space_.dim(), space_.dim());
  for (const Matrix& op : ops_) sum += op.adjoint() * op;
  sum -= Matrix::Identity(space_.dim(), space_.dim());
  return sum.cwiseAbs().maxCoeff();
}

UnitaryChannel::UnitaryChannel(TruncatedSpace space, Matrix u)
    : space_(std::move(space)), u_(std::move(u)) {
  if (u_.rows() != space_.dim() || u_.cols() != space_.dim()) {
    throw std::invalid_argument("UnitaryChannel: dimension mismatch");
  }
  const double defect = (u_.adjoint() * u_ - Matrix::Identity(u_.rows(), u_.cols()))
                            .cwiseAbs()
                            .maxCoeff();
  if (defect > kUnitarityTol) {
    throw std::invalid_argument("UnitaryChannel: matrix is not unitary");
  }
}

DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho) {
  if (channel.space() != rho.space()) {
    throw std::invalid_argument("apply: channel and state spaces differ");
  }
  Matrix out = Matrix::Zero(rho.space().dim(), rho.space().dim());
  for (const Matrix& op : channel.ops()) {
    out.noalias() += op * rho.entries() * op.adjoint();
  }
  return DensityMatrix(rho.space(), std::move(out),
                       DensityMatrix::Tolerances{1e-10, 1e-9, 1e-8});
}

DensityMatrix apply(const UnitaryChannel& channel, const DensityMatrix& rho) {
  if (channel.space() != rho.space()) {
    throw std::invalid_argument("apply: channel and state spaces differ");
  }
  return DensityMatrix(rho.space(),
                       channel.matrix() * rho.entries() * channel.matrix().adjoint(),
                       DensityMatrix::Tolerances{1e-10, 1e-9, 1e-8});
}

KrausChannel threshold_channel(const TruncatedSpace& space, int m_thresh) {
  if (space.num_modes() != 1) {
    throw std::invalid_argument("threshold_channel: single-mode spaces only");
  }
  const int cutoff = space.cutoff(0);
  if (m_thresh < 1 || m_thresh > cutoff) {
    throw std::invalid_argument("threshold_channel: threshold outside 1..cutoff");
  }
  std::vector<Matrix> ops;
  ops.reserve(cutoff + 1);
  for (int m = 0; m <= cutoff; ++m) {
    Matrix d = Matrix::Zero(space.dim(), space.dim());
    d(m >= m_thresh ? m_thresh : 0, m) = 1.0;
    ops.push_back(std::move(d));
  }
  return KrausChannel(space, std::move(ops));
}

KrausChannel dephase(const TruncatedSpace& space) {
  std::vector<Matrix> ops;
  ops.reserve(space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    Matrix d = Matrix::Zero(space.dim(), space.dim());
    d(i, i) = 1.0;
    ops.push_back(std::move(d));
  }
  return KrausChannel(space, std::move(ops));
}

KrausChannel dephase(const TruncatedSpace& space,
                     const std::vector<Vector>& basis) {
  if (static_cast<Index>(basis.size()) != space.dim()) {
    throw std::invalid_argument("dephase: basis must span the space");
  }
  for (size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != space.dim()) {
      throw std::invalid_argument("dephase: basis vector dimension mismatch");
    }
    for (size_t j = 0; j <= i; ++j) {
      const Complex overlap = basis[j].adjoint() * basis[i];
      const double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(overlap - target) > 1e-10) {
        throw std::invalid_argument("dephase: basis is not orthonormal");
      }
    }
  }
  std::vector<Matrix> ops;
  ops.reserve(basis.size());
  for (const Vector& v : basis) {
    ops.push_back(v * v.adjoint());
  }
  return KrausChannel(space, std::move(ops));
}

UnitaryChannel beam_splitter(const TruncatedSpace& space) {
  if (space.num_modes() != 2) {
    throw std::invalid_argument("beam_splitter: two-mode spaces only");
  }
  const Matrix a = annihilation(space, 0).entries();
  const Matrix b = annihilation(space, 1).entries();
  const Matrix g = a.adjoint() * b + b.adjoint() * a;
  const Complex minus_i(0.0, -1.0);
  const Matrix u = (minus_i * (M_PI / 4.0) * g).exp();
  return UnitaryChannel(space, u);
}

OperatorMatrix correlation_observable(const TruncatedSpace& space, Complex lambda) {
  if (space.num_modes() != 2) {
    throw std::invalid_argument("correlation_observable: two-mode spaces only");
  }
  const Matrix a = annihilation(space, 0).entries();
  const Matrix b = annihilation(space, 1).entries();
  Matrix p = lambda * (a.adjoint() * b);
  p += std::conj(lambda) * (b.adjoint() * a);
  return OperatorMatrix(space, std::move(p));
}

double noncommutativity_witness(const KrausChannel& ch1, const KrausChannel& ch2,
                                const std::vector<DensityMatrix>& probes,
                                const std::vector<OperatorMatrix>& observables) {
  if (ch1.space() != ch2.space()) {
    throw std::invalid_argument("noncommutativity_witness: channel spaces differ");
  }
  double witness = 0.0;
  for (const DensityMatrix& probe : probes) {
    const DensityMatrix onetwo = apply(ch2, apply(ch1, probe));
    const DensityMatrix twoone = apply(ch1, apply(ch2, probe));
    for (const OperatorMatrix& obs : observables) {
      const Complex gap = expectation(onetwo, obs) - expectation(twoone, obs);
      witness = std::max(witness, std::abs(gap));
    }
  }
  return witness;
}

}  // namespace dissim
