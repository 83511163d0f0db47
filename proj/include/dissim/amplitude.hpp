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
#include <utility>
#include <vector>

#include "dissim/hilbert.hpp"

namespace dissim {

// Collective linear loss operator L = sum_i c_i a_i with rate gamma.
struct LinearLindblad {
  double rate;
  Vector coeffs;

  LinearLindblad(double rate_, Vector coeffs_);
};

// Mean-amplitude drift matrix: d<a>/dt = -M <a>, with
// M = sum_x gamma_x conj(c_x) c_x^T. Hermitian positive semidefinite.
class CouplingMatrix {
 public:
  explicit CouplingMatrix(Matrix m);
  const Matrix& entries() const { return m_; }
  Index modes() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Linear map from input to output mean modal amplitudes. Everything this
// module produces is passive (largest singular value <= 1).
class ScatteringMatrix {
 public:
  explicit ScatteringMatrix(Matrix s);
  const Matrix& entries() const { return s_; }
  Index modes() const { return s_.rows(); }

 private:
  Matrix s_;
};

CouplingMatrix coupling_matrix(const std::vector<LinearLindblad>& terms,
                               int num_modes);

// exp(-M t) alpha.
Vector propagate(const Vector& alpha, const CouplingMatrix& m, double t);

// t -> infinity limit of exp(-M t): the orthogonal projector onto the
// null space of M (the dark modes). Eigenvalues below 1e-10 * max
// eigenvalue count as zero.
ScatteringMatrix asymptotic_scatter(const CouplingMatrix& m);

// Ordered product of part matrices; the part traversed first acts first.
ScatteringMatrix compose(const std::vector<ScatteringMatrix>& parts);

// |S_ij / S_ji| (0-based indices). Returns +infinity when S_ji = 0 while
// S_ij != 0 (fully unidirectional pair).
double asymmetry_ratio(const ScatteringMatrix& s, int i, int j);

// diag(T_0, T_1, ...) for per-mode transmissions in [0, 1].
ScatteringMatrix loss_diag(const std::vector<double>& transmissions);

struct GaugeCheckResult {
  bool reciprocal = false;
  // Per-port output phases making S symmetric (input phases fixed to 0);
  // meaningful only when reciprocal.
  std::vector<double> output_phases;
  // Entry pair violating |S_ij| = |S_ji| or cycle consistency.
  std::optional<std::pair<int, int>> witness;
};

// True iff per-port input/output phase rotations can make S symmetric;
// i.e. the asymmetry is pure gauge, not a physical reciprocity breaking.
GaugeCheckResult reciprocal_mod_gauge(const ScatteringMatrix& s,
                                      double tol = 1e-9);

}  // namespace dissim
