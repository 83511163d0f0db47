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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dissim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Multimode bosonic Fock space with a per-mode photon-number cutoff
// (dimension per mode = cutoff + 1).
//
// Basis ordering is fixed: basis index = sum_m n_m * stride(m), with
// mode 0 varying slowest, i.e. occupation tuples are enumerated
// lexicographically. Serialized matrices are therefore reproducible
// bit-for-bit across runs.
class TruncatedSpace {
 public:
  TruncatedSpace(int num_modes, std::vector<int> cutoffs);

  static TruncatedSpace single_mode(int cutoff) {
    return TruncatedSpace(1, {cutoff});
  }

  int num_modes() const { return num_modes_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  int cutoff(int mode) const;
  Index dim() const { return dim_; }
  Index stride(int mode) const;

  // Occupation of `mode` in the `index`-th basis vector.
  int occupation(Index index, int mode) const;
  Index basis_index(const std::vector<int>& occupations) const;

  bool operator==(const TruncatedSpace& other) const {
    return cutoffs_ == other.cutoffs_;
  }
  bool operator!=(const TruncatedSpace& other) const {
    return !(*this == other);
  }

 private:
  int num_modes_;
  std::vector<int> cutoffs_;
  std::vector<Index> strides_;
  Index dim_;
};

// Dense operator on a TruncatedSpace.
class OperatorMatrix {
 public:
  OperatorMatrix(TruncatedSpace space, Matrix entries);

  const TruncatedSpace& space() const { return space_; }
  const Matrix& entries() const { return entries_; }

  OperatorMatrix adjoint() const {
    return OperatorMatrix(space_, entries_.adjoint());
  }
  bool is_hermitian(double tol = 1e-10) const;

 private:
  TruncatedSpace space_;
  Matrix entries_;
};

// Mode annihilation operator: a|n> = sqrt(n)|n-1> on the given mode,
// identity elsewhere. The adjoint annihilates the top Fock level
// (a^dag |N_max> = 0), so loss-only dynamics never sees the boundary.
OperatorMatrix annihilation(const TruncatedSpace& space, int mode);
OperatorMatrix creation(const TruncatedSpace& space, int mode);
OperatorMatrix number_operator(const TruncatedSpace& space, int mode);
OperatorMatrix identity_operator(const TruncatedSpace& space);

// Density matrix with validated Hermiticity, unit trace and positivity.
class DensityMatrix {
 public:
  struct Tolerances {
    double hermiticity = 1e-10;
    double trace = 1e-9;
    double eigenvalue = 1e-8;  // min eigenvalue >= -eigenvalue
  };

  DensityMatrix(TruncatedSpace space, Matrix entries);
  DensityMatrix(TruncatedSpace space, Matrix entries, const Tolerances& tol);

  const TruncatedSpace& space() const { return space_; }
  const Matrix& entries() const { return entries_; }

  double trace_real() const { return entries_.trace().real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;

 private:
  TruncatedSpace space_;
  Matrix entries_;
};

// Photon-number distribution of a single mode.
class PopulationVector {
 public:
  // The default sum tolerance applies to directly constructed
  // distributions; engine outputs pass their looser drift budget.
  PopulationVector(TruncatedSpace space, RealVector probs,
                   double sum_tol = 1e-9);

  const TruncatedSpace& space() const { return space_; }
  const RealVector& probs() const { return probs_; }
  int cutoff() const { return space_.cutoff(0); }

  double mean() const;
  double second_moment() const;

 private:
  TruncatedSpace space_;
  RealVector probs_;
};

// --- states ---------------------------------------------------------------

// Product of per-mode coherent states |alpha_i>, renormalized after
// truncation. Requires |alpha|^2 + 6|alpha| <= cutoff on every mode so the
// discarded Poisson tail is below 1e-8.
DensityMatrix coherent_state(const TruncatedSpace& space,
                             const std::vector<Complex>& amplitudes);

// Projector onto the Fock basis vector |n_0, n_1, ...>.
DensityMatrix fock_state(const TruncatedSpace& space,
                         const std::vector<int>& occupations);

// Projector onto an arbitrary pure state (coefficients in basis order;
// normalized internally).
DensityMatrix pure_state(const TruncatedSpace& space, const Vector& coefficients);

// Two-mode single-photon superposition x|1,0> + sqrt(1-x^2)|0,1>.
DensityMatrix single_photon_superposition(const TruncatedSpace& space, double x);

// Poisson photon-number distribution with the given mean.
PopulationVector poisson_populations(const TruncatedSpace& space, double mean);

// Diagonal of a (single-mode) density matrix as a PopulationVector.
PopulationVector populations_of(const DensityMatrix& rho);

// Smallest cutoff admitting a coherent amplitude under the 6-sigma tail
// rule: ceil(|alpha|^2 + 6|alpha|), floor 10.
int default_cutoff(double amplitude_magnitude);

// --- observables ------------------------------------------------------------

// Tr{O rho}.
Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);

// Marginal photon-number distribution of one mode (diagonal of the
// partial trace over the other modes).
PopulationVector photon_distribution(const DensityMatrix& rho, int mode);

// Mandel Q = (<n^2> - <n>^2)/<n> - 1. Undefined for vacuum.
double mandel_q(const PopulationVector& p);

double mean_photon_number(const DensityMatrix& rho, int mode);

}  // namespace dissim
