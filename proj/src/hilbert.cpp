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

#include "dissim/hilbert.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dissim/errors.hpp"

namespace dissim {

TruncatedSpace::TruncatedSpace(int num_modes, std::vector<int> cutoffs)
    : num_modes_(num_modes), cutoffs_(std::move(cutoffs)) {
  if (num_modes_ < 1) {
    throw std::invalid_argument("TruncatedSpace: need at least one mode");
  }
  if (static_cast<int>(cutoffs_.size()) != num_modes_) {
    throw std::invalid_argument(
        "TruncatedSpace: cutoff list length must equal the mode count");
  }
  for (int c : cutoffs_) {
    if (c < 1) {
      throw std::invalid_argument("TruncatedSpace: every cutoff must be >= 1");
    }
  }
  // Mode 0 varies slowest: stride(m) = prod_{k>m} (cutoff_k + 1).
  strides_.assign(num_modes_, 1);
  Index d = 1;
  for (int m = num_modes_ - 1; m >= 0; --m) {
    strides_[m] = d;
    const Index per_mode = static_cast<Index>(cutoffs_[m]) + 1;
    if (d > std::numeric_limits<Index>::max() / per_mode) {
      throw std::invalid_argument("TruncatedSpace: dimension overflow");
    }
    d *= per_mode;
  }
  dim_ = d;
}

int TruncatedSpace::cutoff(int mode) const {
  if (mode < 0 || mode >= num_modes_) {
    throw std::out_of_range("TruncatedSpace: mode index out of range");
  }
  return cutoffs_[mode];
}

Index TruncatedSpace::stride(int mode) const {
  if (mode < 0 || mode >= num_modes_) {
    throw std::out_of_range("TruncatedSpace: mode index out of range");
  }
  return strides_[mode];
}

int TruncatedSpace::occupation(Index index, int mode) const {
  return static_cast<int>((index / stride(mode)) % (cutoffs_[mode] + 1));
}

Index TruncatedSpace::basis_index(const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != num_modes_) {
    throw std::invalid_argument("basis_index: wrong number of occupations");
  }
  Index idx = 0;
  for (int m = 0; m < num_modes_; ++m) {
    if (occupations[m] < 0 || occupations[m] > cutoffs_[m]) {
      throw std::out_of_range("basis_index: occupation exceeds cutoff");
    }
    idx += occupations[m] * strides_[m];
  }
  return idx;
}

OperatorMatrix::OperatorMatrix(TruncatedSpace space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() != space_.dim()) {
    throw std::invalid_argument(
        "OperatorMatrix: entries must be square with the space dimension");
  }
}

bool OperatorMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

OperatorMatrix annihilation(const TruncatedSpace& space, int mode) {
  const Index stride = space.stride(mode);  // throws on bad mode
  Matrix a = Matrix::Zero(space.dim(), space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    const int n = space.occupation(i, mode);
    if (n > 0) {
      a(i - stride, i) = std::sqrt(static_cast<double>(n));
    }
  }
  return OperatorMatrix(space, std::move(a));
}

OperatorMatrix creation(const TruncatedSpace& space, int mode) {
  return annihilation(space, mode).adjoint();
}

OperatorMatrix number_operator(const TruncatedSpace& space, int mode) {
  Matrix n = Matrix::Zero(space.dim(), space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    n(i, i) = static_cast<double>(space.occupation(i, mode));
  }
  return OperatorMatrix(space, std::move(n));
}

OperatorMatrix identity_operator(const TruncatedSpace& space) {
  return OperatorMatrix(space, Matrix::Identity(space.dim(), space.dim()));
}

DensityMatrix::DensityMatrix(TruncatedSpace space, Matrix entries)
    : DensityMatrix(std::move(space), std::move(entries), Tolerances{}) {}

DensityMatrix::DensityMatrix(TruncatedSpace space, Matrix entries,
                             const Tolerances& tol)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() != space_.dim()) {
    throw std::invalid_argument(
        "DensityMatrix: entries must be square with the space dimension");
  }
  if (hermiticity_defect() > tol.hermiticity) {
    throw std::invalid_argument("DensityMatrix: not Hermitian within tolerance");
  }
  if (std::abs(entries_.trace().real() - 1.0) > tol.trace ||
      std::abs(entries_.trace().imag()) > tol.trace) {
    throw std::invalid_argument("DensityMatrix: trace is not 1 within tolerance");
  }
  if (min_eigenvalue() < -tol.eigenvalue) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
}

double DensityMatrix::hermiticity_defect() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      ((entries_ + entries_.adjoint()) / 2.0).eval(),
      Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PopulationVector::PopulationVector(TruncatedSpace space, RealVector probs,
                                   double sum_tol)
    : space_(std::move(space)), probs_(std::move(probs)) {
  if (space_.num_modes() != 1) {
    throw std::invalid_argument("PopulationVector: single-mode spaces only");
  }
  if (probs_.size() != space_.dim()) {
    throw std::invalid_argument("PopulationVector: length must be cutoff + 1");
  }
  if (probs_.minCoeff() < -1e-12) {
    throw std::invalid_argument("PopulationVector: negative probability");
  }
  if (std::abs(probs_.sum() - 1.0) > sum_tol) {
    throw std::invalid_argument("PopulationVector: probabilities must sum to 1");
  }
}

double PopulationVector::mean() const {
  double m = 0.0;
  for (Index n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
  return m;
}

double PopulationVector::second_moment() const {
  double m = 0.0;
  for (Index n = 0; n < probs_.size(); ++n) {
    m += static_cast<double>(n) * static_cast<double>(n) * probs_[n];
  }
  return m;
}

namespace {

// Coherent coefficients in log space; safe for any amplitude/cutoff.
Vector coherent_coefficients(Complex alpha, int cutoff) {
  Vector c(cutoff + 1);
  const double mag = std::abs(alpha);
  if (mag == 0.0) {
    c.setZero();
    c[0] = 1.0;
    return c;
  }
  const double phase = std::arg(alpha);
  for (int n = 0; n <= cutoff; ++n) {
    const double log_mag = n * std::log(mag) - mag * mag / 2.0 -
                           0.5 * std::lgamma(static_cast<double>(n) + 1.0);
    c[n] = std::polar(std::exp(log_mag), phase * n);
  }
  return c;
}

}  // namespace

DensityMatrix coherent_state(const TruncatedSpace& space,
                             const std::vector<Complex>& amplitudes) {
  if (static_cast<int>(amplitudes.size()) != space.num_modes()) {
    throw std::invalid_argument("coherent_state: one amplitude per mode required");
  }
  Vector psi = Vector::Ones(1);
  for (int m = 0; m < space.num_modes(); ++m) {
    const double mag = std::abs(amplitudes[m]);
    if (mag * mag + 6.0 * mag > static_cast<double>(space.cutoff(m))) {
      throw std::invalid_argument(
          "coherent_state: cutoff too small for amplitude (needs |a|^2 + 6|a|)");
    }
    const Vector cm = coherent_coefficients(amplitudes[m], space.cutoff(m));
    Vector next(psi.size() * cm.size());
    for (Index i = 0; i < psi.size(); ++i) {
      next.segment(i * cm.size(), cm.size()) = psi[i] * cm;
    }
    psi = std::move(next);
  }
  return pure_state(space, psi);
}

DensityMatrix fock_state(const TruncatedSpace& space,
                         const std::vector<int>& occupations) {
  const Index idx = space.basis_index(occupations);
  Matrix rho = Matrix::Zero(space.dim(), space.dim());
  rho(idx, idx) = 1.0;
  return DensityMatrix(space, std::move(rho));
}

DensityMatrix pure_state(const TruncatedSpace& space, const Vector& coefficients) {
  if (coefficients.size() != space.dim()) {
    throw std::invalid_argument("pure_state: coefficient length must match dimension");
  }
  const double norm = coefficients.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("pure_state: zero vector");
  }
  const Vector psi = coefficients / norm;
  return DensityMatrix(space, psi * psi.adjoint());
}

DensityMatrix single_photon_superposition(const TruncatedSpace& space, double x) {
  if (space.num_modes() != 2) {
    throw std::invalid_argument("single_photon_superposition: two-mode spaces only");
  }
  if (std::abs(x) > 1.0) {
    throw std::invalid_argument("single_photon_superposition: |x| must be <= 1");
  }
  Vector psi = Vector::Zero(space.dim());
  psi[space.basis_index({1, 0})] = x;
  psi[space.basis_index({0, 1})] = std::sqrt(1.0 - x * x);
  return pure_state(space, psi);
}

PopulationVector poisson_populations(const TruncatedSpace& space, double mean) {
  if (space.num_modes() != 1) {
    throw std::invalid_argument("poisson_populations: single-mode spaces only");
  }
  if (mean < 0.0) {
    throw std::invalid_argument("poisson_populations: mean must be >= 0");
  }
  const int cutoff = space.cutoff(0);
  RealVector p(cutoff + 1);
  if (mean == 0.0) {
    p.setZero();
    p[0] = 1.0;
    return PopulationVector(space, std::move(p));
  }
  for (int n = 0; n <= cutoff; ++n) {
    p[n] = std::exp(n * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(n) + 1.0));
  }
  const double tail = 1.0 - p.sum();
  if (tail > 1e-9) {
    throw std::invalid_argument("poisson_populations: cutoff too small for mean");
  }
  p /= p.sum();
  return PopulationVector(space, std::move(p));
}

PopulationVector populations_of(const DensityMatrix& rho) {
  return photon_distribution(rho, 0);
}

int default_cutoff(double amplitude_magnitude) {
  const double mag = std::abs(amplitude_magnitude);
  const int needed = static_cast<int>(std::ceil(mag * mag + 6.0 * mag));
  return std::max(needed, 10);
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (rho.space() != op.space()) {
    throw std::invalid_argument("expectation: state and operator spaces differ");
  }
  return (op.entries() * rho.entries()).trace();
}

PopulationVector photon_distribution(const DensityMatrix& rho, int mode) {
  const TruncatedSpace& space = rho.space();
  const int cutoff = space.cutoff(mode);  // throws on bad mode
  RealVector p = RealVector::Zero(cutoff + 1);
  for (Index i = 0; i < space.dim(); ++i) {
    p[space.occupation(i, mode)] += rho.entries()(i, i).real();
  }
  return PopulationVector(TruncatedSpace::single_mode(cutoff), std::move(p));
}

double mandel_q(const PopulationVector& p) {
  const double mean = p.mean();
  if (mean <= 0.0) {
    throw std::domain_error("mandel_q: undefined for vacuum (<n> = 0)");
  }
  const double variance = p.second_moment() - mean * mean;
  return variance / mean - 1.0;
}

double mean_photon_number(const DensityMatrix& rho, int mode) {
  double m = 0.0;
  for (Index i = 0; i < rho.space().dim(); ++i) {
    m += rho.space().occupation(i, mode) * rho.entries()(i, i).real();
  }
  return m;
}

}  // namespace dissim
