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

#include "dissim/amplitude.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace dissim {

namespace {
constexpr double kPassivityTol = 1e-9;
constexpr double kNullSpaceTol = 1e-10;
}  // namespace

LinearLindblad::LinearLindblad(double rate_, Vector coeffs_)
    : rate(rate_), coeffs(std::move(coeffs_)) {
  if (rate < 0.0) {
    throw std::invalid_argument("LinearLindblad: rate must be >= 0");
  }
  if (coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("LinearLindblad: need at least one nonzero coefficient");
  }
}

CouplingMatrix::CouplingMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("CouplingMatrix: must be square");
  }
}

ScatteringMatrix::ScatteringMatrix(Matrix s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols()) {
    throw std::invalid_argument("ScatteringMatrix: must be square");
  }
  const double sigma_max =
      Eigen::JacobiSVD<Matrix>(s_).singularValues().maxCoeff();
  if (sigma_max > 1.0 + kPassivityTol) {
    throw std::invalid_argument("ScatteringMatrix: not passive (singular value > 1)");
  }
}

CouplingMatrix coupling_matrix(const std::vector<LinearLindblad>& terms,
                               int num_modes) {
  if (num_modes < 1) {
    throw std::invalid_argument("coupling_matrix: need at least one mode");
  }
  Matrix m = Matrix::Zero(num_modes, num_modes);
  for (const LinearLindblad& term : terms) {
    if (term.coeffs.size() != num_modes) {
      throw std::invalid_argument(
          "coupling_matrix: coefficient vector length must equal the mode count");
    }
    m += term.rate * (term.coeffs.conjugate() * term.coeffs.transpose());
  }
  return CouplingMatrix(std::move(m));
}

Vector propagate(const Vector& alpha, const CouplingMatrix& m, double t) {
  if (alpha.size() != m.modes()) {
    throw std::invalid_argument("propagate: amplitude length must equal the mode count");
  }
  if (t < 0.0) {
    throw std::invalid_argument("propagate: negative duration");
  }
  const Matrix e = (-m.entries() * t).exp();
  return e * alpha;
}

ScatteringMatrix asymptotic_scatter(const CouplingMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      ((m.entries() + m.entries().adjoint()) / 2.0).eval());
  const RealVector& eigs = es.eigenvalues();
  const double lambda_max = eigs.maxCoeff();
  if (eigs.minCoeff() < -kNullSpaceTol * std::max(lambda_max, 1.0)) {
    throw std::invalid_argument("asymptotic_scatter: coupling matrix is not PSD");
  }
  const double threshold = kNullSpaceTol * lambda_max;
  Matrix p = Matrix::Zero(m.modes(), m.modes());
  for (Index k = 0; k < eigs.size(); ++k) {
    if (eigs[k] <= threshold) {
      const Vector v = es.eigenvectors().col(k);
      p += v * v.adjoint();
    }
  }
  return ScatteringMatrix(std::move(p));
}

ScatteringMatrix compose(const std::vector<ScatteringMatrix>& parts) {
  if (parts.empty()) {
    throw std::invalid_argument("compose: empty part list");
  }
  const Index n = parts.front().modes();
  Matrix product = Matrix::Identity(n, n);
  for (const ScatteringMatrix& part : parts) {
    if (part.modes() != n) {
      throw std::invalid_argument("compose: dimension mismatch between parts");
    }
    product = part.entries() * product;
  }
  return ScatteringMatrix(std::move(product));
}

double asymmetry_ratio(const ScatteringMatrix& s, int i, int j) {
  if (i < 0 || j < 0 || i >= s.modes() || j >= s.modes()) {
    throw std::out_of_range("asymmetry_ratio: index out of range");
  }
  const double num = std::abs(s.entries()(i, j));
  const double den = std::abs(s.entries()(j, i));
  if (den == 0.0) {
    if (num == 0.0) {
      throw std::domain_error("asymmetry_ratio: both off-diagonal entries vanish");
    }
    return std::numeric_limits<double>::infinity();  // unidirectional
  }
  return num / den;
}

ScatteringMatrix loss_diag(const std::vector<double>& transmissions) {
  const Index n = static_cast<Index>(transmissions.size());
  if (n == 0) {
    throw std::invalid_argument("loss_diag: empty transmission list");
  }
  Matrix s = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double t = transmissions[i];
    if (t < 0.0 || t > 1.0) {
      throw std::invalid_argument("loss_diag: transmissions must lie in [0, 1]");
    }
    s(i, i) = t;
  }
  return ScatteringMatrix(std::move(s));
}

namespace {

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

GaugeCheckResult reciprocal_mod_gauge(const ScatteringMatrix& s, double tol) {
  const Matrix& mat = s.entries();
  const Index n = mat.rows();
  GaugeCheckResult result;

  // Necessary condition: |S_ij| = |S_ji| for every pair.
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(std::abs(mat(i, j)) - std::abs(mat(j, i))) > tol) {
        result.reciprocal = false;
        result.witness = {static_cast<int>(i), static_cast<int>(j)};
        return result;
      }
    }
  }

  // With gauge phases phi (output) and psi (input), symmetry of
  // e^{i phi_i} S_ij e^{i psi_j} requires
  //   arg S_ij - arg S_ji = u_j - u_i (mod 2pi),  u = phi - psi,
  // on the graph of pairs with both entries nonzero. Assign u by BFS over a
  // spanning forest, then verify every edge (cycle consistency).
  const double mag_floor = tol;
  std::vector<double> u(n, 0.0);
  std::vector<int> state(n, 0);  // 0 unvisited, 1 assigned
  auto edge_ok = [&](Index i, Index j) {
    return std::abs(mat(i, j)) > mag_floor && std::abs(mat(j, i)) > mag_floor;
  };
  auto phase_gap = [&](Index i, Index j) {
    return std::arg(mat(i, j)) - std::arg(mat(j, i));
  };

  for (Index root = 0; root < n; ++root) {
    if (state[root] != 0) continue;
    state[root] = 1;
    u[root] = 0.0;
    std::vector<Index> queue = {root};
    while (!queue.empty()) {
      const Index i = queue.back();
      queue.pop_back();
      for (Index j = 0; j < n; ++j) {
        if (j == i || !edge_ok(i, j)) continue;
        if (state[j] == 0) {
          u[j] = u[i] + phase_gap(i, j);
          state[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (!edge_ok(i, j)) continue;
      const double defect = wrap_angle(phase_gap(i, j) - (u[j] - u[i]));
      // Angle tolerance scaled against the entry magnitude so that tiny
      // entries do not produce spurious witnesses.
      const double angle_tol = tol / std::max(std::abs(mat(i, j)), mag_floor) + 1e-12;
      if (std::abs(defect) > angle_tol) {
        result.reciprocal = false;
        result.witness = {static_cast<int>(i), static_cast<int>(j)};
        return result;
      }
    }
  }

  result.reciprocal = true;
  result.output_phases.resize(n);
  for (Index i = 0; i < n; ++i) result.output_phases[i] = u[i];
  return result;
}

}  // namespace dissim
