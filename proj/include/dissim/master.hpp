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

#include <functional>
#include <vector>

#include "dissim/hilbert.hpp"

namespace dissim {

// One dissipator gamma (2 L rho L^dag - rho L^dag L - L^dag L rho).
// Time is dimensionless (gamma t) throughout; with this convention a
// single-photon-loss mode decays as <n>(t) = n0 exp(-2 gamma t).
struct LindbladTerm {
  double rate;
  OperatorMatrix op;

  LindbladTerm(double rate_, OperatorMatrix op_);
};

// a^2 on the given mode.
OperatorMatrix two_photon_loss_op(const TruncatedSpace& space, int mode);
// a (a^dag a - m): nonlinear coherent loss with dark states |0> and |m>.
OperatorMatrix nonlinear_coherent_loss_op(const TruncatedSpace& space, int mode,
                                          int threshold);

// Single-mode loss family whose members all have the form f(n) a^k,
// k in {1, 2}. For such operators the photon-number populations close on
// themselves, which is what the fast diagonal solver exploits.
class DiagonalLossFamily {
 public:
  struct Member {
    double rate;
    int order;             // photons removed per jump (1 or 2)
    RealVector poly;       // f as polynomial coefficients in n (low to high)
  };

  void add(double rate, int order, RealVector poly);
  void add_single_photon(double rate);        // L = a
  void add_two_photon(double rate);           // L = a^2
  void add_ncl(double rate, int threshold);   // L = a (n - m)

  const std::vector<Member>& members() const { return members_; }
  bool empty() const { return members_.empty(); }

  // Decay weight of level n for one member: n(n-1)...(n-k+1) f(n-k)^2.
  static double weight(const Member& member, int n);

  // Dense operator form of every member, for cross-checks against the
  // full master engine.
  std::vector<LindbladTerm> lindblad_terms(const TruncatedSpace& space) const;

 private:
  std::vector<Member> members_;
};

// Matrix form of the master-equation generator acting on column-stacked
// density matrices. Dense (dim^2 x dim^2); intended for small spaces.
class Superoperator {
 public:
  Superoperator(TruncatedSpace space, Matrix entries);

  const TruncatedSpace& space() const { return space_; }
  const Matrix& entries() const { return entries_; }

  // Largest violation of trace preservation: |vec(I)^dag L|_max.
  double trace_preservation_defect() const;

 private:
  TruncatedSpace space_;
  Matrix entries_;
};

Superoperator build_liouvillian(const TruncatedSpace& space,
                                const std::vector<LindbladTerm>& terms);

// Action of the generator on a state, evaluated by direct triple products.
Matrix lindblad_rhs(const std::vector<LindbladTerm>& terms, const Matrix& rho);

// Action of the matrix-form generator: unstacks L vec(rho).
Matrix apply_generator(const Superoperator& superop, const Matrix& rho);

struct EvolveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double trace_drift_limit = 1e-6;  // hard failure beyond this
  // When set, called at t = 0, every sample_interval, and the endpoint.
  std::function<void(double t, const DensityMatrix& rho)> observer;
  double sample_interval = 0.0;
};

// rho(duration) under d rho/dt = sum_j gamma_j (2 L_j rho L_j^dag
// - rho L_j^dag L_j - L_j^dag L_j rho), integrated with an embedded
// adaptive Dormand-Prince 5(4) pair. Trace drift is monitored and is a
// hard failure, never silently renormalized.
DensityMatrix evolve(const DensityMatrix& rho,
                     const std::vector<LindbladTerm>& terms, double duration,
                     const EvolveOptions& options = {});

// Same dynamics driven through a prebuilt superoperator (small spaces).
DensityMatrix evolve(const DensityMatrix& rho, const Superoperator& superop,
                     double duration, const EvolveOptions& options = {});

// Fixed-step classical RK4; integrator cross-check.
DensityMatrix evolve_fixed_step(const DensityMatrix& rho,
                                const std::vector<LindbladTerm>& terms,
                                double duration, int steps);

// Generator A of the closed population dynamics dp/dt = A p for a
// diagonal loss family, on levels 0..cutoff.
Eigen::MatrixXd population_generator(const DiagonalLossFamily& family,
                                     int cutoff);

// exp(A t) for the family generator. Columns of the result stay
// nonnegative and sum to 1 (Markov semigroup), so repeated squaring of
// propagators is stable.
Eigen::MatrixXd population_propagator(const DiagonalLossFamily& family,
                                      int cutoff, double duration);

// Propagator application with truncation and conservation guards.
PopulationVector apply_population_propagator(const Eigen::MatrixXd& propagator,
                                             const PopulationVector& p);

// Populations at time `duration` under the family dynamics.
PopulationVector evolve_populations(const PopulationVector& p,
                                    const DiagonalLossFamily& family,
                                    double duration);

// max_j max_entry |L_j rho|: zero exactly on the dissipative stationary
// manifold.
double stationary_residual(const DensityMatrix& rho,
                           const std::vector<LindbladTerm>& terms);

}  // namespace dissim
