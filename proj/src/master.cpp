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

#include "dissim/master.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#if defined(__SSE2__)
#include <pmmintrin.h>
#endif

#include "dissim/errors.hpp"

namespace dissim {

namespace {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;

// Superoperator construction is dense in dim^2; refuse sizes where that
// stops being a reasonable object to materialize.
constexpr Index kMaxSuperoperatorDim = 48;

constexpr double kPopulationTopLimit = 1e-6;
constexpr double kPopulationDriftLimit = 1e-8;

struct PreparedTerm {
  double rate;
  SparseMatrixC l;
  SparseMatrixC l_dag;
  SparseMatrixC k;  // L^dag L
};

std::vector<PreparedTerm> prepare_terms(const TruncatedSpace& space,
                                        const std::vector<LindbladTerm>& terms) {
  std::vector<PreparedTerm> prepared;
  prepared.reserve(terms.size());
  for (const LindbladTerm& term : terms) {
    if (term.op.space() != space) {
      throw std::invalid_argument("evolve: all terms must act on the state's space");
    }
    PreparedTerm p;
    p.rate = term.rate;
    p.l = term.op.entries().sparseView(1.0, 1e-300);
    p.l_dag = SparseMatrixC(p.l.adjoint());
    p.k = SparseMatrixC(p.l_dag * p.l);
    prepared.push_back(std::move(p));
  }
  return prepared;
}

// Density-matrix tails decay into the denormal range (coherences below
// 1e-300), and denormal arithmetic runs with a ~100-cycle assist per
// operation. Flushing them to zero is harmless at abs_tol = 1e-10 and
// speeds stiff loss cascades up by an order of magnitude.
class DenormalFlushGuard {
 public:
#if defined(__SSE2__)
  DenormalFlushGuard() : csr_(_mm_getcsr()) { _mm_setcsr(csr_ | 0x8040); }
  ~DenormalFlushGuard() { _mm_setcsr(csr_); }

 private:
  unsigned int csr_;
#endif
};

struct RhsWorkspace {
  Matrix scratch;
};

void dissipator_rhs(const std::vector<PreparedTerm>& terms, const Matrix& rho,
                    Matrix& out, RhsWorkspace& ws) {
  out.setZero();
  if (ws.scratch.rows() != rho.rows()) ws.scratch.resize(rho.rows(), rho.cols());
  for (const PreparedTerm& term : terms) {
    ws.scratch.noalias() = term.l * rho;
    out.noalias() += (2.0 * term.rate) * (ws.scratch * term.l_dag);
    ws.scratch.noalias() = term.k * rho;
    out.noalias() -= term.rate * ws.scratch;
    ws.scratch.noalias() = rho * term.k;
    out.noalias() -= term.rate * ws.scratch;
  }
}

using RhsFn = std::function<void(const Matrix&, Matrix&)>;
using StepCheckFn = std::function<void(double, const Matrix&)>;

double scaled_error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1,
                         double atol, double rtol) {
  double acc = 0.0;
  for (Index j = 0; j < err.cols(); ++j) {
    for (Index i = 0; i < err.rows(); ++i) {
      const double mag2 = std::max(std::norm(y0(i, j)), std::norm(y1(i, j)));
      const double scale = atol + rtol * std::sqrt(mag2);
      acc += std::norm(err(i, j)) / (scale * scale);
    }
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double rms_scaled(const Matrix& v, const Matrix& ref, double atol, double rtol) {
  double acc = 0.0;
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      const double scale = atol + rtol * std::abs(ref(i, j));
      const double e = std::abs(v(i, j)) / scale;
      acc += e * e;
    }
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Hairer-style starting step estimate.
double initial_step(const RhsFn& rhs, const Matrix& y0, const Matrix& f0,
                    double duration, double atol, double rtol) {
  const double d0 = rms_scaled(y0, y0, atol, rtol);
  const double d1 = rms_scaled(f0, y0, atol, rtol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, duration);
  Matrix y1 = y0 + h0 * f0;
  Matrix f1(y0.rows(), y0.cols());
  rhs(y1, f1);
  const double d2 = rms_scaled((f1 - f0).eval(), y0, atol, rtol) / h0;
  const double d_max = std::max(d1, d2);
  double h1 = (d_max <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                               : std::pow(0.01 / d_max, 0.2);
  return std::min({100.0 * h0, h1, duration});
}

// Embedded Dormand-Prince 5(4) pair with PI-free standard step control.
Matrix integrate_dp45(Matrix y, double t0, double t1, const RhsFn& rhs,
                      double rel_tol, double abs_tol,
                      const StepCheckFn& step_check) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b (5th order) minus the embedded 4th-order weights.
  static const double d1 = 71.0 / 57600, d3 = -71.0 / 16695, d4 = 71.0 / 1920,
                      d5 = -17253.0 / 339200, d6 = 22.0 / 525, d7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span <= 0.0) return y;
  const DenormalFlushGuard flush_guard;

  const Index rows = y.rows(), cols = y.cols();
  Matrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols),
      k5(rows, cols), k6(rows, cols), k7(rows, cols), y_next(rows, cols),
      y_stage(rows, cols), err(rows, cols);

  rhs(y, k1);
  double t = t0;
  double h = initial_step(rhs, y, k1, span, abs_tol, rel_tol);
  const double h_min_floor = span * 1e-14;
  long steps = 0;
  const long max_steps = 20000000;
  // Growth is frozen right after a rejection; without this the controller
  // oscillates around the stability boundary of stiff loss cascades and
  // wastes about half the steps.
  double fac_max = 5.0;

  while (t < t1) {
    if (++steps > max_steps) {
      throw StiffnessError("evolve: step limit exceeded", t);
    }
    h = std::min(h, t1 - t);
    if (h < h_min_floor) {
      throw StiffnessError("evolve: step size underflow", t);
    }

    y_stage.noalias() = y + (h * a21) * k1;
    rhs(y_stage, k2);
    y_stage.noalias() = y + (h * a31) * k1 + (h * a32) * k2;
    rhs(y_stage, k3);
    y_stage.noalias() = y + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3;
    rhs(y_stage, k4);
    y_stage.noalias() =
        y + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4;
    rhs(y_stage, k5);
    y_stage.noalias() = y + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 +
                        (h * a64) * k4 + (h * a65) * k5;
    rhs(y_stage, k6);
    y_next.noalias() =
        y + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
    rhs(y_next, k7);

    err.noalias() = (h * d1) * k1 + (h * d3) * k3 + (h * d4) * k4 + (h * d5) * k5 +
                    (h * d6) * k6 + (h * d7) * k7;
    double err_norm = scaled_error_norm(err, y, y_next, abs_tol, rel_tol);
    if (!std::isfinite(err_norm)) err_norm = 1e6;  // overflowing trial step

    if (err_norm <= 1.0) {
      t += h;
      y.swap(y_next);
      k1.swap(k7);  // FSAL
      if (step_check) step_check(t, y);
      const double factor =
          (err_norm <= 1e-30) ? fac_max
                              : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, fac_max);
      h *= factor;
      fac_max = 5.0;
    } else {
      h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
      fac_max = 1.0;
    }
  }
  return y;
}

DensityMatrix run_evolution(const DensityMatrix& rho, const RhsFn& rhs,
                            double duration, const EvolveOptions& options) {
  if (duration < 0.0) {
    throw std::invalid_argument("evolve: negative duration");
  }
  const double trace0 = rho.trace_real();
  const DensityMatrix::Tolerances engine_tol{1e-8, 2e-6, 1e-6};

  auto validated = [&](const Matrix& m) {
    return DensityMatrix(rho.space(), m, engine_tol);
  };

  StepCheckFn trace_guard = [&](double t, const Matrix& y) {
    const double drift = std::abs(y.trace().real() - trace0);
    if (drift > options.trace_drift_limit) {
      throw NumericalError("evolve: trace drift " + std::to_string(drift) +
                           " beyond limit at t = " + std::to_string(t));
    }
  };

  if (options.observer) options.observer(0.0, rho);
  if (duration == 0.0) return rho;

  Matrix state = rho.entries();
  if (options.observer && options.sample_interval > 0.0) {
    double t = 0.0;
    while (t < duration) {
      const double t_next = std::min(t + options.sample_interval, duration);
      state = integrate_dp45(std::move(state), t, t_next, rhs, options.rel_tol,
                             options.abs_tol, trace_guard);
      t = t_next;
      options.observer(t, validated(state));
    }
    return validated(state);
  }

  state = integrate_dp45(std::move(state), 0.0, duration, rhs, options.rel_tol,
                         options.abs_tol, trace_guard);
  DensityMatrix out = validated(state);
  if (options.observer) options.observer(duration, out);
  return out;
}

}  // namespace

LindbladTerm::LindbladTerm(double rate_, OperatorMatrix op_)
    : rate(rate_), op(std::move(op_)) {
  if (rate < 0.0) {
    throw std::invalid_argument("LindbladTerm: rate must be >= 0");
  }
}

OperatorMatrix two_photon_loss_op(const TruncatedSpace& space, int mode) {
  const OperatorMatrix a = annihilation(space, mode);
  return OperatorMatrix(space, a.entries() * a.entries());
}

OperatorMatrix nonlinear_coherent_loss_op(const TruncatedSpace& space, int mode,
                                          int threshold) {
  const OperatorMatrix a = annihilation(space, mode);
  const OperatorMatrix n = number_operator(space, mode);
  const Matrix shifted =
      n.entries() - static_cast<double>(threshold) *
                        Matrix::Identity(space.dim(), space.dim());
  return OperatorMatrix(space, a.entries() * shifted);
}

void DiagonalLossFamily::add(double rate, int order, RealVector poly) {
  if (rate < 0.0) {
    throw std::invalid_argument("DiagonalLossFamily: rate must be >= 0");
  }
  if (order != 1 && order != 2) {
    throw std::invalid_argument(
        "DiagonalLossFamily: only first- and second-order loss is diagonal");
  }
  if (poly.size() == 0) {
    throw std::invalid_argument("DiagonalLossFamily: empty polynomial factor");
  }
  members_.push_back(Member{rate, order, std::move(poly)});
}

void DiagonalLossFamily::add_single_photon(double rate) {
  add(rate, 1, RealVector::Ones(1));
}

void DiagonalLossFamily::add_two_photon(double rate) {
  add(rate, 2, RealVector::Ones(1));
}

void DiagonalLossFamily::add_ncl(double rate, int threshold) {
  // a (n - m) = f(n) a with f(n) = n + 1 - m evaluated after the jump.
  RealVector poly(2);
  poly << 1.0 - static_cast<double>(threshold), 1.0;
  add(rate, 1, std::move(poly));
}

namespace {
double eval_poly(const RealVector& poly, double n) {
  double v = 0.0;
  for (Index k = poly.size() - 1; k >= 0; --k) v = v * n + poly[k];
  return v;
}
}  // namespace

double DiagonalLossFamily::weight(const Member& member, int n) {
  if (n < member.order) return 0.0;
  double falling = 1.0;
  for (int k = 0; k < member.order; ++k) falling *= static_cast<double>(n - k);
  const double f = eval_poly(member.poly, static_cast<double>(n - member.order));
  return falling * f * f;
}

std::vector<LindbladTerm> DiagonalLossFamily::lindblad_terms(
    const TruncatedSpace& space) const {
  if (space.num_modes() != 1) {
    throw std::invalid_argument("DiagonalLossFamily: single-mode spaces only");
  }
  const int cutoff = space.cutoff(0);
  std::vector<LindbladTerm> terms;
  terms.reserve(members_.size());
  for (const Member& member : members_) {
    Matrix l = Matrix::Zero(space.dim(), space.dim());
    for (int n = member.order; n <= cutoff; ++n) {
      double amp = 1.0;
      for (int k = 0; k < member.order; ++k) amp *= static_cast<double>(n - k);
      l(n - member.order, n) =
          std::sqrt(amp) * eval_poly(member.poly, static_cast<double>(n - member.order));
    }
    terms.emplace_back(member.rate, OperatorMatrix(space, std::move(l)));
  }
  return terms;
}

Superoperator::Superoperator(TruncatedSpace space, Matrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  const Index d2 = space_.dim() * space_.dim();
  if (entries_.rows() != d2 || entries_.cols() != d2) {
    throw std::invalid_argument("Superoperator: entries must be dim^2 x dim^2");
  }
}

double Superoperator::trace_preservation_defect() const {
  const Index d = space_.dim();
  Vector vec_id = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) vec_id[i * d + i] = 1.0;
  return (vec_id.adjoint() * entries_).cwiseAbs().maxCoeff();
}

Superoperator build_liouvillian(const TruncatedSpace& space,
                                const std::vector<LindbladTerm>& terms) {
  if (space.dim() > kMaxSuperoperatorDim) {
    throw std::invalid_argument(
        "build_liouvillian: space too large for a dense superoperator; "
        "use the term-based evolve");
  }
  const Index d = space.dim();
  Matrix lv = Matrix::Zero(d * d, d * d);
  const Matrix id = Matrix::Identity(d, d);
  for (const LindbladTerm& term : terms) {
    if (term.op.space() != space) {
      throw std::invalid_argument("build_liouvillian: term space mismatch");
    }
    const Matrix& l = term.op.entries();
    const Matrix k = l.adjoint() * l;
    // Column stacking: vec(A rho B) = (B^T kron A) vec(rho).
    lv += term.rate * (2.0 * Eigen::kroneckerProduct(l.conjugate(), l) -
                       Eigen::kroneckerProduct(id, k) -
                       Eigen::kroneckerProduct(k.transpose(), id));
  }
  return Superoperator(space, std::move(lv));
}

Matrix lindblad_rhs(const std::vector<LindbladTerm>& terms, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const LindbladTerm& term : terms) {
    const Matrix& l = term.op.entries();
    const Matrix k = l.adjoint() * l;
    out += term.rate * (2.0 * l * rho * l.adjoint() - k * rho - rho * k);
  }
  return out;
}

Matrix apply_generator(const Superoperator& superop, const Matrix& rho) {
  const Index d = superop.space().dim();
  if (rho.rows() != d || rho.cols() != d) {
    throw std::invalid_argument("apply_generator: state dimension mismatch");
  }
  const Vector vec_rho = Eigen::Map<const Vector>(rho.data(), d * d);
  const Vector out = superop.entries() * vec_rho;
  return Eigen::Map<const Matrix>(out.data(), d, d);
}

DensityMatrix evolve(const DensityMatrix& rho,
                     const std::vector<LindbladTerm>& terms, double duration,
                     const EvolveOptions& options) {
  const std::vector<PreparedTerm> prepared = prepare_terms(rho.space(), terms);
  RhsWorkspace ws;
  RhsFn rhs = [&prepared, &ws](const Matrix& y, Matrix& out) {
    dissipator_rhs(prepared, y, out, ws);
  };
  return run_evolution(rho, rhs, duration, options);
}

DensityMatrix evolve(const DensityMatrix& rho, const Superoperator& superop,
                     double duration, const EvolveOptions& options) {
  if (superop.space() != rho.space()) {
    throw std::invalid_argument("evolve: superoperator and state spaces differ");
  }
  const Index d = rho.space().dim();
  RhsFn rhs = [&superop, d](const Matrix& y, Matrix& out) {
    const Vector vec_y = Eigen::Map<const Vector>(y.data(), d * d);
    const Vector vec_out = superop.entries() * vec_y;
    out = Eigen::Map<const Matrix>(vec_out.data(), d, d);
  };
  return run_evolution(rho, rhs, duration, options);
}

DensityMatrix evolve_fixed_step(const DensityMatrix& rho,
                                const std::vector<LindbladTerm>& terms,
                                double duration, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("evolve_fixed_step: need at least one step");
  }
  if (duration < 0.0) {
    throw std::invalid_argument("evolve_fixed_step: negative duration");
  }
  const std::vector<PreparedTerm> prepared = prepare_terms(rho.space(), terms);
  const DenormalFlushGuard flush_guard;
  RhsWorkspace ws;
  const double h = duration / steps;
  Matrix y = rho.entries();
  Matrix k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols()),
      k4(y.rows(), y.cols());
  for (int s = 0; s < steps; ++s) {
    dissipator_rhs(prepared, y, k1, ws);
    dissipator_rhs(prepared, (y + 0.5 * h * k1).eval(), k2, ws);
    dissipator_rhs(prepared, (y + 0.5 * h * k2).eval(), k3, ws);
    dissipator_rhs(prepared, (y + h * k3).eval(), k4, ws);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return DensityMatrix(rho.space(), std::move(y),
                       DensityMatrix::Tolerances{1e-8, 2e-6, 1e-6});
}

Eigen::MatrixXd population_generator(const DiagonalLossFamily& family,
                                     int cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("population_generator: cutoff must be >= 1");
  }
  const int n_levels = cutoff + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_levels, n_levels);
  for (const DiagonalLossFamily::Member& member : family.members()) {
    for (int n = 0; n <= cutoff; ++n) {
      const double w = DiagonalLossFamily::weight(member, n);
      if (w == 0.0) continue;
      a(n, n) -= 2.0 * member.rate * w;
      a(n - member.order, n) += 2.0 * member.rate * w;
    }
  }
  return a;
}

Eigen::MatrixXd population_propagator(const DiagonalLossFamily& family,
                                      int cutoff, double duration) {
  if (duration < 0.0) {
    throw std::invalid_argument("population_propagator: negative duration");
  }
  const Eigen::MatrixXd a = population_generator(family, cutoff);
  Eigen::MatrixXd e = (a * duration).exp();
  // The generator has exact zero column sums, so each propagator column
  // sums to 1. Scaling-and-squaring leaves 1e-11-scale defects on the
  // stiffest columns; project them out.
  for (Index j = 0; j < e.cols(); ++j) {
    const double colsum = e.col(j).sum();
    if (colsum > 0.5) e.col(j) /= colsum;
  }
  return e;
}

PopulationVector apply_population_propagator(const Eigen::MatrixXd& propagator,
                                             const PopulationVector& p) {
  if (propagator.rows() != p.probs().size() ||
      propagator.cols() != p.probs().size()) {
    throw std::invalid_argument(
        "apply_population_propagator: propagator size mismatch");
  }
  const Index top = p.probs().size() - 1;
  if (p.probs()[top] > kPopulationTopLimit) {
    throw CutoffError(
        "populations: top truncation level already occupied; cutoff too small");
  }
  RealVector out = propagator * p.probs();
  if (out[top] > kPopulationTopLimit) {
    throw CutoffError("populations: top truncation level filled up; cutoff too small");
  }
  const double drift = std::abs(out.sum() - p.probs().sum());
  if (drift > kPopulationDriftLimit) {
    throw NumericalError("populations: conservation drift beyond 1e-8");
  }
  return PopulationVector(p.space(), std::move(out), 2e-8);
}

PopulationVector evolve_populations(const PopulationVector& p,
                                    const DiagonalLossFamily& family,
                                    double duration) {
  if (duration == 0.0) return p;
  return apply_population_propagator(
      population_propagator(family, p.cutoff(), duration), p);
}

double stationary_residual(const DensityMatrix& rho,
                           const std::vector<LindbladTerm>& terms) {
  double residual = 0.0;
  for (const LindbladTerm& term : terms) {
    if (term.op.space() != rho.space()) {
      throw std::invalid_argument("stationary_residual: term space mismatch");
    }
    residual = std::max(
        residual, (term.op.entries() * rho.entries()).cwiseAbs().maxCoeff());
  }
  return residual;
}

}  // namespace dissim
