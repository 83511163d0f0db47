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

#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "dissim/amplitude.hpp"
#include "dissim/errors.hpp"
#include "dissim/master.hpp"

using namespace dissim;

namespace {

std::vector<LindbladTerm> collective_terms(const TruncatedSpace& space,
                                           double rate,
                                           const std::vector<Complex>& coeffs) {
  Matrix l = Matrix::Zero(space.dim(), space.dim());
  for (int m = 0; m < space.num_modes(); ++m) {
    l += coeffs[m] * annihilation(space, m).entries();
  }
  std::vector<LindbladTerm> terms;
  terms.emplace_back(rate, OperatorMatrix(space, std::move(l)));
  return terms;
}

Matrix random_density_entries(const TruncatedSpace& space, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(space.dim(), space.dim());
  for (Index i = 0; i < space.dim(); ++i) {
    for (Index j = 0; j < space.dim(); ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace

TEST_CASE("liouvillian matches direct triple products") {
  TruncatedSpace space(2, {2, 2});
  std::vector<LindbladTerm> terms =
      collective_terms(space, 0.8, {1.0, Complex(-0.5, 0.2)});
  terms.emplace_back(0.3, two_photon_loss_op(space, 1));
  const Superoperator lv = build_liouvillian(space, terms);

  CHECK(lv.trace_preservation_defect() < 1e-9);

  for (unsigned seed = 0; seed < 5; ++seed) {
    const Matrix rho = random_density_entries(space, seed);
    const Matrix via_superop = apply_generator(lv, rho);
    const Matrix direct = lindblad_rhs(terms, rho);
    CHECK((via_superop - direct).cwiseAbs().maxCoeff() < 1e-12);
  }

  // empty term list is the zero map
  CHECK(build_liouvillian(space, {}).entries().cwiseAbs().maxCoeff() == 0.0);

  TruncatedSpace other = TruncatedSpace::single_mode(2);
  CHECK_THROWS_AS(build_liouvillian(other, terms), std::invalid_argument);
  CHECK_THROWS_AS(build_liouvillian(TruncatedSpace::single_mode(60), {}),
                  std::invalid_argument);
}

TEST_CASE("two-level decay rate") {
  // L = a at cutoff 1: p_1(t) = exp(-2t)
  TruncatedSpace space = TruncatedSpace::single_mode(1);
  std::vector<LindbladTerm> terms{{1.0, annihilation(space, 0)}};
  const DensityMatrix excited = fock_state(space, {1});
  const double t = 0.73;
  const DensityMatrix rho_t = evolve(excited, terms, t);
  CHECK(rho_t.entries()(1, 1).real() == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-8));

  // same through the dense superoperator route
  const DensityMatrix rho_s = evolve(excited, build_liouvillian(space, terms), t);
  CHECK((rho_s.entries() - rho_t.entries()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("evolve basics") {
  TruncatedSpace space = TruncatedSpace::single_mode(12);
  std::vector<LindbladTerm> terms{{1.0, annihilation(space, 0)}};
  const DensityMatrix rho0 = coherent_state(space, {Complex(1.0, 0.0)});

  // zero duration is the identity
  const DensityMatrix same = evolve(rho0, terms, 0.0);
  CHECK((same.entries() - rho0.entries()).cwiseAbs().maxCoeff() == 0.0);

  // <a>(t) = alpha exp(-t) for single-photon loss
  const DensityMatrix rho1 = evolve(rho0, terms, 1.0);
  const Complex amp = expectation(rho1, annihilation(space, 0));
  CHECK(std::abs(amp - Complex(std::exp(-1.0), 0.0)) < 1e-7);
  CHECK(std::abs(rho1.trace_real() - 1.0) < 1e-6);

  CHECK_THROWS_AS(evolve(rho0, terms, -1.0), std::invalid_argument);

  // no dissipators: the state is frozen
  const DensityMatrix frozen = evolve(rho0, {}, 5.0);
  CHECK((frozen.entries() - rho0.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("odd input drains fully under the symmetric collective loss") {
  TruncatedSpace space(2, {8, 8});
  std::vector<LindbladTerm> terms = collective_terms(space, 1.0, {1.0, -1.0});
  const DensityMatrix in = coherent_state(space, {1.0, -1.0});
  const DensityMatrix out = evolve(in, terms, 10.0);
  // (1,-1) is orthogonal to the dark vector (1,1) of L = a - b
  CHECK(std::abs(expectation(out, annihilation(space, 0))) < 1e-4);
  CHECK(std::abs(expectation(out, annihilation(space, 1))) < 1e-4);
}

TEST_CASE("evolve agrees with the amplitude picture on coherent inputs") {
  TruncatedSpace space(2, {8, 8});
  const double delta = -0.5;
  std::vector<LindbladTerm> terms = collective_terms(space, 1.0, {1.0, delta});
  Vector c(2);
  c << 1.0, delta;
  const CouplingMatrix m = coupling_matrix({LinearLindblad(1.0, c)}, 2);

  Vector alpha0(2);
  alpha0 << Complex(0.6, 0.1), Complex(-0.4, 0.0);
  const DensityMatrix rho0 = coherent_state(space, {alpha0[0], alpha0[1]});

  for (double t : {0.25, 1.0, 3.0}) {
    const DensityMatrix rho_t = evolve(rho0, terms, t);
    const Vector alpha_t = propagate(alpha0, m, t);
    CHECK(std::abs(expectation(rho_t, annihilation(space, 0)) - alpha_t[0]) < 1e-6);
    CHECK(std::abs(expectation(rho_t, annihilation(space, 1)) - alpha_t[1]) < 1e-6);
  }
}

TEST_CASE("evolution preserves trace, hermiticity and positivity") {
  TruncatedSpace space = TruncatedSpace::single_mode(10);
  std::vector<LindbladTerm> terms{{0.7, annihilation(space, 0)},
                                  {0.4, two_photon_loss_op(space, 0)},
                                  {0.2, nonlinear_coherent_loss_op(space, 0, 1)}};
  const DensityMatrix rho0 = coherent_state(space, {Complex(0.9, 0.5)});

  int samples = 0;
  EvolveOptions options;
  options.sample_interval = 0.25;
  options.observer = [&](double, const DensityMatrix& rho) {
    ++samples;
    CHECK(rho.hermiticity_defect() < 1e-8);
    CHECK(rho.min_eigenvalue() > -1e-6);
    CHECK(std::abs(rho.trace_real() - 1.0) < 1e-6);
  };
  const DensityMatrix out = evolve(rho0, terms, 2.0, options);
  CHECK(samples == 9);
  CHECK(std::abs(out.trace_real() - rho0.trace_real()) < 1e-6);
}

TEST_CASE("time-homogeneous composition") {
  TruncatedSpace space = TruncatedSpace::single_mode(8);
  std::vector<LindbladTerm> terms{{1.0, nonlinear_coherent_loss_op(space, 0, 2)}};
  const DensityMatrix rho0 = coherent_state(space, {Complex(1.1, 0.0)});
  const DensityMatrix one_shot = evolve(rho0, terms, 1.5);
  const DensityMatrix two_step = evolve(evolve(rho0, terms, 0.9), terms, 0.6);
  CHECK((one_shot.entries() - two_step.entries()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("adaptive integrator agrees with fixed-step RK4") {
  TruncatedSpace space = TruncatedSpace::single_mode(6);
  std::vector<LindbladTerm> terms{{1.0, annihilation(space, 0)},
                                  {0.5, two_photon_loss_op(space, 0)}};
  const DensityMatrix rho0 = coherent_state(space, {Complex(0.8, -0.3)});
  const DensityMatrix adaptive = evolve(rho0, terms, 1.0);
  const DensityMatrix fixed = evolve_fixed_step(rho0, terms, 1.0, 4000);
  CHECK((adaptive.entries() - fixed.entries()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("monotone photon number under pure loss") {
  TruncatedSpace space = TruncatedSpace::single_mode(10);
  std::vector<LindbladTerm> terms{{0.5, annihilation(space, 0)},
                                  {0.5, two_photon_loss_op(space, 0)}};
  const DensityMatrix rho0 = coherent_state(space, {Complex(1.0, 0.8)});
  double last = mean_photon_number(rho0, 0);
  EvolveOptions options;
  options.sample_interval = 0.1;
  options.observer = [&](double, const DensityMatrix& rho) {
    const double n = mean_photon_number(rho, 0);
    CHECK(n <= last + 1e-9);
    last = n;
  };
  evolve(rho0, terms, 2.0, options);
}

TEST_CASE("population rate equations: linear loss closed form") {
  TruncatedSpace space = TruncatedSpace::single_mode(30);
  DiagonalLossFamily family;
  family.add_single_photon(1.0);
  const PopulationVector p0 = poisson_populations(space, 5.0);
  const PopulationVector p1 = evolve_populations(p0, family, 0.5);
  CHECK(p1.mean() == doctest::Approx(5.0 * std::exp(-1.0)).epsilon(1e-6));
  CHECK(std::abs(p1.probs().sum() - 1.0) < 2e-8);
}

TEST_CASE("fock state at the loss threshold is dark") {
  TruncatedSpace space = TruncatedSpace::single_mode(12);
  DiagonalLossFamily family;
  family.add_ncl(1.0, 2);
  RealVector two = RealVector::Zero(13);
  two[2] = 1.0;
  const PopulationVector p0(space, two);
  for (double t : {0.1, 1.0, 10.0}) {
    const PopulationVector pt = evolve_populations(p0, family, t);
    CHECK(pt.probs()[2] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("diagonal solver against the dense engine") {
  const int cutoff = 30;
  TruncatedSpace space = TruncatedSpace::single_mode(cutoff);
  const DensityMatrix rho0 = coherent_state(space, {Complex(std::sqrt(5.0), 0.0)});
  const PopulationVector p0 = photon_distribution(rho0, 0);

  struct Rates {
    double g0, g1, g2;
    int m;
  };
  for (const Rates& r : {Rates{1.0, 0.0, 0.0, 1}, Rates{0.0, 1.0, 0.0, 1},
                         Rates{0.0, 0.0, 1.0, 1}, Rates{0.5, 0.3, 0.2, 2},
                         Rates{1.0, 1.0, 1.0, 1}}) {
    DiagonalLossFamily family;
    if (r.g0 > 0) family.add_single_photon(r.g0);
    if (r.g1 > 0) family.add_two_photon(r.g1);
    if (r.g2 > 0) family.add_ncl(r.g2, r.m);

    const PopulationVector fast = evolve_populations(p0, family, 1.0);
    const DensityMatrix dense = evolve(rho0, family.lindblad_terms(space), 1.0);
    // raw diagonal: integration noise may leave tail entries at -1e-11
    const RealVector slow = dense.entries().diagonal().real();
    CHECK((fast.probs() - slow).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("step-size underflow reports the time reached") {
  // a rate 18 orders of magnitude above the timescale forces the
  // adaptive pair below its step floor almost immediately
  TruncatedSpace space = TruncatedSpace::single_mode(2);
  std::vector<LindbladTerm> terms{{1e18, annihilation(space, 0)}};
  const DensityMatrix rho0 = fock_state(space, {1});
  try {
    evolve(rho0, terms, 1.0);
    FAIL("expected StiffnessError");
  } catch (const StiffnessError& e) {
    CHECK(e.time_reached() >= 0.0);
    CHECK(e.time_reached() < 1.0);
  }
}

TEST_CASE("population solver guards") {
  TruncatedSpace space = TruncatedSpace::single_mode(6);
  DiagonalLossFamily family;
  family.add_single_photon(1.0);

  RealVector top_heavy = RealVector::Zero(7);
  top_heavy[6] = 1.0;
  CHECK_THROWS_AS(evolve_populations(PopulationVector(space, top_heavy), family, 0.1),
                  CutoffError);

  DiagonalLossFamily bad;
  CHECK_THROWS_AS(bad.add(1.0, 3, RealVector::Ones(1)), std::invalid_argument);
  CHECK_THROWS_AS(bad.add(-1.0, 1, RealVector::Ones(1)), std::invalid_argument);
}

TEST_CASE("diagonal family dense form matches the named operators") {
  TruncatedSpace space = TruncatedSpace::single_mode(9);
  DiagonalLossFamily family;
  family.add_single_photon(0.4);
  family.add_two_photon(0.7);
  family.add_ncl(0.9, 3);
  const std::vector<LindbladTerm> terms = family.lindblad_terms(space);
  REQUIRE(terms.size() == 3);
  CHECK((terms[0].op.entries() - annihilation(space, 0).entries()).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((terms[1].op.entries() - two_photon_loss_op(space, 0).entries())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK((terms[2].op.entries() - nonlinear_coherent_loss_op(space, 0, 3).entries())
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("stationary residual") {
  TruncatedSpace space = TruncatedSpace::single_mode(12);
  std::vector<LindbladTerm> loss{{1.0, annihilation(space, 0)}};

  CHECK(stationary_residual(fock_state(space, {0}), loss) == 0.0);

  std::vector<LindbladTerm> ncl{{1.0, nonlinear_coherent_loss_op(space, 0, 3)}};
  CHECK(stationary_residual(fock_state(space, {3}), ncl) == 0.0);

  const DensityMatrix coh = coherent_state(space, {Complex(1.0, 0.0)});
  CHECK(stationary_residual(coh, loss) > 0.1);
}
