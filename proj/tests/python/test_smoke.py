"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import dissim


def test_space_and_states():
    space = dissim.make_space(1, [12])
    assert space.dim == 13
    rho = dissim.coherent_state(space, [1.0 + 0.0j])
    n = dissim.number_operator(space, 0)
    assert dissim.expectation(rho, n).real == pytest.approx(1.0, abs=1e-8)
    p = dissim.photon_distribution(rho, 0)
    assert p.probs[0] == pytest.approx(math.exp(-1.0), abs=1e-9)
    assert dissim.mandel_q(p) == pytest.approx(0.0, abs=1e-7)


def test_amplitude_engine():
    coupler = dissim.coupling_matrix(
        [dissim.LinearLindblad(1.0, np.array([1.0, -0.5], dtype=complex))], 2
    )
    s = dissim.asymptotic_scatter(coupler)
    expected = np.array([[0.2, 0.4], [0.4, 0.8]])
    assert np.abs(s.entries - expected).max() < 1e-12

    out = dissim.propagate(np.array([-0.5, -1.0], dtype=complex), coupler, 3.0)
    assert np.abs(out - np.array([-0.5, -1.0])).max() < 1e-12


def test_master_engine_decay():
    space = dissim.make_space(1, [10])
    rho = dissim.coherent_state(space, [1.0 + 0.0j])
    terms = [dissim.LindbladTerm(1.0, dissim.annihilation(space, 0))]
    out = dissim.evolve(rho, terms, 1.0)
    amp = dissim.expectation(out, dissim.annihilation(space, 0))
    assert amp.real == pytest.approx(math.exp(-1.0), abs=1e-6)
    assert abs(amp.imag) < 1e-8


def test_population_solver():
    space = dissim.make_space(1, [30])
    p0 = dissim.poisson_populations(space, 5.0)
    family = dissim.DiagonalLossFamily()
    family.add_single_photon(1.0)
    p1 = dissim.evolve_populations(p0, family, 0.5)
    assert p1.mean == pytest.approx(5.0 * math.exp(-1.0), abs=1e-6)


def test_insulator_device():
    device = dissim.parse_device(
        """
        {"modes": 1, "cutoffs": [8], "parts": [
          {"engine": "kraus", "params": {"kind": "threshold", "m": 4}},
          {"engine": "kraus", "params": {"kind": "threshold", "m": 2}}]}
        """
    )
    space = device.space()
    probe = dissim.fock_state(space, [6])
    fwd = dissim.forward(device, probe)
    assert fwd.entries[2, 2].real == pytest.approx(1.0)
    bwd = dissim.backward(device, probe)
    assert bwd.entries[0, 0].real == pytest.approx(1.0)


def test_dephaser_reciprocity_report():
    device = dissim.parse_device(
        """
        {"modes": 2, "cutoffs": [1, 1], "parts": [
          {"engine": "unitary", "params": {"kind": "bs50"}},
          {"engine": "kraus", "params": {"kind": "dephase", "basis": "fock"}}]}
        """
    )
    space = device.space()
    probe = dissim.single_photon_superposition(space, 0.3)
    obs = dissim.correlation_observable(space, 1j)
    report = dissim.reciprocity_report(device, probe, [("P(i)", obs)], 1e-9)
    assert report["non_reciprocal"]
    entry = report["entries"][0]
    assert entry["p_forward"] == pytest.approx(0.0, abs=1e-12)
    assert entry["p_backward"] == pytest.approx(-0.82, abs=1e-12)


def test_schema_error():
    with pytest.raises(dissim.SchemaError):
        dissim.parse_device('{"modes": 0, "cutoffs": [], "parts": []}')


def test_evolve_against_scipy_expm():
    """Independent oracle: exponentiate the vectorized generator with scipy."""
    scipy_linalg = pytest.importorskip("scipy.linalg")

    space = dissim.make_space(1, [8])
    a = dissim.annihilation(space, 0).entries
    terms_np = [
        (0.8, a),
        (0.5, a @ a),
        (0.3, a @ (np.diag(np.arange(9.0)) - 2.0 * np.eye(9))),
    ]

    dim = 9
    eye = np.eye(dim)
    liouville = np.zeros((dim * dim, dim * dim), dtype=complex)
    for rate, op in terms_np:
        k = op.conj().T @ op
        liouville += rate * (
            2.0 * np.kron(op.conj(), op) - np.kron(eye, k) - np.kron(k.T, eye)
        )

    rho0 = dissim.coherent_state(space, [0.9 - 0.3j])
    t = 0.7
    expected = (scipy_linalg.expm(liouville * t) @ rho0.entries.flatten("F")).reshape(
        (dim, dim), order="F"
    )

    terms = [
        dissim.LindbladTerm(0.8, dissim.annihilation(space, 0)),
        dissim.LindbladTerm(0.5, dissim.two_photon_loss_op(space, 0)),
        dissim.LindbladTerm(0.3, dissim.nonlinear_coherent_loss_op(space, 0, 2)),
    ]
    out = dissim.evolve(rho0, terms, t)
    assert np.abs(out.entries - expected).max() < 1e-7
