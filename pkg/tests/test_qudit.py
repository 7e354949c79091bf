import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from repeatergates import qudit
from repeatergates.qudit import (DimensionError, QuditState, apply_on, basis_index, bell_basis, fourier, gen_pauli_x,
                                 gen_pauli_z, haar_unitary, is_unitary, max_entangled, measure, overlap, pauli,
                                 reduced_density, teleport)

dims_st = st.lists(st.integers(2, 4), min_size=1, max_size=3)
seeds = st.integers(0, 2 ** 32 - 1)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_shift_and_clock_commutation(d):
    x, z = gen_pauli_x(d), gen_pauli_z(d)
    w = np.exp(2j * np.pi / d)
    assert_allclose(x @ z, w * z @ x, atol=1e-12)
    assert_allclose(np.linalg.matrix_power(x, d), np.eye(d), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fourier_maps_shift_to_clock(d):
    f = fourier(d)
    assert is_unitary(f)
    assert_allclose(f @ gen_pauli_x(d) @ f.conj().T, gen_pauli_z(d), atol=1e-12)


def test_qubit_fourier_is_hadamard():
    assert_allclose(fourier(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-12)


def test_little_endian_index():
    # first subsystem is the fastest-varying digit
    assert basis_index((1, 0), (2, 3)) == 1
    assert basis_index((0, 1), (2, 3)) == 2
    assert basis_index((1, 2), (2, 3)) == 5


def test_dimension_cap_enforced():
    old = qudit.set_dimension_cap(8)
    try:
        with pytest.raises(DimensionError):
            QuditState((4, 4), np.ones(16))
    finally:
        qudit.set_dimension_cap(old)


def test_amplitude_length_checked():
    with pytest.raises(DimensionError):
        QuditState((2, 2), np.ones(3))


@settings(max_examples=40, deadline=None)
@given(dims_st, seeds, st.data())
def test_local_unitary_preserves_norm_and_is_reversible(dims, seed, data):
    rng = np.random.default_rng(seed)
    psi = QuditState.random(dims, rng)
    t = data.draw(st.integers(0, len(dims) - 1))
    u = haar_unitary(dims[t], rng)
    out = apply_on(psi, u, (t,))
    assert out.norm == pytest.approx(1.0, abs=1e-12)
    back = apply_on(out, u.conj().T, (t,))
    assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 3), min_size=2, max_size=3), seeds)
def test_apply_on_matches_kron(dims, seed):
    rng = np.random.default_rng(seed)
    psi = QuditState.random(dims, rng)
    u = haar_unitary(dims[0] * dims[1], rng)
    out = apply_on(psi, u, (0, 1))
    full = u
    for d in dims[2:]:
        # later subsystems are the slower digits
        full = np.kron(np.eye(d), full)
    assert_allclose(out.amplitudes, full @ psi.amplitudes, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(dims_st, seeds)
def test_measurement_probabilities_sum_to_one(dims, seed):
    rng = np.random.default_rng(seed)
    psi = QuditState.random(dims, rng)
    branches = measure(psi, (0,), keep_zero=True)
    assert len(branches) == dims[0]
    assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-12)
    # Born rule against the reduced state
    rho = reduced_density(psi, (0,))
    assert_allclose([b.probability for b in branches], np.real(np.diag(rho)), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_bell_basis_is_orthonormal(d):
    b = bell_basis(d)
    assert_allclose(b.conj().T @ b, np.eye(d * d), atol=1e-12)
    assert_allclose(b[:, 0], max_entangled(d).amplitudes, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 4), seeds)
def test_teleportation_every_branch(d, seed):
    psi = QuditState.random((d,), np.random.default_rng(seed))
    branches = teleport(d, psi)
    assert len(branches) == d * d
    for b in branches:
        assert b.probability == pytest.approx(1 / d ** 2, abs=1e-12)
        assert overlap(b.post_state, psi) >= 1 - 1e-9


def test_pauli_is_shift_times_clock():
    assert_allclose(pauli(3, 1, 2), gen_pauli_x(3) @ gen_pauli_z(3) @ gen_pauli_z(3), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), seeds)
def test_haar_unitary_is_unitary(n, seed):
    assert is_unitary(haar_unitary(n, np.random.default_rng(seed)))
