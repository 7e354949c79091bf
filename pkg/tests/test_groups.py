import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from repeatergates.groups import (CirculantError, FormError, build_circulant, check_fast_form,
                                  controlled_abelian_expansion, controlled_form, controlled_form_from_unitary,
                                  cyclic_rep, expand_double_group, expand_single_group, find_member, is_clifford,
                                  pauli_rep)
from repeatergates.qudit import gen_pauli_x, haar_unitary, is_unitary, tensor

seeds = st.integers(0, 2 ** 32 - 1)
dim_pairs = st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)])

CNOT = controlled_form([1, 1], [np.eye(2), gen_pauli_x(2)]).unitary()


def sum_gate(d):
    u = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            u[a + d * ((a + b) % d), a + d * b] = 1
    return u


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pauli_rep_cocycle(d):
    rep = pauli_rep(d)
    assert rep.order == d * d
    rep.check()


@settings(max_examples=20, deadline=None)
@given(dim_pairs, seeds)
def test_double_group_expansion_reconstructs(dims, seed):
    u = haar_unitary(dims[0] * dims[1], np.random.default_rng(seed))
    exp = expand_double_group(u, *dims)
    assert_allclose(exp.unitary(), u, atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(dim_pairs, seeds)
def test_single_group_expansion_reconstructs(dims, seed):
    u = haar_unitary(dims[0] * dims[1], np.random.default_rng(seed))
    exp = expand_single_group(u, *dims)
    assert exp.order == dims[0] ** 2
    assert_allclose(exp.unitary(), u, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(dim_pairs, seeds)
def test_circulant_is_unitary(dims, seed):
    u = haar_unitary(dims[0] * dims[1], np.random.default_rng(seed))
    c = build_circulant(expand_double_group(u, *dims))
    assert is_unitary(c)


def test_non_unitary_input_rejected():
    with pytest.raises(FormError):
        expand_double_group(np.ones((4, 4)), 2, 2)


def test_non_unitary_expansion_warns_when_lenient():
    with pytest.warns(UserWarning):
        exp = expand_double_group(np.diag([1, 1, 1, 2.0]), 2, 2, strict=False)
    assert exp.flagged_nonunitary
    with pytest.raises(CirculantError):
        build_circulant(exp)


def test_controlled_form_roundtrip():
    rng = np.random.default_rng(3)
    form = controlled_form([2, 1], [haar_unitary(2, rng), haar_unitary(2, rng)])
    back = controlled_form_from_unitary(form.unitary(), 3, 2)
    assert_allclose(back.unitary(), form.unitary(), atol=1e-12)
    assert back.N == 2


def test_controlled_form_checks():
    with pytest.raises(FormError):
        controlled_form([1, 1], [np.eye(2)])
    with pytest.raises(FormError):
        controlled_form([1, 1], [np.eye(2), np.ones((2, 2))])


def test_find_member_returns_phase():
    rep = pauli_rep(3)
    g, lam = find_member(rep, 1j * rep.matrices[4])
    assert g == 4 and lam == pytest.approx(1j)
    with pytest.raises(FormError):
        find_member(rep, np.ones((3, 3)))


@pytest.mark.parametrize("d", [2, 3])
def test_controlled_abelian_expansion_matches(d):
    x = gen_pauli_x(d)
    form = controlled_form([1] * d, [np.linalg.matrix_power(x, k) for k in range(d)])
    exp = controlled_abelian_expansion(form, cyclic_rep(x, d))
    assert_allclose(exp.unitary(), form.unitary(), atol=1e-12)
    assert check_fast_form(exp, trials=4)


def test_product_unitary_has_fast_form():
    rng = np.random.default_rng(0)
    exp = expand_double_group(tensor(haar_unitary(2, rng), haar_unitary(2, rng)), 2, 2)
    assert check_fast_form(exp, trials=4)


def test_generic_unitary_lacks_fast_form():
    exp = expand_double_group(haar_unitary(4, np.random.default_rng(1)), 2, 2)
    assert not check_fast_form(exp, trials=4)


def test_clifford_detection():
    assert is_clifford(CNOT, 1, 1, 2)
    assert is_clifford(sum_gate(3), 1, 1, 3)
    t_gate = tensor(np.diag([1, np.exp(1j * np.pi / 4)]), np.eye(2))
    assert not is_clifford(t_gate, 1, 1, 2)
    with pytest.raises(FormError):
        is_clifford(np.eye(16), 1, 1, 4)


def test_expansion_dump_format():
    lines = expand_double_group(CNOT, 2, 2).dump()
    assert lines and all(" -> (" in s and s.startswith("(") for s in lines)
