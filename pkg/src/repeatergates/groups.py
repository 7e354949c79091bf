"""Controlled, double-group and single-group forms of bipartite unitaries."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qudit import UNITARY_TOL, is_unitary, pauli, tensor

ZERO_TOL = 1e-10


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectiveRep:
    """Matrices M(g) with M(f) M(g) = factor[f, g] * M(fg).

    ``labels`` name the elements; when ``cyclic_orders`` is set the group is
    the abelian product of cyclic groups with those orders and each label is
    the digit tuple of the element.
    """
    mult_table: np.ndarray
    factor_phases: np.ndarray
    matrices: tuple
    labels: tuple
    cyclic_orders: tuple | None = None

    @property
    def order(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def identity(self) -> int:
        for g in range(self.order):
            if all(self.mult_table[g, h] == h for h in range(self.order)):
                return g
        raise FormError("multiplication table has no identity")

    def inverse(self, g: int) -> int:
        e = self.identity
        for h in range(self.order):
            if self.mult_table[g, h] == e:
                return h
        raise FormError(f"element {g} has no inverse")

    def character(self, s: int, g: int) -> complex:
        """Character chi_s(g) of the abelian cyclic product (requires cyclic_orders)."""
        if self.cyclic_orders is None:
            raise FormError("characters need an abelian cyclic-product labelling")
        phase = sum(a * b / n for a, b, n in zip(self.labels[s], self.labels[g], self.cyclic_orders))
        return complex(np.exp(2j * np.pi * phase))

    def fourier_basis(self) -> np.ndarray:
        """Columns with uniform magnitude 1/sqrt|G|: characters when available, else label DFT."""
        n = self.order
        if self.cyclic_orders is not None:
            chi = np.array([[self.character(s, g) for s in range(n)] for g in range(n)])
            return chi / np.sqrt(n)
        j = np.arange(n)
        return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)

    def check(self, tol: float = 1e-9) -> None:
        for f in range(self.order):
            for g in range(self.order):
                w = self.factor_phases[f, g]
                if abs(abs(w) - 1) > 1e-12:
                    raise FormError(f"factor ({f},{g}) is not a phase")
                lhs = self.matrices[f] @ self.matrices[g]
                rhs = w * self.matrices[self.mult_table[f, g]]
                if np.max(np.abs(lhs - rhs)) > tol:
                    raise FormError(f"M({f})M({g}) != w M(fg)")


def _cyclic_product(orders: Sequence[int]):
    labels = list(itertools.product(*[range(n) for n in reversed(orders)]))
    labels = [tuple(reversed(l)) for l in labels]  # first digit varies fastest
    index = {l: i for i, l in enumerate(labels)}
    table = np.zeros((len(labels), len(labels)), dtype=int)
    for i, a in enumerate(labels):
        for j, b in enumerate(labels):
            table[i, j] = index[tuple((x + y) % n for x, y, n in zip(a, b, orders))]
    return labels, table


def _factors(matrices, table) -> np.ndarray:
    n = len(matrices)
    fac = np.ones((n, n), dtype=complex)
    for f in range(n):
        for g in range(n):
            target = matrices[table[f, g]]
            prod = matrices[f] @ matrices[g]
            k = np.unravel_index(np.argmax(np.abs(target)), target.shape)
            w = prod[k] / target[k]
            fac[f, g] = w / abs(w)
    return fac


def abelian_rep(orders: Sequence[int], matrix_of) -> ProjectiveRep:
    """Projective rep of Z_{n1} x ... from a function mapping a digit tuple to a unitary."""
    labels, table = _cyclic_product(orders)
    mats = tuple(np.asarray(matrix_of(l), dtype=complex) for l in labels)
    rep = ProjectiveRep(table, _factors(mats, table), mats, tuple(labels), tuple(orders))
    rep.check()
    return rep


def pauli_rep(d: int) -> ProjectiveRep:
    """The d^2 generalized Pauli operators X^j Z^k, labelled (j, k)."""
    if d < 2:
        raise FormError("pauli_rep needs d >= 2")
    return abelian_rep((d, d), lambda l: pauli(d, l[0], l[1]))


def cyclic_rep(generator: np.ndarray, order: int) -> ProjectiveRep:
    """Rep of Z_order by powers of ``generator`` (generator^order must be a phase times I)."""
    g = np.asarray(generator, dtype=complex)
    return abelian_rep((order,), lambda l: np.linalg.matrix_power(g, l[0]))


def product_pair(rep_a: ProjectiveRep, rep_b: ProjectiveRep):
    """Lift two reps to the direct product group, acting on the first and second factor."""
    na, nb = rep_a.order, rep_b.order
    table = np.zeros((na * nb, na * nb), dtype=int)
    fa = np.ones((na * nb, na * nb), dtype=complex)
    fb = np.ones_like(fa)
    for i in range(na * nb):
        for j in range(na * nb):
            ia, ib, ja, jb = i % na, i // na, j % na, j // na
            table[i, j] = rep_a.mult_table[ia, ja] + na * rep_b.mult_table[ib, jb]
            fa[i, j] = rep_a.factor_phases[ia, ja]
            fb[i, j] = rep_b.factor_phases[ib, jb]
    labels = tuple(rep_a.labels[i % na] + rep_b.labels[i // na] for i in range(na * nb))
    orders = None
    if rep_a.cyclic_orders is not None and rep_b.cyclic_orders is not None:
        orders = rep_a.cyclic_orders + rep_b.cyclic_orders
    ma = tuple(rep_a.matrices[i % na] for i in range(na * nb))
    mb = tuple(rep_b.matrices[i // na] for i in range(na * nb))
    return (ProjectiveRep(table, fa, ma, labels, orders),
            ProjectiveRep(table, fb, mb, labels, orders))


# ---------------------------------------------------------------- controlled form

@dataclass(frozen=True)
class ControlledForm:
    projectors: tuple
    targets: tuple
    block_of: tuple  # computational basis state of A -> block index j

    @property
    def N(self) -> int:
        return len(self.targets)

    @property
    def dims(self) -> tuple:
        return (self.projectors[0].shape[0], self.targets[0].shape[0])

    def unitary(self) -> np.ndarray:
        return sum(tensor(p, v) for p, v in zip(self.projectors, self.targets))


def controlled_form(projector_ranks: Sequence[int], targets: Sequence[np.ndarray]) -> ControlledForm:
    ranks = [int(r) for r in projector_ranks]
    if len(ranks) != len(targets) or not ranks:
        raise FormError("need one rank per target")
    if min(ranks) < 1:
        raise FormError("projector ranks must be >= 1")
    d_a = sum(ranks)
    targets = tuple(np.asarray(v, dtype=complex) for v in targets)
    for v in targets:
        if not is_unitary(v):
            raise FormError("controlled target is not unitary")
    if len({v.shape for v in targets}) != 1:
        raise FormError("targets must share one dimension")
    block_of, projs, start = [], [], 0
    for j, r in enumerate(ranks):
        p = np.zeros((d_a, d_a), dtype=complex)
        for x in range(start, start + r):
            p[x, x] = 1
            block_of.append(j)
        projs.append(p)
        start += r
    return ControlledForm(tuple(projs), targets, tuple(block_of))


def controlled_form_from_unitary(u: np.ndarray, d_a: int, d_b: int, tol: float = ZERO_TOL) -> ControlledForm:
    """Read off a computational-basis controlled form; adjacent equal targets share a block."""
    u = np.asarray(u, dtype=complex)
    blocks = u.reshape(d_b, d_a, d_b, d_a)  # [b, a, b', a']
    targets = []
    for x in range(d_a):
        for y in range(d_a):
            if x != y and np.max(np.abs(blocks[:, x, :, y])) > tol:
                raise FormError("unitary is not controlled in the computational basis of A")
        targets.append(blocks[:, x, :, x])
    ranks, merged = [], []
    for v in targets:
        if merged and np.max(np.abs(merged[-1] - v)) <= tol:
            ranks[-1] += 1
        else:
            merged.append(v)
            ranks.append(1)
    return controlled_form(ranks, merged)


# ------------------------------------------------------------- double-group form

@dataclass
class DoubleGroupExpansion:
    rep_A: ProjectiveRep
    rep_B: ProjectiveRep
    coeffs: np.ndarray
    fast_flag: bool | None = None
    flagged_nonunitary: bool = False

    @property
    def order(self) -> int:
        return self.rep_A.order

    @property
    def dims(self) -> tuple:
        return (self.rep_A.dim, self.rep_B.dim)

    def term(self, g: int) -> np.ndarray:
        return tensor(self.rep_A.matrices[g], self.rep_B.matrices[g])

    def factor(self, f: int, g: int) -> complex:
        return self.rep_A.factor_phases[f, g] * self.rep_B.factor_phases[f, g]

    def unitary(self) -> np.ndarray:
        return sum(c * self.term(g) for g, c in enumerate(self.coeffs) if abs(c) > 0)

    def nonzero_terms(self, tol: float = ZERO_TOL) -> list:
        return [g for g, c in enumerate(self.coeffs) if abs(c) > tol]

    def dump(self) -> list:
        """Text records ``(j,k,l,m) -> (re,im)`` for the nonzero coefficients."""
        out = []
        for g in self.nonzero_terms():
            c = self.coeffs[g]
            lab = ",".join(str(x) for x in self.rep_A.labels[g])
            out.append(f"({lab}) -> ({c.real:.12g},{c.imag:.12g})")
        return out


def _check_bipartite(u: np.ndarray, d_a: int, d_b: int, strict: bool) -> bool:
    u = np.asarray(u)
    if u.shape != (d_a * d_b, d_a * d_b):
        raise FormError(f"unitary shape {u.shape} does not match dims ({d_a},{d_b})")
    if not is_unitary(u):
        if strict:
            raise FormError("input matrix is not unitary")
        warnings.warn("expanding a non-unitary matrix; result flagged", stacklevel=3)
        return True
    return False


def expand_double_group(u: np.ndarray, d_a: int, d_b: int, strict: bool = True) -> DoubleGroupExpansion:
    """Expand over X^j Z^k (on A) times X^l Z^m (on B), labels (j,k,l,m)."""
    u = np.asarray(u, dtype=complex)
    flagged = _check_bipartite(u, d_a, d_b, strict)
    rep_a, rep_b = product_pair(pauli_rep(d_a), pauli_rep(d_b))
    coeffs = np.array([np.trace(tensor(rep_a.matrices[g], rep_b.matrices[g]).conj().T @ u) / (d_a * d_b)
                       for g in range(rep_a.order)])
    return DoubleGroupExpansion(rep_a, rep_b, coeffs, flagged_nonunitary=flagged)


def double_group_from_terms(rep_a: ProjectiveRep, rep_b: ProjectiveRep, coeffs) -> DoubleGroupExpansion:
    coeffs = np.asarray(coeffs, dtype=complex)
    if rep_a.order != rep_b.order or coeffs.size != rep_a.order:
        raise FormError("reps and coefficients must share the group order")
    exp = DoubleGroupExpansion(rep_a, rep_b, coeffs)
    if not is_unitary(exp.unitary()):
        raise FormError("expansion does not sum to a unitary")
    return exp


def controlled_abelian_expansion(form: ControlledForm, rep: ProjectiveRep) -> DoubleGroupExpansion:
    """Double-group form of sum_j P_j (x) R(g_j) for an abelian rep R.

    Uses the group dual(G) x G with V_A(k) = sum_j chi_k(g_j) P_j and
    coefficients conj(chi_k(h)) / |G|.
    """
    if rep.cyclic_orders is None:
        raise FormError("controlled-abelian expansion needs a cyclic-product rep")
    elems = [find_member(rep, v) for v in form.targets]
    for g, lam in elems:
        if abs(lam - 1) > 1e-9:
            raise FormError("targets must be rep members without extra phase")
    n = rep.order
    dual_mats = []
    for k in range(n):
        dual_mats.append(sum(rep.character(k, elems[j][0]) * form.projectors[j] for j in range(form.N)))
    labels, table = _cyclic_product(rep.cyclic_orders)
    dual = ProjectiveRep(table, np.ones((n, n), dtype=complex), tuple(dual_mats), tuple(labels), rep.cyclic_orders)
    dual.check()
    rep_a, rep_b = product_pair(dual, rep)
    coeffs = np.array([np.conj(rep.character(g % n, g // n)) / n for g in range(n * n)])
    return double_group_from_terms(rep_a, rep_b, coeffs)


def find_member(rep: ProjectiveRep, v: np.ndarray, tol: float = 1e-9):
    """Return (g, lam) with v = lam * M(g), or raise."""
    v = np.asarray(v, dtype=complex)
    for g, m in enumerate(rep.matrices):
        if m.shape != v.shape:
            continue
        lam = np.trace(m.conj().T @ v) / m.shape[0]
        if abs(abs(lam) - 1) < tol and np.max(np.abs(v - lam * m)) < tol:
            return g, complex(lam)
    raise FormError("matrix is not a member of the representation")


class CirculantError(FormError):
    pass


def build_circulant(exp: DoubleGroupExpansion) -> np.ndarray:
    """Group-circulant gate C[t, g] = c(t^-1 g) * w(t, t^-1 g).

    With this convention sum_g C[t, g] W(g) = W(t) U, which is what the
    double-group circuit needs after its ancilla measurement.
    """
    rep = exp.rep_A
    n = exp.order
    c = np.zeros((n, n), dtype=complex)
    for t in range(n):
        tinv = rep.inverse(t)
        for g in range(n):
            f = rep.mult_table[tinv, g]
            c[t, g] = exp.coeffs[f] * exp.factor(t, f)
    err = np.max(np.abs(c.conj().T @ c - np.eye(n)))
    if err > UNITARY_TOL:
        raise CirculantError(
            f"circulant gate not unitary (max deviation {err:.3g}); check that the group terms "
            "are orthogonal and the coefficients come from a unitary")
    return c


def check_fast_form(exp: DoubleGroupExpansion, trials: int = 20, seed: int = 0) -> bool:
    """Behavioural fast-form test: the one-round double-group circuit is exact on random inputs.

    The ``trials`` random inputs are stacked on a reference subsystem and
    run as one batch; a branch is exact on the batch iff its Kraus operator
    is proportional to U on every input in it.
    """
    from . import qudit
    from .circuits import fast_corrections, run_protocol5, verify_exactness
    from .qudit import QuditState

    try:
        fast_corrections(exp)
    except FormError:
        exp.fast_flag = False
        return False
    rng = np.random.default_rng(seed)
    d = exp.dims[0] * exp.dims[1]
    cols = rng.normal(size=(d, trials)) + 1j * rng.normal(size=(d, trials))
    batch = QuditState(exp.dims + (trials,), (cols / np.linalg.norm(cols, axis=0)).T.reshape(-1) / np.sqrt(trials))
    old = qudit.set_dimension_cap(max(qudit.dimension_cap(), batch.amplitudes.size * exp.order ** 2))
    try:
        run = run_protocol5(exp, batch, check=False)
    finally:
        qudit.set_dimension_cap(old)
    ok = verify_exactness(run, exp.unitary(), batch).passed
    exp.fast_flag = ok
    return ok


# ------------------------------------------------------------- single-group form

@dataclass
class SingleGroupExpansion:
    rep_A: ProjectiveRep
    operators: tuple

    @property
    def order(self) -> int:
        return self.rep_A.order

    @property
    def dims(self) -> tuple:
        return (self.rep_A.dim, self.operators[0].shape[0])

    def unitary(self) -> np.ndarray:
        return sum(tensor(v, w) for v, w in zip(self.rep_A.matrices, self.operators))


def partial_trace_a(m: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Trace out subsystem 0 (A) of an operator on A (x) B."""
    return np.einsum("iaja->ij", m.reshape(d_b, d_a, d_b, d_a))


def expand_single_group(u: np.ndarray, d_a: int, d_b: int) -> SingleGroupExpansion:
    u = np.asarray(u, dtype=complex)
    _check_bipartite(u, d_a, d_b, strict=True)
    rep = pauli_rep(d_a)
    ops = tuple(partial_trace_a(tensor(v.conj().T, np.eye(d_b)) @ u, d_a, d_b) / d_a for v in rep.matrices)
    return SingleGroupExpansion(rep, ops)


# ------------------------------------------------------------------ Clifford test

def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % p for p in range(2, int(d ** 0.5) + 1))


def pauli_string(d: int, xs: Sequence[int], zs: Sequence[int]) -> np.ndarray:
    return tensor(*[pauli(d, x, z) for x, z in zip(xs, zs)])


def pauli_components(op: np.ndarray, d: int, n: int) -> dict:
    """Coefficients Tr(P^dagger op)/D over all n-qudit Pauli strings, keyed by (xs, zs)."""
    dim = d ** n
    out = {}
    for xs in itertools.product(range(d), repeat=n):
        for zs in itertools.product(range(d), repeat=n):
            p = pauli_string(d, xs, zs)
            out[(xs, zs)] = np.trace(p.conj().T @ op) / dim
    return out


def single_pauli(op: np.ndarray, d: int, n: int, tol: float = 1e-9):
    """Return ((xs, zs), phase) if op is one Pauli string up to phase, else None."""
    comps = pauli_components(op, d, n)
    key = max(comps, key=lambda k: abs(comps[k]))
    if abs(abs(comps[key]) - 1) > tol:
        return None
    return key, comps[key]


def is_clifford(u: np.ndarray, m: int, n: int, d: int) -> bool:
    if not _is_prime(d):
        raise FormError(f"Clifford test needs prime d, got {d}")
    u = np.asarray(u, dtype=complex)
    q = m + n
    if u.shape != (d ** q, d ** q):
        raise FormError("unitary size does not match d^(m+n)")
    for i in range(q):
        for gen in ("x", "z"):
            xs = [0] * q
            zs = [0] * q
            (xs if gen == "x" else zs)[i] = 1
            g = pauli_string(d, xs, zs)
            if single_pauli(u @ g @ u.conj().T, d, q) is None:
                return False
    return True
