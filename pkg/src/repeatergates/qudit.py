"""Dense qudit state-vector toolkit.

Subsystems are ordered little-endian: subsystem 0 varies fastest in the
flat amplitude vector. ``tensor(a, b)`` places ``a`` on subsystem 0 and
``b`` on subsystem 1 under that convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PHASE_TOL = 1e-9
UNITARY_TOL = 1e-9

_dim_cap = 4096


class DimensionError(ValueError):
    pass


def set_dimension_cap(cap: int) -> int:
    """Set the largest allowed total Hilbert-space dimension; returns the old cap."""
    global _dim_cap
    old = _dim_cap
    _dim_cap = int(cap)
    return old


def dimension_cap() -> int:
    return _dim_cap


def _check_dim(n: int) -> None:
    if int(n) < 1:
        raise DimensionError(f"invalid dimension {n}")


def gen_pauli_x(n: int) -> np.ndarray:
    """Cyclic shift sending |k> to |k-1 mod n>."""
    _check_dim(n)
    return np.roll(np.eye(n, dtype=complex), -1, axis=0)


def gen_pauli_z(n: int) -> np.ndarray:
    """Clock operator diag(exp(2 pi i k / n))."""
    _check_dim(n)
    return np.diag(np.exp(2j * np.pi * np.arange(n) / n))


def fourier(n: int) -> np.ndarray:
    """Fourier matrix normalised so that F X F^dagger = Z.

    With the shift convention of :func:`gen_pauli_x` this requires the
    kernel exp(-2 pi i jk / n); for n = 2 it is the Hadamard matrix.
    """
    _check_dim(n)
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def pauli(d: int, j: int, k: int) -> np.ndarray:
    """X^j Z^k on a d-level system."""
    return np.linalg.matrix_power(gen_pauli_x(d), j % d) @ np.linalg.matrix_power(gen_pauli_z(d), k % d)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product in little-endian subsystem order (first factor = subsystem 0)."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(np.asarray(op, dtype=complex), out)
    return out


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def basis_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    idx, stride = 0, 1
    for x, d in zip(digits, dims):
        idx += int(x) * stride
        stride *= int(d)
    return idx


@dataclass(frozen=True)
class QuditState:
    dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        for d in dims:
            _check_dim(d)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        total = math.prod(dims)
        if amps.size != total:
            raise DimensionError(f"amplitude length {amps.size} does not match dims {dims}")
        if total > _dim_cap:
            raise DimensionError(f"total dimension {total} exceeds cap {_dim_cap}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuditState":
        return QuditState(self.dims, self.amplitudes / self.norm)

    def tensor_array(self) -> np.ndarray:
        # numpy axis k corresponds to subsystem n-1-k
        return self.amplitudes.reshape(self.dims[::-1]) if self.dims else self.amplitudes.reshape(())

    @classmethod
    def basis(cls, dims: Sequence[int], digits: Sequence[int]) -> "QuditState":
        amps = np.zeros(int(np.prod(dims)), dtype=complex)
        amps[basis_index(digits, dims)] = 1.0
        return cls(tuple(dims), amps)

    @classmethod
    def random(cls, dims: Sequence[int], rng: np.random.Generator) -> "QuditState":
        n = int(np.prod(dims))
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        return cls(tuple(dims), v / np.linalg.norm(v))


def product_state(*states: QuditState) -> QuditState:
    dims: tuple = ()
    amps = np.ones(1, dtype=complex)
    for s in states:
        amps = np.kron(s.amplitudes, amps)
        dims = dims + s.dims
    return QuditState(dims, amps)


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: int
    probability: float
    post_state: QuditState


def _targets(targets, n: int) -> tuple:
    if isinstance(targets, (int, np.integer)):
        targets = (int(targets),)
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise DimensionError(f"repeated target index in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise DimensionError(f"target {t} out of range for {n} subsystems")
    return targets


def _move_targets_front(tensor_arr: np.ndarray, dims: tuple, targets: tuple):
    """Reshape so that axis 0 is the joint target index (little-endian over targets)."""
    n = len(dims)
    axes = [n - 1 - t for t in targets[::-1]]
    rest = [a for a in range(n) if a not in axes]
    arr = np.transpose(tensor_arr, axes + rest)
    tdim = math.prod(dims[t] for t in targets)
    return arr.reshape(tdim, -1), axes, rest


def apply_on(state: QuditState, op: np.ndarray, targets) -> QuditState:
    """Apply ``op`` to the ordered ``targets`` (op is little-endian over them)."""
    n = len(state.dims)
    targets = _targets(targets, n)
    op = np.asarray(op, dtype=complex)
    tdim = math.prod(state.dims[t] for t in targets)
    if op.shape != (tdim, tdim):
        raise DimensionError(f"operator shape {op.shape} does not match target dimension {tdim}")
    mat, axes, rest = _move_targets_front(state.tensor_array(), state.dims, targets)
    out = op @ mat
    shape = [state.dims[n - 1 - a] for a in axes + rest]
    out = out.reshape(shape)
    order = axes + rest
    inverse = [order.index(k) for k in range(n)]
    out = np.transpose(out, inverse)
    return QuditState(state.dims, out.reshape(-1))


def measure(state: QuditState, targets, basis: np.ndarray | None = None,
            keep_zero: bool = False, rng: np.random.Generator | None = None) -> list:
    """Projective measurement of ``targets`` in the basis given by the columns of ``basis``.

    Returns every branch with nonzero probability (or all, with ``keep_zero``).
    Passing ``rng`` samples a single branch instead.
    """
    n = len(state.dims)
    targets = _targets(targets, n)
    tdim = math.prod(state.dims[t] for t in targets)
    mat, axes, rest = _move_targets_front(state.tensor_array(), state.dims, targets)
    if basis is not None:
        basis = np.asarray(basis, dtype=complex)
        if basis.shape != (tdim, tdim):
            raise DimensionError(f"basis shape {basis.shape} does not match target dimension {tdim}")
        if not is_unitary(basis):
            raise DimensionError("measurement basis is not unitary")
        mat = basis.conj().T @ mat
    rest_dims = tuple(d for i, d in enumerate(state.dims) if i not in targets)
    weight = float(np.sum(np.abs(mat) ** 2))
    probs = np.sum(np.abs(mat) ** 2, axis=1) / weight
    rest_shape = [state.dims[n - 1 - a] for a in rest]
    outcomes = range(tdim)
    if rng is not None:
        outcomes = [int(rng.choice(tdim, p=probs / probs.sum()))]
    branches = []
    for k in outcomes:
        p = float(probs[k])
        if p < 1e-15 and not keep_zero:
            continue
        vec = mat[k].reshape(rest_shape) if rest_shape else mat[k].reshape(())
        # rest axes are already in decreasing subsystem order, so flattening is little-endian
        vec = vec.reshape(-1)
        nv = np.linalg.norm(vec)
        if nv > 0:
            vec = vec / nv
        branches.append(MeasurementBranch(k, p, QuditState(rest_dims, vec)))
    return branches


def bell_basis(d: int) -> np.ndarray:
    """Columns (X^p Z^q tensor I)|Phi> indexed by p + d*q, |Phi> = sum_j |jj>/sqrt(d)."""
    phi = np.zeros(d * d, dtype=complex)
    for j in range(d):
        phi[basis_index((j, j), (d, d))] = 1 / np.sqrt(d)
    cols = []
    for q in range(d):
        for p in range(d):
            cols.append(tensor(pauli(d, p, q), np.eye(d)) @ phi)
    return np.array(cols).T


def max_entangled(d: int) -> QuditState:
    amps = np.zeros(d * d, dtype=complex)
    for j in range(d):
        amps[basis_index((j, j), (d, d))] = 1.0
    return QuditState((d, d), amps / np.sqrt(d))


def teleport(d: int, state: QuditState) -> list:
    """Teleport a single d-level system; returns corrected branches.

    Each branch's outcome encodes the Bell label p + d*q; the correction
    X^p Z^q has already been applied to the output.
    """
    if d < 2:
        raise DimensionError("teleportation needs d >= 2")
    if state.dims != (d,):
        raise DimensionError(f"input dims {state.dims} differ from ({d},)")
    joint = product_state(state, max_entangled(d))
    out = []
    for br in measure(joint, (0, 1), bell_basis(d)):
        p, q = br.outcome % d, br.outcome // d
        fixed = apply_on(br.post_state, pauli(d, p, q), (0,))
        out.append(MeasurementBranch(br.outcome, br.probability, fixed))
    return out


def overlap(a: QuditState, b: QuditState) -> float:
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    na, nb = np.linalg.norm(a.amplitudes), np.linalg.norm(b.amplitudes)
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) / (na * nb))


def equal_up_to_phase(a: QuditState, b: QuditState, tol: float = PHASE_TOL) -> bool:
    return overlap(a, b) >= 1 - tol


def reduced_density(state: QuditState, keep: Iterable[int]) -> np.ndarray:
    keep = _targets(tuple(keep), len(state.dims))
    mat, _, _ = _move_targets_front(state.tensor_array(), state.dims, keep)
    return mat @ mat.conj().T


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
