"""Measurement-branching LOCC circuits for nonlocal bipartite gates.

Every protocol starts from a two-subsystem input (A, B), adds ancillas,
and enumerates all measurement outcomes. Classically controlled
corrections are applied per branch. The run keeps a message log so the
round structure can be checked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import qudit
from .groups import (ControlledForm, DoubleGroupExpansion, FormError, ProjectiveRep,
                     SingleGroupExpansion, build_circulant, find_member, is_clifford,
                     pauli_string, single_pauli)
from .qudit import (QuditState, apply_on, bell_basis, fourier, max_entangled,
                    measure, overlap, pauli, product_state, tensor)


# ------------------------------------------------------------------ run records

@dataclass(frozen=True)
class Message:
    ident: int
    sender: str
    receiver: str
    label: str
    bits: float
    depends_on: tuple = ()


@dataclass
class ResourceLog:
    ebits: float = 0.0
    messages: list = field(default_factory=list)

    @property
    def cbits(self) -> float:
        return sum(m.bits for m in self.messages)

    def send(self, sender: str, receiver: str, label: str, bits: float, after=()) -> Message:
        msg = Message(len(self.messages), sender, receiver, label, bits, tuple(m.ident for m in after))
        self.messages.append(msg)
        return msg

    def rounds(self) -> int:
        """Length of the longest chain of causally dependent messages."""
        depth: dict = {}
        for m in self.messages:
            depth[m.ident] = 1 + max((depth[d] for d in m.depends_on), default=0)
        return max(depth.values(), default=0)

    def is_single_parallel_round(self) -> bool:
        dirs = {(m.sender, m.receiver) for m in self.messages}
        return self.rounds() == 1 and len(dirs) == 2 and all((r, s) in dirs for s, r in dirs)


@dataclass(frozen=True)
class BranchRecord:
    outcomes: tuple
    probability: float
    output: QuditState


@dataclass
class ProtocolRun:
    protocol_id: str
    branches: list
    resource_log: ResourceLog
    notes: dict = field(default_factory=dict)

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches))


@dataclass
class ExactnessReport:
    overlaps: list
    min_overlap: float
    probability_deviation: float
    worst_branch: tuple | None
    passed: bool

    def records(self, run: ProtocolRun) -> list:
        out = []
        for b, ov in zip(run.branches, self.overlaps):
            lab = ";".join(f"{k}={v}" for k, v in b.outcomes)
            out.append({"outcomes": lab, "probability": f"{b.probability:.12f}", "overlap": f"{ov:.12f}"})
        return out


def verify_exactness(run: ProtocolRun, u: np.ndarray, psi: QuditState, tol: float = qudit.PHASE_TOL) -> ExactnessReport:
    u = np.asarray(u)
    if u.shape[0] != psi.amplitudes.size:
        u = np.kron(np.eye(psi.amplitudes.size // u.shape[0]), u)  # reference subsystem rides along
    target = QuditState(psi.dims, u @ psi.amplitudes)
    ovs = [overlap(b.output, target) for b in run.branches]
    worst = int(np.argmin(ovs)) if ovs else None
    dev = abs(run.total_probability - 1)
    min_ov = min(ovs) if ovs else 0.0
    return ExactnessReport(ovs, min_ov, dev, run.branches[worst].outcomes if worst is not None else None,
                           bool(ovs) and min_ov >= 1 - tol and dev <= 1e-9)


# ---------------------------------------------------------------- branch engine

class _Branch:
    __slots__ = ("labels", "state", "prob", "outcomes")

    def __init__(self, labels, state, prob, outcomes):
        self.labels = labels
        self.state = state
        self.prob = prob
        self.outcomes = outcomes


class _Sim:
    """Set of live branches sharing one subsystem labelling scheme."""

    def __init__(self, psi: QuditState, labels=("A", "B")):
        labels = list(labels)
        if len(psi.dims) == len(labels) + 1:
            labels.append("R")
        self.branches = [_Branch(labels, psi, 1.0, {})]

    def add(self, labels, state: QuditState) -> None:
        for br in self.branches:
            br.state = product_state(br.state, state)
            br.labels = br.labels + list(labels)

    def apply(self, op, labels) -> None:
        """``op`` is a matrix or a callable taking the outcome dict (None means skip)."""
        for br in self.branches:
            m = op(br.outcomes) if callable(op) else op
            if m is None:
                continue
            br.state = apply_on(br.state, m, [br.labels.index(l) for l in labels])

    def measure(self, name: str, labels, basis=None) -> None:
        out = []
        for br in self.branches:
            idx = [br.labels.index(l) for l in labels]
            rest = [l for l in br.labels if l not in labels]
            for m in measure(br.state, idx, basis):
                oc = dict(br.outcomes)
                oc[name] = m.outcome
                out.append(_Branch(list(rest), m.post_state, br.prob * m.probability, oc))
        self.branches = out

    def rename(self, old: str, new: str) -> None:
        for br in self.branches:
            br.labels[br.labels.index(old)] = new

    def finish(self, protocol_id: str, log: ResourceLog, order=("A", "B"), notes=None) -> ProtocolRun:
        if self.branches and "R" in self.branches[0].labels:
            order = tuple(order) + ("R",)
        recs = []
        for br in self.branches:
            state = _reorder(br.state, br.labels, list(order))
            recs.append(BranchRecord(tuple(sorted(br.outcomes.items())), br.prob, state))
        return ProtocolRun(protocol_id, recs, log, notes or {})


def _reorder(state: QuditState, labels: list, order: list) -> QuditState:
    if labels == order:
        return state
    if sorted(labels) != sorted(order):
        raise RuntimeError(f"leftover subsystems {labels}, expected {order}")
    n = len(labels)
    arr = state.tensor_array()  # axis k <-> subsystem n-1-k
    src_axes = [n - 1 - labels.index(l) for l in reversed(order)]
    arr = np.transpose(arr, src_axes)
    return QuditState(tuple(state.dims[labels.index(l)] for l in order), arr.reshape(-1))


def _projector(n: int, k: int) -> np.ndarray:
    p = np.zeros((n, n), dtype=complex)
    p[k, k] = 1
    return p


def _check_input(psi: QuditState, dims) -> None:
    """Input must be (d_A, d_B), optionally followed by one reference subsystem."""
    if tuple(psi.dims[:2]) != tuple(dims) or len(psi.dims) > 3:
        raise qudit.DimensionError(f"input dims {psi.dims} differ from {tuple(dims)}")


def _log2(n: int) -> float:
    return math.log2(n)


# ---------------------------------------------------- full teleportation (P1)

def run_protocol1(u: np.ndarray, psi: QuditState, d_a: int, d_b: int) -> ProtocolRun:
    """Teleport A to B's side, apply U locally, teleport it back."""
    _check_input(psi, (d_a, d_b))
    if np.asarray(u).shape != (d_a * d_b, d_a * d_b):
        raise qudit.DimensionError("unitary does not match input dims")
    log = ResourceLog(ebits=2 * _log2(d_a))
    sim = _Sim(psi)
    sim.add(("a1", "b1"), max_entangled(d_a))
    sim.measure("bell_A", ("A", "a1"), bell_basis(d_a))
    m1 = log.send("A", "B", "bell_A", 2 * _log2(d_a))
    sim.apply(lambda o: pauli(d_a, o["bell_A"] % d_a, o["bell_A"] // d_a), ("b1",))
    sim.apply(u, ("b1", "B"))
    sim.add(("b2", "a2"), max_entangled(d_a))
    sim.measure("bell_B", ("b1", "b2"), bell_basis(d_a))
    log.send("B", "A", "bell_B", 2 * _log2(d_a), after=[m1])
    sim.apply(lambda o: pauli(d_a, o["bell_B"] % d_a, o["bell_B"] // d_a), ("a2",))
    sim.rename("a2", "A")
    return sim.finish("P1", log)


# ---------------------------------------------------- controlled unitary (P2)

def run_protocol2(form: ControlledForm, psi: QuditState) -> ProtocolRun:
    d_a, d_b = form.dims
    _check_input(psi, (d_a, d_b))
    n = form.N
    log = ResourceLog(ebits=_log2(n))
    sim = _Sim(psi)
    sim.add(("a", "b"), max_entangled(n))
    # |x>_A |k>_a -> |x>_A |k + j(x)>_a
    shift = np.zeros((d_a * n, d_a * n), dtype=complex)
    for x in range(d_a):
        for k in range(n):
            shift[x + d_a * ((k + form.block_of[x]) % n), x + d_a * k] = 1
    sim.apply(shift, ("A", "a"))
    sim.measure("m", ("a",))
    m1 = log.send("A", "B", "m", _log2(n))

    def controlled_v(o):
        m = o["m"]
        return sum(tensor(_projector(n, k), form.targets[(m - k) % n]) for k in range(n))

    sim.apply(controlled_v, ("b", "B"))
    sim.measure("s", ("b",), fourier(n))
    log.send("B", "A", "s", _log2(n), after=[m1])
    w = np.exp(2j * np.pi / n)

    def phase_fix(o):
        return sum(w ** (-o["s"] * (o["m"] - j)) * form.projectors[j] for j in range(n))

    sim.apply(phase_fix, ("A",))
    return sim.finish("P2", log)


# ----------------------------------------------------- double-group form (P3)

def _controlled_rep(n: int, mats, inverse: bool = False) -> np.ndarray:
    """sum_g |g><g| (x) M(g) with the control as the first (lower) subsystem."""
    return sum(tensor(_projector(n, g), m) for g, m in enumerate(mats))


def run_protocol3(exp: DoubleGroupExpansion, psi: QuditState, circulant: np.ndarray | None = None) -> ProtocolRun:
    d_a, d_b = exp.dims
    _check_input(psi, (d_a, d_b))
    n = exp.order
    c_hat = build_circulant(exp) if circulant is None else circulant
    fb = exp.rep_A.fourier_basis()
    log = ResourceLog(ebits=_log2(n))
    sim = _Sim(psi)
    sim.add(("a", "b"), max_entangled(n))
    sim.apply(_controlled_rep(n, exp.rep_A.matrices), ("a", "A"))
    sim.apply(_controlled_rep(n, exp.rep_B.matrices), ("b", "B"))
    sim.measure("s", ("a",), fb)
    m1 = log.send("A", "B", "s", _log2(n))
    sim.apply(lambda o: np.diag(fb[:, o["s"]] / np.abs(fb[:, o["s"]])), ("b",))
    sim.apply(c_hat, ("b",))
    sim.measure("t", ("b",))
    log.send("B", "A", "t", _log2(n), after=[m1])
    undo = [tensor(np.linalg.inv(exp.rep_A.matrices[t]), np.linalg.inv(exp.rep_B.matrices[t])) for t in range(n)]
    sim.apply(lambda o: undo[o["t"]], ("A", "B"))
    return sim.finish("P3", log)


# ----------------------------------------------------- single-group form (P4)

def single_group_gate(exp: SingleGroupExpansion) -> np.ndarray:
    """Operator-valued group-circulant M on (b, B): block (t, g) = kappa w(t, t^-1 g) W_B(t^-1 g)."""
    rep = exp.rep_A
    n, d_b = exp.order, exp.dims[1]
    hs = sum(np.sum(np.abs(w) ** 2) for w in exp.operators)
    kappa = 1 / math.sqrt(hs / d_b)
    m = np.zeros((n * d_b, n * d_b), dtype=complex)
    for t in range(n):
        tinv = rep.inverse(t)
        for g in range(n):
            f = rep.mult_table[tinv, g]
            m += kappa * rep.factor_phases[t, f] * tensor(np.outer(np.eye(n)[t], np.eye(n)[g]), exp.operators[f])
    err = np.max(np.abs(m.conj().T @ m - np.eye(n * d_b)))
    if err > qudit.UNITARY_TOL:
        raise FormError(f"single-group gate M is not unitary (max deviation {err:.3g})")
    return m


def run_protocol4(exp: SingleGroupExpansion, psi: QuditState) -> ProtocolRun:
    d_a, d_b = exp.dims
    _check_input(psi, (d_a, d_b))
    n = exp.order
    gate = single_group_gate(exp)
    fb = exp.rep_A.fourier_basis()
    log = ResourceLog(ebits=_log2(n))
    sim = _Sim(psi)
    sim.add(("a", "b"), max_entangled(n))
    sim.apply(_controlled_rep(n, exp.rep_A.matrices), ("a", "A"))
    sim.measure("s", ("a",), fb)
    m1 = log.send("A", "B", "s", _log2(n))
    sim.apply(lambda o: np.diag(fb[:, o["s"]] / np.abs(fb[:, o["s"]])), ("b",))
    sim.apply(gate, ("b", "B"))
    sim.measure("t", ("b",))
    log.send("B", "A", "t", _log2(n), after=[m1])
    sim.apply(lambda o: np.linalg.inv(exp.rep_A.matrices[o["t"]]), ("A",))
    return sim.finish("P4", log)


# ------------------------------------------------ fast double-group form (P5)

def _split_product(op: np.ndarray, d_a: int, d_b: int, tol: float = 1e-8):
    """Factor op = A (x) B (little-endian) with both factors unitary, or raise."""
    r = op.reshape(d_b, d_a, d_b, d_a).transpose(1, 3, 0, 2).reshape(d_a * d_a, d_b * d_b)
    uu, sv, vh = np.linalg.svd(r)
    if len(sv) > 1 and sv[1] > tol * max(sv[0], 1e-300):
        raise FormError("correction is not a product of local operators")
    a = (uu[:, 0] * math.sqrt(sv[0])).reshape(d_a, d_a)
    b = (vh[0] * math.sqrt(sv[0])).reshape(d_b, d_b)
    scale = math.sqrt(np.real(np.trace(a.conj().T @ a)) / d_a)
    a, b = a / scale, b * scale
    if not (qudit.is_unitary(a, 1e-7) and qudit.is_unitary(b, 1e-7)):
        raise FormError("local correction factors are not unitary")
    return a, b


def fast_corrections(exp: DoubleGroupExpansion) -> dict:
    """Local corrections (A_s, B_s) such that the one-round circuit leaves W(t) L_s U.

    With character measurements the residual after undoing W(t) depends on s
    only; for other labellings it is tabulated per (s, t). The table is
    cached on the expansion.
    """
    cached = getattr(exp, "_fast_table", None)
    if cached is not None:
        return cached
    n = exp.order
    d_a, d_b = exp.dims
    fb = exp.rep_A.fourier_basis()
    u = exp.unitary()
    terms = [exp.term(g) for g in range(n)]
    rep = exp.rep_A
    keys = [(s, None) for s in range(n)] if rep.cyclic_orders is not None else [(s, t) for s in range(n) for t in range(n)]
    table = {}
    for s, t in keys:
        tt = rep.identity if t is None else t
        res = sum(np.conj(fb[rep.mult_table[tt, f], s]) * exp.coeffs[f] * exp.factor(tt, f) * terms[f]
                  for f in range(n) if abs(exp.coeffs[f]) > 0)
        res = res @ u.conj().T
        norm = np.linalg.norm(res)
        if norm < 1e-12:
            table[(s, t)] = None
            continue
        res = res * math.sqrt(d_a * d_b) / norm
        table[(s, t)] = _split_product(res, d_a, d_b)
    exp._fast_table = table
    return table


def run_protocol5(exp: DoubleGroupExpansion, psi: QuditState, check: bool = True) -> ProtocolRun:
    """One simultaneous exchange: A measures a, B applies the circulant and measures b."""
    d_a, d_b = exp.dims
    _check_input(psi, (d_a, d_b))
    if check and exp.fast_flag is False:
        raise FormError("expansion is not of the fast form")
    table = fast_corrections(exp)
    n = exp.order
    c_hat = build_circulant(exp)
    fb = exp.rep_A.fourier_basis()
    per_s = exp.rep_A.cyclic_orders is not None
    log = ResourceLog(ebits=_log2(n))
    sim = _Sim(psi)
    sim.add(("a", "b"), max_entangled(n))
    sim.apply(_controlled_rep(n, exp.rep_A.matrices), ("a", "A"))
    sim.apply(_controlled_rep(n, exp.rep_B.matrices), ("b", "B"))
    sim.measure("s", ("a",), fb)
    sim.apply(c_hat, ("b",))
    sim.measure("t", ("b",))
    log.send("A", "B", "s", _log2(n))
    log.send("B", "A", "t", _log2(n))
    undo = [tensor(np.linalg.inv(exp.rep_A.matrices[t]), np.linalg.inv(exp.rep_B.matrices[t])) for t in range(n)]
    cache: dict = {}

    def fix(o):
        key = (o["s"], o["t"])
        if key not in cache:
            entry = table[(o["s"], None if per_s else o["t"])]
            local = np.eye(d_a * d_b) if entry is None else tensor(entry[0].conj().T, entry[1].conj().T)
            cache[key] = local @ undo[o["t"]]
        return cache[key]

    sim.apply(fix, ("A", "B"))
    return sim.finish("P5", log)


# ---------------------------------------------- controlled group element (P6)

def run_protocol6(form: ControlledForm, rep: ProjectiveRep, psi: QuditState) -> ProtocolRun:
    """Controlled-group gate with one simultaneous exchange."""
    d_a, d_b = form.dims
    _check_input(psi, (d_a, d_b))
    members = [find_member(rep, v) for v in form.targets]
    n = rep.order
    fb = rep.fourier_basis()
    log = ResourceLog(ebits=_log2(n))
    sim = _Sim(psi)
    sim.add(("a", "b"), max_entangled(n))
    # |x>_A |h>_a -> |x>_A |h g_x^-1>_a
    shift = np.zeros((d_a * n, d_a * n), dtype=complex)
    for x in range(d_a):
        ginv = rep.inverse(members[form.block_of[x]][0])
        for h in range(n):
            shift[x + d_a * rep.mult_table[h, ginv], x + d_a * h] = 1
    sim.apply(shift, ("A", "a"))
    sim.apply(_controlled_rep(n, rep.matrices), ("b", "B"))
    sim.measure("m", ("a",))
    sim.measure("s", ("b",), fb)
    log.send("A", "B", "m", _log2(n))
    log.send("B", "A", "s", _log2(n))
    sim.apply(lambda o: np.linalg.inv(rep.matrices[o["m"]]), ("B",))

    def phase_fix(o):
        m, s = o["m"], o["s"]
        out = np.zeros((d_a, d_a), dtype=complex)
        for j, (g, lam) in enumerate(members):
            got = np.conj(fb[rep.mult_table[m, g], s]) / rep.factor_phases[m, g]
            out += lam * abs(got) / got * form.projectors[j]
        return out

    sim.apply(phase_fix, ("A",))
    return sim.finish("P6", log)


# ------------------------------------------- Clifford gate teleportation (P7)

def _pauli_bell_basis(d: int, q: int):
    """Bell basis on two q-qudit registers; column k uses the k-th Pauli string."""
    import itertools

    keys = [(xs, zs) for zs in itertools.product(range(d), repeat=q) for xs in itertools.product(range(d), repeat=q)]
    big = d ** q
    phi = max_entangled(big).amplitudes
    cols = [tensor(pauli_string(d, xs, zs), np.eye(big)) @ phi for xs, zs in keys]
    return np.array(cols).T, keys


def _qudit_count(dim: int, d: int) -> int:
    q = round(math.log(dim, d))
    if d ** q != dim:
        raise qudit.DimensionError(f"dimension {dim} is not a power of {d}")
    return q


def run_protocol7_clifford(u: np.ndarray, psi: QuditState, d: int) -> ProtocolRun:
    """Gate teleportation through (1/d) sum |j>_a U(|j>|k>) |k>_b, one simultaneous exchange."""
    d_a, d_b = psi.dims[:2]
    qa, qb = _qudit_count(d_a, d), _qudit_count(d_b, d)
    u = np.asarray(u, dtype=complex)
    if not is_clifford(u, qa, qb, d):
        raise FormError("unitary is not Clifford; gate teleportation would need non-Pauli corrections")
    basis_a, keys_a = _pauli_bell_basis(d, qa)
    basis_b, keys_b = _pauli_bell_basis(d, qb)
    log = ResourceLog(ebits=_log2(d_a) + _log2(d_b))
    sim = _Sim(psi)
    sim.add(("a", "A2"), max_entangled(d_a))
    sim.add(("B2", "b"), max_entangled(d_b))
    sim.apply(u, ("A2", "B2"))
    sim.measure("bell_A", ("A", "a"), basis_a)
    sim.measure("bell_B", ("B", "b"), basis_b)
    log.send("A", "B", "bell_A", 2 * _log2(d_a))
    log.send("B", "A", "bell_B", 2 * _log2(d_b))
    cache: dict = {}

    def local_fix(o, side):
        key = (o["bell_A"], o["bell_B"])
        if key not in cache:
            xa, za = keys_a[key[0]]
            xb, zb = keys_b[key[1]]
            p = pauli_string(d, xa + xb, za + zb)
            (xs, zs), _ = single_pauli(u @ p @ u.conj().T, d, qa + qb)
            cache[key] = (pauli_string(d, xs[:qa], zs[:qa]), pauli_string(d, xs[qa:], zs[qa:]))
        return cache[key][side]

    sim.apply(lambda o: local_fix(o, 0), ("A2",))
    sim.apply(lambda o: local_fix(o, 1), ("B2",))
    sim.rename("A2", "A")
    sim.rename("B2", "B")
    return sim.finish("P7", log)


# ------------------------------------------------------- remote rotation (P8)

def rotation(theta: float) -> np.ndarray:
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


_CNOT = tensor(_projector(2, 0), np.eye(2)) + tensor(_projector(2, 1), qudit.gen_pauli_x(2))


def _remote_rotation(psi: QuditState, rotate: Callable[[_Sim], None], log: ResourceLog, protocol_id: str,
                     notes=None) -> ProtocolRun:
    if psi.dims[:1] != (2,) or len(psi.dims) > 2:
        raise qudit.DimensionError("remote rotation acts on one qubit")
    sim = _Sim(psi, labels=("B",))
    sim.add(("a", "b"), max_entangled(2))
    sim.apply(_CNOT, ("B", "b"))
    sim.measure("m", ("b",))
    m1 = log.send("B", "A", "m", 1)
    sim.apply(lambda o: qudit.gen_pauli_x(2) if o["m"] else None, ("a",))
    rotate(sim)
    sim.measure("s", ("a",), fourier(2))
    log.send("A", "B", "s", 1, after=[m1])
    sim.apply(lambda o: qudit.gen_pauli_z(2) if o["s"] else None, ("B",))
    return sim.finish(protocol_id, log, order=("B",), notes=notes)


def run_protocol8(theta: float, psi: QuditState) -> ProtocolRun:
    """Remote rotation diag(e^{i theta}, e^{-i theta}) on B's qubit with theta chosen at A."""
    log = ResourceLog(ebits=1)
    return _remote_rotation(psi, lambda sim: sim.apply(rotation(theta), ("a",)), log, "P8")


def ladder_resource(phi: float) -> QuditState:
    return QuditState((2, 2), np.array([np.exp(1j * phi), 0, 0, np.exp(-1j * phi)]) / np.sqrt(2))


def run_protocol8_ladder(q: int, n: int, psi: QuditState) -> ProtocolRun:
    """Remote rotation by q*pi/2^n where the rotation is injected through resource states.

    Step k teleports the rotating qubit through a state carrying the angle
    2^(k-1) theta. Outcome p = 0 applies V_k and ends the ladder; p = 1
    applies V_k^dagger and moves on; step n closes every branch because
    V_n and V_n^dagger agree up to a global phase.
    """
    if q % 2 == 0:
        raise ValueError("q must be odd")
    if n < 1:
        raise ValueError("ladder needs n >= 1")
    theta = q * math.pi / 2 ** n
    log = ResourceLog(ebits=1 + n)

    def ladder(sim: _Sim) -> None:
        done = []
        live = sim.branches
        for k in range(1, n + 1):
            step = _Sim.__new__(_Sim)
            step.branches = live
            step.add((f"r{k}", f"o{k}"), ladder_resource(2 ** (k - 1) * theta))
            step.measure(f"step{k}", ("a", f"r{k}"), bell_basis(2))
            step.apply(lambda o, k=k: pauli(2, o[f"step{k}"] % 2, o[f"step{k}"] // 2), (f"o{k}",))
            step.rename(f"o{k}", "a")
            live = []
            for br in step.branches:
                (done if br.outcomes[f"step{k}"] % 2 == 0 or k == n else live).append(br)
        sim.branches = done

    run = _remote_rotation(psi, ladder, log, "P8-ladder", notes={"theta": theta})
    steps = [max(int(k[4:]) for k, _ in b.outcomes if k.startswith("step")) for b in run.branches]
    run.notes["steps"] = steps
    run.notes["expected_steps"] = sum(s * b.probability for s, b in zip(steps, run.branches))
    return run


def ladder_expected_steps(n: int) -> float:
    return sum(k * 2.0 ** -k for k in range(1, n + 1)) + n * 2.0 ** -n


def ladder_step_distribution(run: ProtocolRun) -> dict:
    dist: dict = {}
    for s, b in zip(run.notes["steps"], run.branches):
        dist[s] = dist.get(s, 0.0) + b.probability
    return dict(sorted(dist.items()))
