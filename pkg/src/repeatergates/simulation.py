"""Random and named admissible instances for each protocol, plus a batch runner."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qudit
from .circuits import (ProtocolRun, rotation, run_protocol1, run_protocol2, run_protocol3, run_protocol4,
                       run_protocol5, run_protocol6, run_protocol7_clifford, run_protocol8, run_protocol8_ladder,
                       verify_exactness)
from .groups import (controlled_abelian_expansion, controlled_form, controlled_form_from_unitary, cyclic_rep,
                     expand_double_group, expand_single_group, is_clifford, pauli_rep)
from .qudit import QuditState, fourier, gen_pauli_x, gen_pauli_z, haar_unitary, pauli, tensor

PROTOCOLS = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P8.1")
LADDER_CASES = ((1, 1), (1, 3), (3, 2))
# large enough for the double-group protocols at (3, 3)
SIM_DIMENSION_CAP = 1 << 17


class SimulationError(ValueError):
    pass


def admissible_dims(protocol: str) -> tuple:
    if protocol in ("P8", "P8.1"):
        return ((2,),)
    if protocol == "P7":
        return ((2, 2), (3, 3))
    if protocol in PROTOCOLS:
        return ((2, 2), (2, 3), (3, 3))
    raise SimulationError(f"unknown protocol {protocol!r}; choose from {', '.join(PROTOCOLS)}")


@dataclass
class Instance:
    protocol: str
    dims: tuple
    target: np.ndarray
    psi: QuditState
    runner: Callable[[], ProtocolRun]
    label: str = ""


@dataclass(frozen=True)
class SimulationResult:
    protocol: str
    dims: tuple
    trial: int
    label: str
    passed: bool
    min_overlap: float
    probability_deviation: float
    branches: int
    ebits: float
    cbits: float
    rounds: int
    single_round: bool


def _random_ranks(d: int, rng) -> list:
    parts = int(rng.integers(1, d + 1))
    cuts = sorted(rng.choice(np.arange(1, d), size=parts - 1, replace=False).tolist()) if parts > 1 else []
    edges = [0] + cuts + [d]
    return [b - a for a, b in zip(edges, edges[1:])]


def _phase_gate(d: int) -> np.ndarray:
    # Clifford phase gate: diag(i^{k^2}) for qubits, diag(omega^{k^2 / 2}) for odd d
    k = np.arange(d)
    if d == 2:
        return np.diag(1j ** (k * k))
    half = pow(2, -1, d)
    return np.diag(np.exp(2j * np.pi * (half * k * k % d) / d))


def random_clifford(d: int, rng, depth: int = 12) -> np.ndarray:
    one = [fourier(d), _phase_gate(d), gen_pauli_x(d), gen_pauli_z(d)]
    cz = np.diag(np.exp(2j * np.pi * np.array([(j * k) % d for k in range(d) for j in range(d)]) / d))
    u = np.eye(d * d, dtype=complex)
    for _ in range(depth):
        choice = int(rng.integers(0, 3))
        if choice == 2:
            g = cz
        else:
            gate = one[int(rng.integers(0, len(one)))]
            g = tensor(gate, np.eye(d)) if choice == 0 else tensor(np.eye(d), gate)
        u = g @ u
    return u


def random_instance(protocol: str, dims: tuple, rng: np.random.Generator) -> Instance:
    """Draw an admissible (unitary, input) pair for ``protocol`` at ``dims``."""
    if tuple(dims) not in admissible_dims(protocol):
        raise SimulationError(f"{protocol} is not defined at dims {tuple(dims)}")
    if protocol in ("P8", "P8.1"):
        psi = QuditState.random((2,), rng)
        if protocol == "P8":
            theta = float(rng.uniform(-math.pi, math.pi))
            return Instance(protocol, (2,), rotation(theta), psi, lambda: run_protocol8(theta, psi), f"theta={theta:.6f}")
        q, n = LADDER_CASES[int(rng.integers(0, len(LADDER_CASES)))]
        return ladder_instance(q, n, psi)
    d_a, d_b = dims
    psi = QuditState.random((d_a, d_b), rng)
    if protocol in ("P1", "P3", "P4"):
        u = haar_unitary(d_a * d_b, rng)
        if protocol == "P1":
            return Instance(protocol, dims, u, psi, lambda: run_protocol1(u, psi, d_a, d_b), "haar")
        if protocol == "P3":
            exp = expand_double_group(u, d_a, d_b)
            return Instance(protocol, dims, u, psi, lambda: run_protocol3(exp, psi), "haar")
        exp = expand_single_group(u, d_a, d_b)
        return Instance(protocol, dims, u, psi, lambda: run_protocol4(exp, psi), "haar")
    if protocol == "P2":
        ranks = _random_ranks(d_a, rng)
        form = controlled_form(ranks, [haar_unitary(d_b, rng) for _ in ranks])
        return Instance(protocol, dims, form.unitary(), psi, lambda: run_protocol2(form, psi), f"ranks={ranks}")
    if protocol == "P5":
        if rng.random() < 0.5:
            u = tensor(haar_unitary(d_a, rng), haar_unitary(d_b, rng))
            exp = expand_double_group(u, d_a, d_b)
            label = "product"
        else:
            ranks = _random_ranks(d_a, rng)
            shift = gen_pauli_x(d_b)
            powers = [int(rng.integers(0, d_b)) for _ in ranks]
            form = controlled_form(ranks, [np.linalg.matrix_power(shift, p) for p in powers])
            exp = controlled_abelian_expansion(form, cyclic_rep(shift, d_b))
            u = form.unitary()
            label = f"controlled-shift powers={powers}"
        return Instance(protocol, dims, u, psi, lambda: run_protocol5(exp, psi), label)
    if protocol == "P6":
        rep = pauli_rep(d_b)
        ranks = _random_ranks(d_a, rng)
        targets = [np.exp(2j * np.pi * rng.random()) * pauli(d_b, int(rng.integers(0, d_b)), int(rng.integers(0, d_b)))
                   for _ in ranks]
        form = controlled_form(ranks, targets)
        return Instance(protocol, dims, form.unitary(), psi, lambda: run_protocol6(form, rep, psi), f"ranks={ranks}")
    if protocol == "P7":
        d = d_a
        u = random_clifford(d, rng)
        if not is_clifford(u, 1, 1, d):
            raise SimulationError("generated gate is not Clifford")
        return Instance(protocol, dims, u, psi, lambda: run_protocol7_clifford(u, psi, d), "random clifford")
    raise SimulationError(f"unknown protocol {protocol!r}")


def ladder_instance(q: int, n: int, psi: QuditState) -> Instance:
    target = rotation(q * math.pi / 2 ** n)
    return Instance("P8.1", (2,), target, psi, lambda: run_protocol8_ladder(q, n, psi), f"q={q},N={n}")


def named_instance(protocol: str, fixture: str, rng: np.random.Generator) -> Instance:
    """Fixtures: "random" plus "cnot" for the protocols where a CNOT is admissible."""
    if fixture == "random":
        return random_instance(protocol, admissible_dims(protocol)[0], rng)
    if fixture != "cnot":
        raise SimulationError(f"unknown fixture {fixture!r}")
    if protocol in ("P8", "P8.1"):
        raise SimulationError(f"{protocol} acts on one qubit; use the random fixture")
    x = gen_pauli_x(2)
    form = controlled_form([1, 1], [np.eye(2), x])
    u = form.unitary()
    psi = QuditState.random((2, 2), rng)
    runners = {
        "P1": lambda: run_protocol1(u, psi, 2, 2),
        "P2": lambda: run_protocol2(form, psi),
        "P3": lambda: run_protocol3(expand_double_group(u, 2, 2), psi),
        "P4": lambda: run_protocol4(expand_single_group(u, 2, 2), psi),
        "P5": lambda: run_protocol5(controlled_abelian_expansion(form, cyclic_rep(x, 2)), psi),
        "P6": lambda: run_protocol6(form, cyclic_rep(x, 2), psi),
        "P7": lambda: run_protocol7_clifford(u, psi, 2),
    }
    return Instance(protocol, (2, 2), u, psi, runners[protocol], "cnot")


def instance_from_unitary(protocol: str, u: np.ndarray, dims: tuple, psi: QuditState) -> Instance:
    """Wrap a user-supplied bipartite unitary; raises if it lacks the form the protocol needs."""
    u = np.asarray(u, dtype=complex)
    if len(dims) != 2:
        raise SimulationError("a bipartite unitary needs dims [d_a, d_b]")
    d_a, d_b = (int(d) for d in dims)
    if u.shape != (d_a * d_b, d_a * d_b):
        raise SimulationError(f"unitary shape {u.shape} does not match dims {tuple(dims)}")
    if tuple(psi.dims) != (d_a, d_b):
        raise SimulationError(f"input dims {tuple(psi.dims)} do not match {tuple(dims)}")
    if protocol == "P1":
        runner = lambda: run_protocol1(u, psi, d_a, d_b)
    elif protocol == "P2":
        form = controlled_form_from_unitary(u, d_a, d_b)
        runner = lambda: run_protocol2(form, psi)
    elif protocol in ("P3", "P5"):
        exp = expand_double_group(u, d_a, d_b)
        runner = (lambda: run_protocol3(exp, psi)) if protocol == "P3" else (lambda: run_protocol5(exp, psi))
    elif protocol == "P4":
        exp = expand_single_group(u, d_a, d_b)
        runner = lambda: run_protocol4(exp, psi)
    elif protocol == "P6":
        form = controlled_form_from_unitary(u, d_a, d_b)
        runner = lambda: run_protocol6(form, pauli_rep(d_b), psi)
    elif protocol == "P7":
        if d_a != d_b:
            raise SimulationError("the Clifford protocol needs equal prime dimensions")
        runner = lambda: run_protocol7_clifford(u, psi, d_a)
    else:
        raise SimulationError(f"{protocol} does not take a bipartite unitary file")
    return Instance(protocol, (d_a, d_b), u, psi, runner, "file")


def execute(inst: Instance, trial: int = 0) -> tuple:
    old = qudit.set_dimension_cap(max(qudit.dimension_cap(), SIM_DIMENSION_CAP))
    try:
        run = inst.runner()
    finally:
        qudit.set_dimension_cap(old)
    rep = verify_exactness(run, inst.target, inst.psi)
    log = run.resource_log
    res = SimulationResult(inst.protocol, tuple(inst.dims), trial, inst.label, bool(rep.passed), float(rep.min_overlap),
                           float(rep.probability_deviation), len(run.branches), float(log.ebits), float(log.cbits),
                           log.rounds(), log.is_single_parallel_round())
    return res, run


def simulate(protocol: str, fixture: str = "random", dims: tuple | None = None, trials: int = 1,
             seed: int = 0) -> list:
    """Run ``trials`` seeded instances; every dimension pair is used when ``dims`` is None."""
    rng = np.random.default_rng(seed)
    out = []
    dim_list = [tuple(dims)] if dims else list(admissible_dims(protocol))
    if fixture != "random":
        dim_list = dim_list[:1]
    for d in dim_list:
        for t in range(trials):
            inst = random_instance(protocol, d, rng) if fixture == "random" else named_instance(protocol, fixture, rng)
            out.append(execute(inst, t)[0])
    return out
