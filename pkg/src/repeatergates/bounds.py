"""Closed-form time bounds, relay constructions and repeater placement search.

All times are exact rationals in units of L/c.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from ._kernels_py import _objective as objective_values
from .maxplus import MaxAffine
from .timeline import (LineTopology, as_fraction, get_variant, relay_hub_schedule, symbolic_completion,
                       transmission_schedule)


class BoundsError(ValueError):
    pass


@dataclass(frozen=True)
class BoundRecord:
    quantity: str  # "T_s" for one-way sending, "T" for a bipartite unitary
    K: int
    lower: Fraction
    upper: Fraction
    achieving_variant: str | None
    status: str = "proved"

    def __post_init__(self):
        if self.lower > self.upper:
            raise BoundsError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


# --------------------------------------------------------------------------
# one-way sending

def ts_bound(n: int, conjectured: bool = False) -> Fraction:
    """Shortest unambiguous one-way sending time with n relays: 2^(n+1) / (2^(n+1) - 1).

    Proved for n <= 3; larger n needs ``conjectured=True``.
    """
    n = int(n)
    if n < 0:
        raise BoundsError("relay count must be nonnegative")
    if n > 3 and not conjectured:
        raise BoundsError("only proved for n <= 3; pass conjectured=True for larger n")
    top = 2 ** (n + 1)
    return Fraction(top, top - 1)


def ts_status(n: int) -> str:
    return "proved" if n <= 3 else "CONJECTURED"


def ts_scheme(n: int, conjectured: bool = False) -> tuple:
    """Relay positions with doubling hop lengths and their engine-computed sending time."""
    n = int(n)
    if n > 3 and not conjectured:
        raise BoundsError("only proved for n <= 3; pass conjectured=True for larger n")
    denom = 2 ** (n + 1) - 1
    positions = tuple(Fraction(2 ** k - 1, denom) for k in range(1, n + 1))
    time = transmission_schedule(LineTopology.from_repeaters(positions)).completion
    return positions, time


def sending_record(n: int, conjectured: bool = False) -> BoundRecord:
    value = ts_bound(n, conjectured)
    return BoundRecord("T_s", n, value, value, "relay teleportation", ts_status(n))


# --------------------------------------------------------------------------
# bipartite unitaries

_UNITARY_BOUNDS = {
    0: (Fraction(2), Fraction(3), "P1"),
    1: (Fraction(3, 2), Fraction(3, 2), "P1.1(1/2)"),
    2: (Fraction(5, 4), Fraction(7, 5), "P1.2(1/5,3/5)"),
    3: (Fraction(7, 6), Fraction(7, 6), "P1.3(1/6,1/2,5/6)"),
}


def theorem_bounds(K: int) -> BoundRecord:
    """Lower and upper bounds on the exact implementation time of an arbitrary unitary."""
    if int(K) not in _UNITARY_BOUNDS:
        raise BoundsError("bounds are known for 0 to 3 repeaters only")
    lower, upper, variant = _UNITARY_BOUNDS[int(K)]
    return BoundRecord("T", int(K), lower, upper, variant)


# --------------------------------------------------------------------------
# many relays

def many_nodes_positions(k: int, parity: str) -> tuple:
    k = int(k)
    if k < 0:
        raise BoundsError("k must be nonnegative")
    if parity == "odd":
        x = Fraction(1, 2 * (2 ** (k + 1) - 1))
        left = [(2 ** j - 1) * x for j in range(1, k + 1)]
        return tuple(left + [Fraction(1, 2)] + [1 - p for p in reversed(left)])
    if parity == "even":
        if k == 0:
            return ()
        x = Fraction(1, 2 ** (k + 2) - 3)
        left = [(2 ** j - 1) * x for j in range(1, k + 2)]
        right = [1 - 2 * x * (2 ** j - 1) for j in range(1, k)]
        return tuple(left + sorted(right))
    raise BoundsError("parity must be 'odd' or 'even'")


def many_nodes_formula(k: int, parity: str) -> Fraction:
    k = int(k)
    if parity == "odd":
        return 1 + Fraction(1, 2 * (2 ** (k + 1) - 1))
    if parity == "even":
        return Fraction(2 ** (k + 2) - 1, 2 ** (k + 2) - 3)
    raise BoundsError("parity must be 'odd' or 'even'")


def many_nodes(k: int, parity: str) -> tuple:
    """2k+1 (odd) or 2k (even) relays; returns (positions, time) with the time taken from the engine."""
    positions = many_nodes_positions(k, parity)
    topo = LineTopology.from_repeaters(positions)
    hub = k + 1 if positions else 1
    time = relay_hub_schedule(topo, hub).completion
    expected = many_nodes_formula(k, parity)
    if time != expected:
        raise BoundsError(f"engine time {time} disagrees with closed form {expected}")
    return positions, time


# --------------------------------------------------------------------------
# placement optimisation

SUPPORTED_FAMILIES = ("P1.1", "P2.1", "P3.1", "P4.1", "P5.1", "P8.1", "P1.2", "P1.3", "P2.2", "P3.2", "P3.3", "P4.2", "P5.2", "P5.3", "P6.2", "P8.2", "P8.3")


@dataclass(frozen=True)
class Placement:
    family: str
    positions: tuple
    time: Fraction
    method: str
    attained: bool = True


def _domain_vertices(n: int) -> list:
    return [tuple([Fraction(0)] * (n - m) + [Fraction(1)] * m) for m in range(n + 1)]


def _eval_piece(p, xs) -> Fraction:
    return p[0] + sum(c * x for c, x in zip(p[1:], xs))


def prune_pieces(expr: MaxAffine) -> list:
    """Drop pieces that never exceed another piece on the ordered unit simplex."""
    pieces = expr.sorted_pieces()
    verts = _domain_vertices(expr.nvars)
    vals = [[_eval_piece(p, v) for v in verts] for p in pieces]
    keep = []
    for i, p in enumerate(pieces):
        dominated = any(
            j != i and all(b >= a for a, b in zip(vals[i], vals[j])) and (vals[i] != vals[j] or j < i)
            for j in range(len(pieces)))
        if not dominated:
            keep.append(p)
    return keep


def _solve(rows: list, rhs: list):
    """Exact Gaussian elimination; None when singular."""
    m = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def _exact_min(pieces: list, n: int) -> tuple:
    """Minimise max of affine pieces over 0 <= x1 <= ... <= xn <= 1.

    Enumerates vertices of the epigraph polyhedron in (x, t); returns
    (value, lexicographically smallest minimiser).
    """
    # constraints as (coeffs over x, coeff on t, rhs) meaning a.x + b t <= c
    cons = []
    for p in pieces:
        cons.append((tuple(p[1:]), Fraction(-1), -p[0]))
    unit = [[Fraction(int(i == k)) for i in range(n)] for k in range(n)]
    cons.append((tuple(-v for v in unit[0]), Fraction(0), Fraction(0)))
    for k in range(n - 1):
        cons.append((tuple(unit[k][i] - unit[k + 1][i] for i in range(n)), Fraction(0), Fraction(0)))
    cons.append((tuple(unit[n - 1]), Fraction(0), Fraction(1)))
    best = None
    for combo in itertools.combinations(range(len(cons)), n + 1):
        rows = [list(cons[c][0]) + [cons[c][1]] for c in combo]
        sol = _solve(rows, [cons[c][2] for c in combo])
        if sol is None:
            continue
        xs, t = sol[:n], sol[n]
        if all(sum(a * x for a, x in zip(c[0], xs)) + c[1] * t <= c[2] for c in cons):
            key = (t, tuple(xs))
            if best is None or key < best:
                best = key
    if best is None:
        raise BoundsError("no feasible vertex found")
    return best


def objective(family: str):
    variant = get_variant(family)
    if variant.name not in SUPPORTED_FAMILIES:
        raise BoundsError(f"unsupported family {family!r}; choose from {', '.join(SUPPORTED_FAMILIES)}")
    return variant, symbolic_completion(variant)


def _interior(xs) -> bool:
    return 0 < xs[0] and all(a < b for a, b in zip(xs, xs[1:])) and xs[-1] < 1


def optimize_exact(family: str) -> Placement:
    variant, exprs = objective(family)
    n = variant.n
    best = None
    for expr in exprs:
        value, xs = _exact_min(prune_pieces(expr), n)
        if best is None or (value, xs) < best:
            best = (value, xs)
    value, xs = best
    return Placement(variant.name, xs, value, "exact", attained=_interior(xs))


def _piece_matrix(exprs: list) -> tuple:
    rows, ids = [], []
    for e, expr in enumerate(exprs):
        for p in prune_pieces(expr):
            rows.append([float(c) for c in p])
            ids.append(e)
    return np.ascontiguousarray(rows, dtype=float), np.ascontiguousarray(ids, dtype=np.int64)


def exact_value(exprs: list, xs: Sequence) -> Fraction:
    return min(expr(xs) for expr in exprs)


def optimize_grid(family: str, q: int | None = None, refine: int = 10) -> Placement:
    """Sweep strictly increasing grid points k/q, then refine locally at resolution 1/(q*refine)."""
    variant, exprs = objective(family)
    n = variant.n
    if q is None:
        q = 1000 if n <= 2 else 120
    coeffs, ids = _piece_matrix(exprs)
    _, idx = kernels.grid_minimize(coeffs, ids, len(exprs), int(q), n)
    if idx is None or idx[0] < 0:
        raise BoundsError("grid too coarse for this many repeaters")
    best_xs = tuple(Fraction(i, q) for i in idx)
    best_val = exact_value(exprs, best_xs)
    if refine and refine > 1:
        fine = q * refine
        centre = [i * refine for i in idx]
        span = np.arange(-refine, refine + 1)
        cand = np.array(np.meshgrid(*[span] * n, indexing="ij")).reshape(n, -1).T + np.array(centre)
        ok = (cand[:, 0] > 0) & (cand[:, -1] < fine) & np.all(np.diff(cand, axis=1) > 0, axis=1)
        cand = cand[ok]
        if cand.shape[0]:
            # screen in floats, confirm the near-best candidates exactly
            vals = objective_values(coeffs, ids, len(exprs), cand / fine)
            for row in cand[vals <= vals.min() + 1e-9]:
                xs = tuple(Fraction(int(c), fine) for c in row)
                val = exact_value(exprs, xs)
                if (val, xs) < (best_val, best_xs):
                    best_val, best_xs = val, xs
    return Placement(variant.name, best_xs, best_val, f"grid(q={q})")


def optimize_placement(family: str, n: int | None = None, method: str = "exact", q: int | None = None) -> Placement:
    variant = get_variant(family)
    if n is not None and int(n) != variant.n:
        raise BoundsError(f"{variant.name} has {variant.n} repeaters, not {n}")
    if method == "exact":
        return optimize_exact(variant.name)
    if method == "grid":
        return optimize_grid(variant.name, q)
    raise BoundsError(f"unknown method {method!r}")


def grid_minimum(family: str, q: int) -> float:
    """Smallest objective value over the full grid (no refinement), as a float."""
    variant, exprs = objective(family)
    coeffs, ids = _piece_matrix(exprs)
    val, _ = kernels.grid_minimize(coeffs, ids, len(exprs), int(q), variant.n)
    return float(val)


# --------------------------------------------------------------------------
# timing gap versus straight-line signalling

@dataclass(frozen=True)
class DeltaTReport:
    mode: str
    bound: Fraction
    witness_nodes: int | None = None
    witness_time: Fraction | None = None
    note: str = ""


def excess_time(nodes: int) -> Fraction:
    """Best time above L/c reachable with ``nodes`` relays using the doubling constructions."""
    if nodes <= 0:
        return Fraction(2)
    k, odd = divmod(nodes, 2)
    if odd:
        return many_nodes_formula(k, "odd") - 1
    return many_nodes_formula(k, "even") - 1


def nodes_for_excess(epsilon) -> int:
    eps = as_fraction(epsilon)
    if eps <= 0:
        raise BoundsError("epsilon must be positive")
    nodes = 1
    while excess_time(nodes) >= eps:
        nodes += 1
    return nodes


def delta_t_bound(L, delta, exact_mode: bool = True, max_nodes: int | None = None,
                  epsilon=None) -> DeltaTReport:
    """Minimum extra delay (units of L/c) for a verifier at distance delta off the line.

    In exact mode with full-teleportation or group-type protocols the gap
    is at least 2*delta/L. Otherwise the gap can be pushed toward zero by
    adding relays; pass ``epsilon`` to get the relay count that brings the
    overhead below it.
    """
    L, delta = as_fraction(L), as_fraction(delta)
    if L <= 0 or delta < 0:
        raise BoundsError("need L > 0 and delta >= 0")
    if exact_mode:
        return DeltaTReport("exact", 2 * delta / L, note="holds for protocols of the teleportation and group types")
    if L <= 6 * delta:
        raise BoundsError("the vanishing-gap regime needs L > 6*delta")
    if epsilon is None:
        return DeltaTReport("vanishing", Fraction(0), note="gap tends to zero as relays are added")
    nodes = nodes_for_excess(epsilon)
    if max_nodes is not None and nodes > max_nodes:
        best = excess_time(max_nodes)
        return DeltaTReport("vanishing", Fraction(0), max_nodes, best,
                            note=f"epsilon not reachable with {max_nodes} relays; best overhead {best}")
    return DeltaTReport("vanishing", Fraction(0), nodes, excess_time(nodes),
                        note="gap tends to zero as relays are added")


def bounds_table(max_k: int = 3, conjectured_through: int = 5) -> list:
    """Rows for the bounds report: sending times, unitary bounds and many-relay times."""
    rows = []
    for n in range(conjectured_through + 1):
        rows.append(("T_s", n, ts_bound(n, conjectured=True), ts_bound(n, conjectured=True), ts_status(n)))
    for k in range(max_k + 1):
        rec = theorem_bounds(k)
        rows.append(("T", k, rec.lower, rec.upper, rec.status))
    for k in range(max_k + 1):
        for parity in ("odd", "even"):
            pos, t = many_nodes(k, parity)
            rows.append((f"relays({parity},k={k})", len(pos), None, t, "construction"))
    return rows
