"""Timing analysis of position verification against repeater-equipped attackers.

Lengths are in arbitrary units and times in length/c. Distances that are
exact rationals stay exact; the rest fall back to floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import theorem_bounds

ANGLE_THRESHOLD = 2 * math.asin(2 / 3)
ANGLE_GUARD = 1e-10
COLINEAR_TOL = 1e-12


class GeometryError(ValueError):
    pass


def as_number(value):
    """Exact Fraction for ints, Fractions and numeric strings; floats are read via their decimal repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise GeometryError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GeometryError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GeometryError(f"not a number: {value!r}") from exc
    raise GeometryError(f"not a number: {value!r}")


def _point(p) -> tuple:
    if len(p) != 2:
        raise GeometryError(f"points are 2-D, got {p!r}")
    return (as_number(p[0]), as_number(p[1]))


def _exact_sqrt(q: Fraction):
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return math.sqrt(q)


def dist2(p, q) -> Fraction:
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def dist(p, q):
    return _exact_sqrt(dist2(p, q))


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def angle_at(p, a, b) -> float:
    """Angle a-p-b in radians."""
    ax, ay = float(a[0] - p[0]), float(a[1] - p[1])
    bx, by = float(b[0] - p[0]), float(b[1] - p[1])
    return abs(math.atan2(ax * by - ay * bx, ax * bx + ay * by))


@dataclass(frozen=True)
class Geometry2D:
    verifiers: tuple
    prover: tuple
    attacker_nodes: tuple = ()
    delta: Fraction = Fraction(0)

    def __post_init__(self):
        vs = tuple(_point(v) for v in self.verifiers)
        if len(vs) not in (2, 3):
            raise GeometryError("two or three verifiers are supported")
        object.__setattr__(self, "verifiers", vs)
        object.__setattr__(self, "prover", _point(self.prover))
        object.__setattr__(self, "attacker_nodes", tuple(_point(a) for a in self.attacker_nodes))
        delta = as_number(self.delta)
        if delta < 0:
            raise GeometryError("exclusion radius must be nonnegative")
        object.__setattr__(self, "delta", delta)
        pts = list(vs) + [self.prover]
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i] == pts[j]:
                    raise GeometryError(f"coincident points {pts[i]}")
        for a in self.attacker_nodes:
            if dist2(a, self.prover) < delta * delta:
                raise GeometryError(f"attacker node {a} lies inside the exclusion disk")

    def scaled(self, k) -> "Geometry2D":
        k = as_number(k)
        sc = lambda p: (p[0] * k, p[1] * k)
        return Geometry2D(tuple(sc(v) for v in self.verifiers), sc(self.prover),
                          tuple(sc(a) for a in self.attacker_nodes), self.delta * k)

    def on_segment(self, p, i: int = 0, j: int = 1) -> bool:
        v1, v2 = self.verifiers[i], self.verifiers[j]
        span = math.sqrt(float(dist2(v1, v2)))
        if abs(float(_cross(v1, v2, p))) > COLINEAR_TOL * span * span:
            return False
        t = ((p[0] - v1[0]) * (v2[0] - v1[0]) + (p[1] - v1[1]) * (v2[1] - v1[1])) / dist2(v1, v2)
        return 0 <= t <= 1

    def line_parameter(self, p) -> Fraction:
        v1, v2 = self.verifiers[0], self.verifiers[1]
        return ((p[0] - v1[0]) * (v2[0] - v1[0]) + (p[1] - v1[1]) * (v2[1] - v1[1])) / dist2(v1, v2)


@dataclass(frozen=True)
class Verdict:
    secure: bool
    honest_time: object
    attacker_best_time: object
    margin: object
    basis: str
    status: str = ""
    notes: tuple = ()
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            object.__setattr__(self, "status", "secure" if self.secure else "insecure")


def honest_time(geometry: Geometry2D, pair: tuple = (0, 1)):
    """Time for the two active verifiers' signals to reach the prover and return: |V1 P| + |P V2|."""
    i, j = pair
    return dist(geometry.verifiers[i], geometry.prover) + dist(geometry.prover, geometry.verifiers[j])


# --------------------------------------------------------------------------
# two verifiers on a line

def _line_ends(geometry: Geometry2D) -> tuple:
    v1, v2 = geometry.verifiers[:2]
    if not geometry.attacker_nodes:
        return v1, v2, 0
    nodes = sorted(geometry.attacker_nodes, key=geometry.line_parameter)
    return nodes[0], nodes[-1], len(nodes) - 2


def two_verifier_verdict(geometry: Geometry2D, max_attacker_repeaters: int | None = 3,
                         exact_mode: bool = True, restricted_families: bool = True,
                         capacity_zero: bool | None = None) -> Verdict:
    """Compare the honest round trip with the attacker's fastest relay of the unitary.

    The attacker intercepts at end nodes A and B on the verifier line and
    needs |V1 A| + T |A B| + |B V2|. T comes from the proved lower bounds
    when at most three repeaters are allowed; with the exclusion radius
    and teleportation or group-type protocols there is also an additive
    gap of 2*delta. ``max_attacker_repeaters=None`` means unbounded.
    """
    if len(geometry.verifiers) != 2:
        raise GeometryError("two-verifier mode needs exactly two verifiers")
    for p in (geometry.prover,) + geometry.attacker_nodes:
        if not geometry.on_segment(p):
            raise GeometryError(f"point {p} is not on the verifier segment")
    v1, v2 = geometry.verifiers
    honest = honest_time(geometry)
    a, b, used = _line_ends(geometry)
    span = dist(a, b)
    base = dist(v1, a) + dist(b, v2)
    delta = geometry.delta
    details = {"L": span, "delta": delta, "repeaters_in_geometry": used}
    if not exact_mode:
        notes = ["approximate implementations can bring the attacker's overhead toward zero",
                 "the conjectured condition is zero quantum capacity over distance 2*delta between attacker nodes"]
        if capacity_zero is not None:
            notes.append(f"zero-capacity condition asserted: {bool(capacity_zero)}")
        status = "insecure-in-the-limit" if (delta == 0 and max_attacker_repeaters is None) else "not-decidable-by-this-tool"
        attacker = base + span
        return Verdict(False, honest, attacker, attacker - honest, "conjecture (approximate regime)",
                       status, tuple(notes), details)
    extras, bases = [], []
    if max_attacker_repeaters is not None:
        n = int(max_attacker_repeaters)
        if n < 0:
            raise GeometryError("repeater count must be nonnegative")
        if n <= 3:
            rec = theorem_bounds(n)
            extras.append((rec.lower - 1) * span)
            bases.append(f"time lower bound T({n}) >= {rec.lower} L/c")
    if restricted_families and delta > 0:
        extras.append(2 * delta)
        bases.append("gap >= 2*delta for teleportation and group-type protocols")
    if not extras:
        status = "insecure-in-the-limit" if delta == 0 else "unknown"
        attacker = base + span
        return Verdict(False, honest, attacker, attacker - honest, "no proved bound applies", status,
                       ("range of the gap is open outside the covered cases",), details)
    k = max(range(len(extras)), key=lambda i: extras[i])
    attacker = base + span + extras[k]
    margin = attacker - honest
    secure = margin > 0
    return Verdict(secure, honest, attacker, margin, bases[k], notes=tuple(bases), details=details)


# --------------------------------------------------------------------------
# three verifiers in the plane

def _strictly_inside(p, tri) -> bool:
    a, b, c = tri
    signs = [_cross(a, b, p), _cross(b, c, p), _cross(c, a, p)]
    return all(s > 0 for s in signs) or all(s < 0 for s in signs)


def _is_equilateral_centre(tri, p, tol: float = 1e-12) -> bool:
    sides = [float(dist2(tri[i], tri[(i + 1) % 3])) for i in range(3)]
    if max(sides) - min(sides) > tol * max(sides):
        return False
    cx = sum(v[0] for v in tri) / 3
    cy = sum(v[1] for v in tri) / 3
    return abs(float(cx - p[0])) + abs(float(cy - p[1])) <= tol * math.sqrt(max(sides))


def three_verifier_verdict(geometry: Geometry2D, time_factor=Fraction(3, 2)) -> Verdict:
    """Pairwise check for an attacker with one relay per active verifier pair.

    With end nodes at distances a, b from the prover along the two active
    verifier directions (angle g between them), the attacker's overhead is
    time_factor*|AB| - (a + b), smallest at a = b where |AB| = 2a sin(g/2).
    The overhead per unit of a + b is time_factor*sin(g/2) - 1, positive
    exactly when every angle exceeds 2*arcsin(1/time_factor).
    """
    tri = geometry.verifiers
    if len(tri) != 3:
        raise GeometryError("three-verifier mode needs exactly three verifiers")
    p = geometry.prover
    if not _strictly_inside(p, tri):
        raise GeometryError("the prover must lie strictly inside the triangle")
    factor = float(time_factor)
    threshold = 2 * math.asin(1 / factor)
    pairs = [(0, 1), (0, 2), (1, 2)]
    angles = {pair: angle_at(p, tri[pair[0]], tri[pair[1]]) for pair in pairs}
    crit = min(pairs, key=lambda pr: (angles[pr], pr))
    gamma = angles[crit]
    per_unit = factor * math.sin(gamma / 2) - 1
    secure = all(g > threshold + ANGLE_GUARD for g in angles.values())
    honest = honest_time(geometry, crit)
    reach = min(float(dist(tri[crit[0]], p)), float(dist(tri[crit[1]], p)))
    standoff = float(geometry.delta) if geometry.delta > 0 else reach
    attacker = float(honest) + 2 * standoff * per_unit
    if not secure:
        attacker = min(attacker, float(honest))
    details = {
        "angles_deg": {f"V{i + 1}PV{j + 1}": math.degrees(g) for (i, j), g in angles.items()},
        "threshold_deg": math.degrees(threshold),
        "critical_pair": (crit[0] + 1, crit[1] + 1),
        "overhead_per_unit_standoff": per_unit,
    }
    basis = f"all angles at the prover exceed 2*arcsin({Fraction(1) / Fraction(time_factor)})"
    notes = []
    if _is_equilateral_centre(tri, p):
        x_max = 2 / math.sqrt(3)
        details["equilateral_x_max"] = x_max
        details["equilateral_check"] = factor > x_max
        notes.append(f"equilateral centre: {factor} > 2/sqrt(3) = {x_max:.12f}")
    return Verdict(secure, honest, attacker, per_unit, basis, notes=tuple(notes), details=details)


def classical_permutation_time(n_repeaters: int = 1, L=1) -> Fraction:
    """Measure, send to a middle node, compute classically and send back.

    With one relay at the midpoint this takes L; without relays the two
    ends must exchange in both directions, taking 2L.
    """
    L = as_number(L)
    if n_repeaters < 0:
        raise GeometryError("repeater count must be nonnegative")
    return L if n_repeaters >= 1 else 2 * L


def permutation_contrast(n_repeaters: int = 1, L=1) -> tuple:
    """(classical-output time, lower bound when the permutation unitary is done first)."""
    L = as_number(L)
    unitary = theorem_bounds(min(n_repeaters, 3)).lower * L if n_repeaters <= 3 else None
    return classical_permutation_time(n_repeaters, L), unitary
