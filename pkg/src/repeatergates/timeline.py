"""Event-graph scheduler for protocols on a line of repeater nodes.

Times are exact rationals in units of L/c, where L is the end-to-end
distance. A photon or classical message between two nodes takes exactly
their distance; local operations take no time. Entanglement between two
neighbouring nodes costs a photon leg followed by a confirmation leg in
the opposite direction, and builders merge the confirmation into a
protocol message travelling the same way whenever the two are concurrent.

Every builder works on a plain sequence of node positions, so the same
code runs on Fractions (numeric schedules) and on
:class:`~repeatergates.maxplus.MaxAffine` positions (symbolic completion
times used by the placement optimizer).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .maxplus import MaxAffine, tmax

EVENT_KINDS = ("photon_transit", "classical_message", "entanglement_confirm", "local_op", "wait")
TRANSIT_KINDS = ("photon_transit", "classical_message", "entanglement_confirm")


class TimelineError(ValueError):
    pass


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and strings such as "3/5"; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TimelineError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise TimelineError(f"not a rational: {value!r}") from exc
    raise TimelineError(f"positions must be exact rationals, got {type(value).__name__}")


@dataclass(frozen=True)
class LineTopology:
    """Node positions along the line, A first and B last.

    ``offsets`` delays the moment each node learns that the protocol has
    started (all zero by default). ``allow_span`` relaxes the requirement
    that B sits at 1, which is handy for scaling studies.
    """

    positions: tuple
    offsets: tuple = ()
    allow_span: bool = False

    def __post_init__(self):
        pos = tuple(as_fraction(p) for p in self.positions)
        if len(pos) < 2:
            raise TimelineError("a line needs at least the two end nodes")
        if pos[0] != 0:
            raise TimelineError("node A must sit at position 0")
        if not self.allow_span and pos[-1] != 1:
            raise TimelineError("node B must sit at position 1")
        for left, right in zip(pos, pos[1:]):
            if not left < right:
                raise TimelineError(f"positions must be strictly increasing: {pos}")
        offsets = tuple(as_fraction(o) for o in self.offsets) or (Fraction(0),) * len(pos)
        if len(offsets) != len(pos):
            raise TimelineError("one offset per node is required")
        if any(o < 0 for o in offsets):
            raise TimelineError("offsets must be nonnegative")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_repeaters(cls, repeaters: Sequence = ()) -> "LineTopology":
        return cls((0, *repeaters, 1))

    @property
    def n(self) -> int:
        return len(self.positions) - 2

    @property
    def repeaters(self) -> tuple:
        return self.positions[1:-1]

    def name(self, i: int) -> str:
        return node_name(i, self.n)

    def distance(self, i: int, j: int) -> Fraction:
        return abs(self.positions[j] - self.positions[i])


def node_name(i: int, n: int) -> str:
    if i == 0:
        return "A"
    if i == n + 1:
        return "B"
    return f"C{i}"


@dataclass(frozen=True)
class Event:
    id: int
    kind: str
    src: int
    dst: int
    release: object
    duration: object
    depends_on: tuple = ()
    label: str = ""


@dataclass(frozen=True)
class Schedule:
    events: tuple
    starts: tuple
    ends: tuple
    completion: object
    node_count: int = 2

    def event(self, eid: int) -> Event:
        return self.events[eid]


@dataclass(frozen=True)
class CostReport:
    total_time: Fraction
    ebits: float
    cbits: float
    entanglement_links: tuple
    photon_legs: int = 0
    redundancy: int = 1


# --------------------------------------------------------------------------
# engine

def run_schedule(events: Sequence[Event], node_count: int = 2) -> Schedule:
    """Resolve start times: start = max(release, ends of dependencies)."""
    starts, ends = [], []
    for k, ev in enumerate(events):
        if ev.id != k:
            raise TimelineError("event ids must be consecutive from 0")
        if ev.kind not in EVENT_KINDS:
            raise TimelineError(f"unknown event kind {ev.kind!r}")
        for d in ev.depends_on:
            if not 0 <= d < k:
                raise TimelineError(f"event {k} depends on {d}, which is not an earlier event")
        start = tmax([ev.release] + [ends[d] for d in ev.depends_on])
        starts.append(start)
        ends.append(start + ev.duration)
    completion = tmax(ends) if ends else Fraction(0)
    return Schedule(tuple(events), tuple(starts), tuple(ends), completion, node_count)


class _Builder:
    """Accumulates events and entanglement usage for one protocol run."""

    def __init__(self, positions: Sequence, offsets: Sequence | None = None):
        self.pos = list(positions)
        self.n = len(self.pos) - 2
        self.offsets = list(offsets) if offsets else [Fraction(0)] * len(self.pos)
        self.events: list[Event] = []
        self.links: list = []  # ((i, j), system kind)

    @property
    def last(self) -> int:
        return self.n + 1

    def dist(self, i: int, j: int):
        if i == j:
            return Fraction(0)
        lo, hi = min(i, j), max(i, j)
        return self.pos[hi] - self.pos[lo]

    def _add(self, kind, src, dst, deps=(), label="", duration=None) -> int:
        eid = len(self.events)
        deps = tuple(sorted({d for d in deps if d is not None}))
        if duration is None:
            duration = self.dist(src, dst) if kind in TRANSIT_KINDS else Fraction(0)
        self.events.append(Event(eid, kind, src, dst, self.offsets[src], duration, deps, label))
        return eid

    def photon(self, src, dst, deps=(), label="photons") -> int:
        return self._add("photon_transit", src, dst, deps, label)

    def message(self, src, dst, deps=(), label="message") -> int:
        return self._add("classical_message", src, dst, deps, label)

    def confirm(self, src, dst, deps=(), label="confirm") -> int:
        return self._add("entanglement_confirm", src, dst, deps, label)

    def local(self, node, deps=(), label="local") -> int:
        return self._add("local_op", node, node, deps, label)

    def wait(self, node, deps=(), label="wait") -> int:
        return self._add("wait", node, node, deps, label)

    def link(self, i, j, system) -> None:
        if i != j:
            self.links.append(((min(i, j), max(i, j)), system))

    def names(self, i, j) -> str:
        return f"{node_name(i, self.n)}->{node_name(j, self.n)}"


def ent_gen(a: int, b: int, photon_source: int, topology: LineTopology | None = None,
            positions: Sequence | None = None) -> tuple:
    """Photon leg from ``photon_source`` plus the reverse confirmation leg.

    The two events are returned unscheduled (ids 0 and 1, the confirm
    depending on the photon) so that a builder may merge the confirmation
    into another message on the same ordered node pair.
    """
    if a == b:
        raise TimelineError("entanglement needs two distinct nodes")
    if photon_source not in (a, b):
        raise TimelineError("the photon source must be one of the two nodes")
    other = b if photon_source == a else a
    if topology is not None:
        positions = topology.positions
    if positions is None:
        raise TimelineError("pass a topology or explicit positions")
    gap = abs(as_fraction(positions[other]) - as_fraction(positions[photon_source]))
    photon = Event(0, "photon_transit", photon_source, other, Fraction(0), gap, (), "photons")
    conf = Event(1, "entanglement_confirm", other, photon_source, Fraction(0), gap, (0,), "confirm")
    return photon, conf


# --------------------------------------------------------------------------
# shared stage builders

def _relay_in(g: _Builder, path: Sequence[int], system: str, deps=()) -> int | None:
    """Teleport hop by hop along ``path`` (source first).

    Photons for hop u->v leave v at time zero; the teleportation message
    u->v carries the confirmation for that link.
    """
    last = None
    first_deps = tuple(deps)
    for u, v in zip(path, path[1:]):
        ph = g.photon(v, u, label=f"photons {g.names(v, u)}")
        last = g.message(u, v, (ph, last) + first_deps, label=f"teleport {system} + confirm {g.names(u, v)}")
        g.link(u, v, system)
        first_deps = ()
    return last


def _relay_out(g: _Builder, path: Sequence[int], system: str, deps, link=True) -> int | None:
    """Teleport back along ``path`` using the links set up on the way in."""
    last = None
    for u, v in zip(path, path[1:]):
        last = g.message(u, v, tuple(deps) + (last,), label=f"teleport {system} back {g.names(u, v)}")
        if link:
            g.link(u, v, system)
    return last


def default_hub(n: int) -> int:
    return (n + 2) // 2 if n > 0 else 1


def _hub_build(g: _Builder, hub: int, system_a: str, system_b: str, back: str,
               local_label: str = "gate at hub", notify_a: bool = True) -> None:
    """Relay both inputs to ``hub``, act there, and return results.

    ``back`` is "relay" (teleport back hop by hop), "direct" (one classical
    message straight to each end node) or "transit" (carry the physical
    systems, used by the quantum-computing stub).
    """
    a_path = list(range(0, hub + 1))
    b_path = list(range(g.last, hub - 1, -1))
    if back == "transit":
        ends = [g._add("photon_transit", 0, hub, label="carry A to hub") if hub != 0 else None,
                g._add("photon_transit", g.last, hub, label="carry B to hub") if hub != g.last else None]
        act = g.local(hub, ends, local_label)
        for end in (0, g.last):
            if end != hub:
                g._add("photon_transit", hub, end, (act,), label=f"carry back {g.names(hub, end)}")
        return
    a_in = _relay_in(g, a_path, system_a)
    b_in = _relay_in(g, b_path, system_b)
    act = g.local(hub, (a_in, b_in), local_label)
    if back == "relay":
        _relay_out(g, a_path[::-1], system_a, (act,))
        _relay_out(g, b_path[::-1], system_b, (act,))
    else:
        if notify_a and hub != 0:
            g.message(hub, 0, (act,), label=f"outcomes {g.names(hub, 0)}")
        if hub != g.last:
            g.message(hub, g.last, (act,), label=f"outcomes {g.names(hub, g.last)}")


def _controlled_gate(g: _Builder, control: int, target: int, system: str, mirrored: bool = False):
    """Two-leg controlled-unitary primitive between two nodes.

    Returns the event after which the target-side node may go on. In the
    plain form the control end receives photons, then sends its outcome
    (with the confirmation) and receives a reply. In the mirrored form
    the photons travel the other way and the far node holds until the
    first leg has landed, which keeps the stage length unchanged.
    """
    if control == target:
        return None
    g.link(control, target, system)
    if not mirrored:
        ph = g.photon(target, control, label=f"photons {g.names(target, control)}")
        first = g.message(control, target, (ph,), label=f"control outcome + confirm {g.names(control, target)}")
        g.message(target, control, (first,), label=f"reply {g.names(target, control)}")
        return first
    ph = g.photon(control, target, label=f"photons {g.names(control, target)}")
    first = g.message(target, control, (ph,), label=f"control outcome + confirm {g.names(target, control)}")
    g.message(control, target, (first,), label=f"reply {g.names(control, target)}")
    return g.wait(target, (first,), label="hold until first leg lands")



# --------------------------------------------------------------------------
# family builders

def _build_p1(g: _Builder, hub: int | None = None):
    hub = default_hub(g.n) if hub is None else hub
    _hub_build(g, hub, "A", "B", back="relay", local_label="apply U")


def _build_p2(g: _Builder, mirrored: bool = False):
    """Controlled-unitary family; ancilla a on the first repeater, b on the last."""
    system = "G" if mirrored else "N"
    pa, pb = (1, g.n) if g.n >= 1 else (0, g.last)
    gate_a = _controlled_gate(g, pa, 0, system, mirrored=mirrored) if mirrored else \
        _controlled_gate(g, 0, pa, system)
    # ab link: photons from the b side, confirmation merged into the outcome of a
    if pa != pb:
        ph = g.photon(pb, pa, label=f"photons {g.names(pb, pa)}")
        g.link(pa, pb, system)
        m = g.message(pa, pb, (ph, gate_a), label=f"outcome of a + confirm {g.names(pa, pb)}")
    else:
        m = g.local(pa, (gate_a,), label="measure a")
    # gate on (b, B): photons from B, two legs pb->B->pb
    if pb != g.last:
        ph = g.photon(g.last, pb, label=f"photons {g.names(g.last, pb)}")
        g.link(pb, g.last, system)
        leg1 = g.message(pb, g.last, (ph, m), label=f"{'teleport b' if mirrored else 'control b'} + confirm {g.names(pb, g.last)}")
        leg2 = g.message(g.last, pb, (leg1,), label=f"{'teleport b back' if mirrored else 'reply'} {g.names(g.last, pb)}")
    else:
        leg2 = g.local(pb, (m,), label="gate on b,B")
    g.message(pb, 0, (leg2,), label=f"outcome of b {g.names(pb, 0)}")


def _group_gate_halves(g: _Builder, near: int, end: int):
    """First half of a group-controlled gate between repeater ``near`` and an end node.

    Returns (first-half event at ``near``, event id to chain the second leg on).
    """
    if near == end:
        return None
    ph = g.photon(near, end, label=f"photons {g.names(near, end)}")
    g.link(near, end, "G")
    return g.message(end, near, (ph,), label=f"gate leg + confirm {g.names(end, near)}")


def _build_p3(g: _Builder):
    """Double-group family, standard (slow) step order."""
    if g.n >= 3:
        _hub_build(g, default_hub(g.n), "G", "G", back="direct", local_label="group circuit at hub")
        return
    pa, pb = (1, g.n) if g.n >= 1 else (0, g.last)
    half_a = _group_gate_halves(g, pa, 0)
    half_b = _group_gate_halves(g, pb, g.last)
    if half_a is not None:
        g.message(pa, 0, (half_a,), label=f"gate leg {g.names(pa, 0)}")
    if pa != pb:
        ph = g.photon(pb, pa, label=f"photons {g.names(pb, pa)}")
        g.link(pa, pb, "G")
        m = g.message(pa, pb, (ph, half_a), label=f"outcome of a + confirm {g.names(pa, pb)}")
    else:
        m = g.local(pa, (half_a,), label="measure a")
    act = g.local(pb, (m, half_b), label="correct, apply C, measure b")
    for end in (0, g.last):
        if end != pb:
            g.message(pb, end, (act,), label=f"outcome of b {g.names(pb, end)}")


def _build_fast(g: _Builder, system: str = "G", teleport_ends: bool = False):
    """Single-round fast family: both ancilla nodes measure once ready and broadcast."""
    if g.n >= 3:
        _hub_build(g, default_hub(g.n), system, system, back="direct", local_label="fast circuit at hub")
        return
    pa, pb = (1, g.n) if g.n >= 1 else (0, g.last)
    if teleport_ends:
        ready_a = _relay_in(g, [0, pa], "A") if pa != 0 else None
        ready_b = _relay_in(g, [g.last, pb], "B") if pb != g.last else None
        link_sys = "AB"
    else:
        ready_a = _group_gate_halves(g, pa, 0)
        ready_b = _group_gate_halves(g, pb, g.last)
        if ready_a is not None:
            g.message(pa, 0, (ready_a,), label=f"gate leg {g.names(pa, 0)}")
        if ready_b is not None:
            g.message(pb, g.last, (ready_b,), label=f"gate leg {g.names(pb, g.last)}")
        link_sys = system
    if pa != pb:
        ph = g.photon(pb, pa, label=f"photons {g.names(pb, pa)}")
        conf = g.confirm(pa, pb, (ph,), label=f"confirm {g.names(pa, pb)}")
        g.link(pa, pb, link_sys)
        meas_a = g.local(pa, (ready_a, ph), label="measure a")
        meas_b = g.local(pb, (ready_b, conf), label="measure b")
    else:
        meas_a = meas_b = g.local(pa, (ready_a, ready_b), label="measure a and b")
    if teleport_ends:
        # each side's correction needs both outcomes before the outputs go home
        to_b = g.message(pa, pb, (meas_a,), label=f"outcome {g.names(pa, pb)}") if pa != pb else meas_a
        to_a = g.message(pb, pa, (meas_b,), label=f"outcome {g.names(pb, pa)}") if pa != pb else meas_b
        done_a = g.local(pa, (meas_a, to_a), label="correct")
        done_b = g.local(pb, (meas_b, to_b), label="correct")
        _relay_out(g, [pa, 0], "A", (done_a,))
        _relay_out(g, [pb, g.last], "B", (done_b,))
        return
    for node, ev in ((pa, meas_a), (pb, meas_b)):
        for end in (0, g.last):
            if end != node:
                g.message(node, end, (ev,), label=f"outcome {g.names(node, end)}")
        if pa == pb:
            break


def _build_p8(g: _Builder):
    if g.n == 0:
        ph = g.photon(0, 1, label="photons A->B")
        g.link(0, 1, "bit")
        m = g.message(1, 0, (ph,), label="outcome m + confirm B->A")
        act = g.local(0, (m,), label="rotate, measure")
        g.message(0, 1, (act,), label="outcome s A->B")
        return
    hub = default_hub(g.n)
    # resource states relayed from A, information about B's qubit relayed from B
    a_in = _relay_in(g, list(range(0, hub + 1)), "ladder")
    b_in = _relay_in(g, list(range(g.last, hub - 1, -1)), "bit")
    act = g.local(hub, (a_in, b_in), label="ladder of rotations")
    g.message(hub, g.last, (act,), label=f"outcome s {g.names(hub, g.last)}")
    g.message(hub, 0, (act,), label=f"herald {g.names(hub, 0)}")


def _build_p9(g: _Builder):
    _hub_build(g, default_hub(g.n), "A", "B", back="transit", local_label="compute")


def _build_transmission(g: _Builder):
    _relay_in(g, list(range(0, g.last + 1)), "A")


# --------------------------------------------------------------------------
# catalog

@dataclass(frozen=True)
class ProtocolVariant:
    name: str
    family: int
    n: int
    builders: tuple
    default_positions: tuple = ()
    notes: str = ""

    def label(self, repeaters: Sequence | None = None) -> str:
        reps = tuple(repeaters) if repeaters is not None else self.default_positions
        if not reps:
            return self.name
        return f"{self.name}({','.join(str(Fraction(r)) for r in reps)})"


def _fr(*xs):
    return tuple(Fraction(x) for x in xs)


_THIRDS = _fr("1/3", "2/3")
_FIFTHS = _fr("1/5", "3/5")
_SEVENTHS = _fr("1/7", "3/7")
_SIXTHS = _fr("1/6", "1/2", "5/6")
_HALF = _fr("1/2")

_p2m = (lambda g: _build_p2(g, mirrored=True),)
_fast = (_build_fast, _build_p3)

CATALOG = {
    "P1": ProtocolVariant("P1", 1, 0, (_build_p1,)),
    "P1.1": ProtocolVariant("P1.1", 1, 1, (_build_p1,), _HALF),
    "P1.2": ProtocolVariant("P1.2", 1, 2, (_build_p1,), _FIFTHS),
    "P1.3": ProtocolVariant("P1.3", 1, 3, (_build_p1,), _SIXTHS),
    "P2": ProtocolVariant("P2", 2, 0, (_build_p2,)),
    "P2.1": ProtocolVariant("P2.1", 2, 1, (_build_p2,), _HALF),
    "P2.2": ProtocolVariant("P2.2", 2, 2, (_build_p2,), _SEVENTHS),
    "P3": ProtocolVariant("P3", 3, 0, (_build_p3,)),
    "P3.1": ProtocolVariant("P3.1", 3, 1, (_build_p3,), _HALF),
    "P3.2": ProtocolVariant("P3.2", 3, 2, (_build_p3,), _FIFTHS),
    "P3.3": ProtocolVariant("P3.3", 3, 3, (_build_p3,), _SIXTHS),
    "P4": ProtocolVariant("P4", 4, 0, _p2m),
    "P4.1": ProtocolVariant("P4.1", 4, 1, _p2m, _HALF),
    "P4.2": ProtocolVariant("P4.2", 4, 2, _p2m, _SEVENTHS),
    "P5": ProtocolVariant("P5", 5, 0, _fast),
    "P5.1": ProtocolVariant("P5.1", 5, 1, _fast, _HALF),
    "P5.2": ProtocolVariant("P5.2", 5, 2, _fast, _THIRDS),
    "P5.3": ProtocolVariant("P5.3", 5, 3, _fast, _SIXTHS),
    "P6.2": ProtocolVariant("P6.2", 6, 2, _fast, _THIRDS),
    "P7": ProtocolVariant("P7", 7, 0, (lambda g: _build_fast(g, teleport_ends=True),)),
    "P7.2": ProtocolVariant("P7.2", 7, 2, (lambda g: _build_fast(g, teleport_ends=True),), _THIRDS),
    "P8": ProtocolVariant("P8", 8, 0, (_build_p8,)),
    "P8.1": ProtocolVariant("P8.1", 8, 1, (_build_p8,), _HALF),
    "P8.2": ProtocolVariant("P8.2", 8, 2, (_build_p8,), _FIFTHS),
    "P8.3": ProtocolVariant("P8.3", 8, 3, (_build_p8,), _SIXTHS),
    "P9": ProtocolVariant("P9", 9, 0, (_build_p9,), notes="timing stub"),
    "P9.1": ProtocolVariant("P9.1", 9, 1, (_build_p9,), _HALF, notes="timing stub"),
}

_NAME_RE = re.compile(r"^\s*P?(\d+(?:\.\d+)?)\s*(?:\((.*)\))?\s*$", re.IGNORECASE)


def parse_variant(text: str) -> tuple:
    """Parse "P3.2", "3.2" or "P3.2(1/5,3/5)" into (variant, positions or None)."""
    m = _NAME_RE.match(str(text))
    if not m:
        raise TimelineError(f"unknown variant {text!r}")
    key = "P" + m.group(1)
    if key not in CATALOG:
        raise TimelineError(f"unknown variant {text!r}; known: {', '.join(CATALOG)}")
    variant = CATALOG[key]
    reps = None
    if m.group(2) is not None and m.group(2).strip():
        reps = tuple(as_fraction(p) for p in m.group(2).split(","))
        if len(reps) != variant.n:
            raise TimelineError(f"{key} takes {variant.n} positions, got {len(reps)}")
    return variant, reps


def get_variant(name) -> ProtocolVariant:
    if isinstance(name, ProtocolVariant):
        return name
    return parse_variant(name)[0]


def _build_all(variant: ProtocolVariant, positions, offsets=None) -> list:
    out = []
    for build in variant.builders:
        g = _Builder(positions, offsets)
        build(g)
        out.append(g)
    return out


def _pick(builders: list) -> _Builder:
    best, best_time = None, None
    for g in builders:
        t = run_schedule(g.events, len(g.pos)).completion
        if best is None or t < best_time:
            best, best_time = g, t
    return best


def resolve(variant, topology: LineTopology | Sequence | None = None) -> tuple:
    """Normalise (variant, topology) arguments; positions default to the catalog's."""
    if isinstance(variant, str):
        variant, reps = parse_variant(variant)
        if topology is None and reps is not None:
            topology = LineTopology.from_repeaters(reps)
    if topology is None:
        topology = LineTopology.from_repeaters(variant.default_positions)
    elif not isinstance(topology, LineTopology):
        topology = LineTopology.from_repeaters(topology)
    if topology.n != variant.n:
        raise TimelineError(f"{variant.name} needs {variant.n} repeaters, topology has {topology.n}")
    return variant, topology


def build_schedule(variant, topology: LineTopology | Sequence | None = None,
                   params: dict | None = None, redundancy: int = 1) -> tuple:
    """Build and resolve a catalog variant; returns (Schedule, CostReport)."""
    variant, topology = resolve(variant, topology)
    g = _pick(_build_all(variant, topology.positions, topology.offsets))
    sched = run_schedule(g.events, len(g.pos))
    return sched, _costs(variant, g, sched, params or {}, redundancy)


def completion_time(variant, topology=None) -> Fraction:
    return build_schedule(variant, topology)[0].completion


def symbolic_completion(variant) -> list:
    """Completion times as MaxAffine functions of the repeater positions.

    Variants that pick the faster of two step orders return one
    expression per order; the actual time is their minimum.
    """
    variant = get_variant(variant)
    n = variant.n
    pos = [MaxAffine.constant(0, n)] + [MaxAffine.variable(k, n) for k in range(n)] + [MaxAffine.constant(1, n)]
    return [run_schedule(g.events, len(pos)).completion for g in _build_all(variant, pos)]


def relay_hub_schedule(topology: LineTopology, hub: int | None = None) -> Schedule:
    """Full-teleportation schedule through an arbitrary number of repeaters."""
    g = _Builder(topology.positions, topology.offsets)
    _build_p1(g, hub)
    return run_schedule(g.events, len(g.pos))


def transmission_schedule(topology: LineTopology) -> Schedule:
    """Unambiguous one-way sending A->B by hop-by-hop teleportation."""
    g = _Builder(topology.positions, topology.offsets)
    _build_transmission(g)
    return run_schedule(g.events, len(g.pos))


# --------------------------------------------------------------------------
# closed forms used to cross-check the engine

def _ordered_pair(x1, x2):
    x1, x2 = as_fraction(x1), as_fraction(x2)
    if not 0 < x1 < x2 < 1:
        raise TimelineError(f"need 0 < x1 < x2 < 1, got ({x1}, {x2})")
    return x1, x2


def schedule_formula_p32(x1, x2) -> Fraction:
    x1, x2 = _ordered_pair(x1, x2)
    return max(2 * (1 - x2), max(2 * x1, x2 - x1) + (x2 - x1)) + max(x2, 1 - x2)


def schedule_formula_p22(x1, x2) -> Fraction:
    """Piecewise case analysis for the controlled-unitary family with two repeaters."""
    x1, x2 = _ordered_pair(x1, x2)
    if x2 <= 3 * x1:
        return 2 + x1 if x1 + 2 * x2 >= 1 else 3 - 2 * x2
    if 2 * (x2 - x1) < 1 - x2:
        return 3 - 2 * x2
    return 2 + x2 - 2 * x1


# --------------------------------------------------------------------------
# analysis

def critical_path(schedule: Schedule) -> list:
    """Event ids of a longest chain ending at the completion time.

    Zero-duration events are dropped from the returned chain.
    """
    if not schedule.events:
        return []
    cur = max(range(len(schedule.events)), key=lambda k: (schedule.ends[k], -k))
    chain = [cur]
    while True:
        ev = schedule.events[cur]
        start = schedule.starts[cur]
        prev = [d for d in ev.depends_on if schedule.ends[d] == start]
        if not prev:
            break
        cur = max(prev, key=lambda d: (schedule.events[d].duration != 0, d))
        chain.append(cur)
    return [k for k in reversed(chain) if schedule.events[k].duration != 0]


def slack(schedule: Schedule) -> dict:
    """Latest-start minus start for every event (0 on critical chains)."""
    n = len(schedule.events)
    latest_end = [schedule.completion] * n
    for k in range(n - 1, -1, -1):
        ev = schedule.events[k]
        latest_start = latest_end[k] - ev.duration
        for d in ev.depends_on:
            latest_end[d] = min(latest_end[d], latest_start)
    return {k: latest_end[k] - schedule.ends[k] for k in range(n)}


_SYSTEM_KEYS = {
    "A": ("d_a",),
    "B": ("d_b",),
    "N": ("n_control",),
    "G": ("group_order",),
    "AB": ("d_a", "d_b"),
}


def _link_ebits(system: str, params: dict) -> float:
    if system == "bit":
        return 1.0
    if system == "ladder":
        return 2.0 * int(params.get("ladder_steps", 1))
    keys = _SYSTEM_KEYS[system]
    missing = [k for k in keys if k not in params]
    if missing:
        raise TimelineError(f"missing parameter(s) {', '.join(missing)}")
    return float(sum(math.log2(int(params[k])) for k in keys))


def _costs(variant: ProtocolVariant, g: _Builder, sched: Schedule, params: dict, redundancy: int) -> CostReport:
    if redundancy < 1:
        raise TimelineError("redundancy must be at least 1")
    links = []
    if params:
        links = [(pair, _link_ebits(system, params)) for pair, system in g.links]
    elif g.links:
        links = [(pair, system) for pair, system in g.links]
    ebits = float(sum(e for _, e in links)) if params else float("nan")
    photons = sum(1 for ev in sched.events if ev.kind == "photon_transit")
    cbits = 2 * ebits
    return CostReport(sched.completion, ebits * redundancy, cbits, tuple(links), photons, redundancy)


def cost_report(variant, params: dict, topology=None, redundancy: int = 1) -> CostReport:
    """Time plus entanglement and classical cost.

    ``params`` supplies d_a, d_b, n_control or group_order as the variant
    needs; ``ladder_steps`` sets the number of resource pairs for the
    remote-rotation family.
    """
    if not params:
        raise TimelineError("cost_report needs dimension parameters")
    return build_schedule(variant, topology, params=params, redundancy=redundancy)[1]


def legs(schedule: Schedule) -> list:
    """Durations along the critical path."""
    return [schedule.ends[k] - schedule.starts[k] for k in critical_path(schedule)]


def describe(schedule: Schedule, n: int) -> list:
    rows = []
    for ev, s, e in zip(schedule.events, schedule.starts, schedule.ends):
        rows.append((ev.id, ev.kind, node_name(ev.src, n), node_name(ev.dst, n), s, e, ev.label))
    return rows
