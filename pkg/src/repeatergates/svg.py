"""Static spacetime diagrams: x is node position, time runs downward."""
from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import quoteattr

from .timeline import LineTopology, Schedule, node_name

WIDTH = 480
HEIGHT = 480
MARGIN = 48

LINE_STYLES = {
    "photon_transit": ("#1f77b4", "6 4"),
    "classical_message": ("#222222", None),
    "entanglement_confirm": ("#2ca02c", "2 3"),
}


def rational_text(value) -> str:
    q = Fraction(value)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _num(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def emit_spacetime_svg(schedule: Schedule, topology: LineTopology) -> str:
    """Deterministic SVG text for ``schedule`` laid out on ``topology``."""
    positions = [Fraction(p) for p in topology.positions]
    span = positions[-1] - positions[0] or Fraction(1)
    tmax = Fraction(schedule.completion) if schedule.events else Fraction(0)
    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def x_of(node: int) -> float:
        return MARGIN + float((positions[node] - positions[0]) / span) * plot_w

    def y_of(t) -> float:
        return MARGIN + (float(Fraction(t) / tmax) * plot_h if tmax else 0.0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-time-max="{rational_text(tmax)}">',
        '<g class="axes" stroke="#888888" stroke-width="1">',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{WIDTH - MARGIN}" y2="{MARGIN}"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/>',
        "</g>",
        '<g class="labels" font-family="monospace" font-size="11" text-anchor="middle">',
    ]
    n = topology.n
    for i in range(len(positions)):
        out.append(f'<text x="{_num(x_of(i))}" y="{MARGIN - 20}">{node_name(i, n)}</text>')
        out.append(f'<text x="{_num(x_of(i))}" y="{MARGIN - 8}">{rational_text(positions[i])}</text>')
    out.append(f'<text x="{MARGIN - 24}" y="{HEIGHT - MARGIN}" class="time-max">{rational_text(tmax)}</text>')
    out.append("</g>")
    if tmax:
        out.append('<g class="node-lines" stroke="#dddddd" stroke-width="1">')
        for i in range(len(positions)):
            xs = _num(x_of(i))
            out.append(f'<line x1="{xs}" y1="{MARGIN}" x2="{xs}" y2="{HEIGHT - MARGIN}"/>')
        out.append("</g>")
    out.append('<g class="events">')
    for ev, s, e in zip(schedule.events, schedule.starts, schedule.ends):
        attrs = (f'data-id="{ev.id}" data-kind="{ev.kind}" data-start="{rational_text(s)}" '
                 f'data-end="{rational_text(e)}" data-label={quoteattr(ev.label)}')
        if ev.kind in LINE_STYLES:
            colour, dash = LINE_STYLES[ev.kind]
            dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<line x1="{_num(x_of(ev.src))}" y1="{_num(y_of(s))}" x2="{_num(x_of(ev.dst))}" '
                       f'y2="{_num(y_of(e))}" stroke="{colour}" stroke-width="1.5"{dash_attr} {attrs}/>')
        elif ev.kind == "local_op":
            out.append(f'<circle cx="{_num(x_of(ev.src))}" cy="{_num(y_of(e))}" r="3" fill="#d62728" {attrs}/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
