"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the summary block lists the
lines) or ``python3 tests/test_acceptance.py``.
"""
import io
import math
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest

from repeatergates import bounds, cli, posver, simulation, timeline
from repeatergates.config import parse_config

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = {}


def report(number, ok, detail):
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


TABLE_ONE = {
    "P1": F(3), "P1.1(1/2)": F(3, 2), "P1.2(1/5,3/5)": F(7, 5), "P3.2(1/5,3/5)": F(7, 5),
    "P5.2(1/3,2/3)": F(4, 3), "P6.2(1/3,2/3)": F(4, 3), "P7.2(1/3,2/3)": F(4, 3),
    "P1.3(1/6,1/2,5/6)": F(7, 6), "P3.3(1/6,1/2,5/6)": F(7, 6),
}

PER_VARIANT = {
    "P2": F(3), "P2.1(1/2)": F(5, 2), "P2.2(1/7,3/7)": F(15, 7), "P3": F(3), "P3.1(1/2)": F(3, 2),
    "P3.2(1/3,2/3)": F(5, 3), "P8": F(3), "P8.1(1/2)": F(3, 2), "P8.2(1/5,3/5)": F(7, 5),
    "P8.3(1/6,1/2,5/6)": F(7, 6), "P9.1(1/2)": F(1),
}


def _compare_times(table):
    bad = {}
    for name, want in table.items():
        got = timeline.completion_time(name)
        if not (isinstance(got, F) and got == want):
            bad[name] = (got, want)
    return bad


def test_criterion_01_table_one():
    t0 = time.perf_counter()
    bad = _compare_times(TABLE_ONE)
    elapsed = time.perf_counter() - t0
    report(1, not bad and elapsed < 1, f"{len(TABLE_ONE)} best variants exact in {elapsed:.3f}s; mismatches {bad}")


def test_criterion_02_per_variant_times():
    bad = _compare_times(PER_VARIANT)
    report(2, not bad, f"{len(PER_VARIANT)} variants exact; mismatches {bad}")


def test_criterion_03_optimizer_recovery():
    t0 = time.perf_counter()
    problems = []
    for family, want_pos, want_t in (("P2.2", (F(1, 7), F(3, 7)), F(15, 7)), ("P3.2", (F(1, 5), F(3, 5)), F(7, 5))):
        ex = bounds.optimize_placement(family, method="exact")
        if ex.positions != want_pos or ex.time != want_t:
            problems.append(f"{family} exact {ex.positions} {ex.time}")
        gr = bounds.optimize_placement(family, method="grid")
        if abs(gr.time - ex.time) > F(1, 1000) or max(abs(a - b) for a, b in zip(gr.positions, ex.positions)) > F(1, 1000):
            problems.append(f"{family} grid {gr.positions} {gr.time}")
    schemes = {1: ((F(1, 3),), F(4, 3)), 2: ((F(1, 7), F(3, 7)), F(8, 7)), 3: ((F(1, 15), F(1, 5), F(7, 15)), F(16, 15))}
    for n, want in schemes.items():
        got = bounds.ts_scheme(n)
        if got != want:
            problems.append(f"ts_scheme({n}) = {got}")
    elapsed = time.perf_counter() - t0
    report(3, not problems and elapsed < 10, f"exact/grid placements and relay schemes in {elapsed:.2f}s; {problems or 'all match'}")


def test_criterion_04_many_relays():
    problems = []
    for parity in ("odd", "even"):
        times = []
        for k in range(11):
            want = (1 + F(1, 2 * (2 ** (k + 1) - 1))) if parity == "odd" else F(2 ** (k + 2) - 1, 2 ** (k + 2) - 3)
            if bounds.many_nodes_formula(k, parity) != want:
                problems.append(f"{parity} k={k} formula")
            if k <= 4:
                _, engine_time = bounds.many_nodes(k, parity)
                if engine_time != want:
                    problems.append(f"{parity} k={k} engine {engine_time}")
            times.append(want)
        if not all(a > b > 1 for a, b in zip(times, times[1:])):
            problems.append(f"{parity} not strictly decreasing toward 1")
    report(4, not problems, f"k = 0..10 both parities, engine-checked k <= 4; {problems or 'all match'}")


CIRCUIT_TRIALS = 20


def test_criterion_05_06_07_circuits():
    t0 = time.perf_counter()
    results = {p: simulation.simulate(p, trials=CIRCUIT_TRIALS, seed=2024) for p in simulation.PROTOCOLS}
    elapsed = time.perf_counter() - t0
    flat = [r for rs in results.values() for r in rs]
    worst_overlap = min(r.min_overlap for r in flat)
    worst_prob = max(r.probability_deviation for r in flat)
    covered = {p: sorted({r.dims for r in rs}) for p, rs in results.items()}
    enough = all(sum(1 for r in rs if r.dims == d) >= CIRCUIT_TRIALS for p, rs in results.items() for d in covered[p])
    ladders = {r.label for r in results["P8.1"]}
    ok5 = (all(r.passed for r in flat) and worst_overlap >= 1 - 1e-9 and worst_prob <= 1e-9 and enough
           and ladders == {"q=1,N=1", "q=1,N=3", "q=3,N=2"} and elapsed < 60)
    ACCEPTANCE[5] = (ok5, f"{len(flat)} seeded runs over {covered}; worst overlap {worst_overlap:.15f}, "
                          f"worst probability deviation {worst_prob:.2e}, {elapsed:.1f}s")
    print(f"criterion  5: {'PASS' if ok5 else 'FAIL'}  {ACCEPTANCE[5][1]}")

    # resource accounting on the same runs
    problems = []
    for p in ("P1", "P2", "P3", "P4", "P5", "P6", "P7"):
        for r in results[p]:
            if not math.isclose(r.cbits, 2 * r.ebits, abs_tol=1e-12):
                problems.append(f"{p} cbits {r.cbits} vs ebits {r.ebits}")
    rng = np.random.default_rng(5)
    inst = simulation.random_instance("P8", (2,), rng)
    _, run8 = simulation.execute(inst)
    log8 = run8.resource_log
    directions = {(m.sender, m.receiver) for m in log8.messages}
    if log8.ebits != 1 or log8.cbits != 2 or len(log8.messages) != 2 or len(directions) != 2 or \
            any((b, a) not in directions for a, b in directions):
        problems.append(f"P8 log {log8.ebits} ebits, messages {[(m.sender, m.receiver, m.bits) for m in log8.messages]}")
    from repeatergates.qudit import QuditState, haar_unitary
    for _ in range(5):
        u = haar_unitary(4, rng)
        psi = QuditState.random((2, 2), rng)
        e3 = simulation.execute(simulation.instance_from_unitary("P3", u, (2, 2), psi))[0].ebits
        e4 = simulation.execute(simulation.instance_from_unitary("P4", u, (2, 2), psi))[0].ebits
        if (e3, e4) != (4.0, 2.0):
            problems.append(f"P3/P4 ebits {e3}/{e4}")
    ACCEPTANCE[6] = (not problems, f"cbits = 2 x ebits on all P1-P7 runs; P8 1 ebit + 2 opposite cbits; "
                                   f"P4 2 vs P3 4 ebits; {problems or 'ok'}")
    print(f"criterion  6: {'PASS' if not problems else 'FAIL'}  {ACCEPTANCE[6][1]}")

    fast_ok = all(r.single_round and r.rounds == 1 for p in ("P5", "P6", "P7") for r in results[p])
    slow_ok = all(r.rounds >= 2 for p in ("P2", "P3", "P4") for r in results[p])
    ACCEPTANCE[7] = (fast_ok and slow_ok, f"P5/P6/P7 single parallel round: {fast_ok}; P2/P3/P4 >= 2 rounds: {slow_ok}")
    print(f"criterion  7: {'PASS' if fast_ok and slow_ok else 'FAIL'}  {ACCEPTANCE[7][1]}")
    assert ok5 and not problems and fast_ok and slow_ok


def test_criterion_08_position_verification():
    problems = []
    tri = ((0, 0), (1, 0), (F(1, 2), math.sqrt(3) / 2))
    centre = (F(1, 2), math.sqrt(3) / 6)
    v3 = posver.three_verifier_verdict(posver.Geometry2D(tri, centre))
    if not (v3.secure and v3.margin > 0 and abs(float(v3.honest_time) - 2 / math.sqrt(3)) < 1e-12):
        problems.append(f"equilateral {v3}")
    v2 = posver.two_verifier_verdict(posver.Geometry2D(((0, 0), (1, 0)), (F(1, 2), 0)), max_attacker_repeaters=3)
    if not (v2.secure and v2.attacker_best_time == F(7, 6) and v2.honest_time == 1):
        problems.append(f"midpoint {v2.attacker_best_time} vs {v2.honest_time}")
    gap = bounds.delta_t_bound(1, F(1, 10), exact_mode=True)
    if not gap.bound >= F(1, 5):
        problems.append(f"delta gap {gap.bound}")
    if abs(posver.ANGLE_THRESHOLD - 2 * math.asin(2 / 3)) > 1e-10:
        problems.append("angle threshold")
    report(8, not problems, f"equilateral honest {float(v3.honest_time):.12f} margin {v3.margin:.6f}; midpoint "
                            f"attacker {v2.attacker_best_time} vs 1; gap {gap.bound}; {problems or 'ok'}")


def _p22_region(x1, x2):
    if x2 <= 3 * x1:
        return "a"
    return "b" if 2 * (x2 - x1) < 1 - x2 else "c"


def test_criterion_09_formula_cross_validation():
    rnd = random.Random(9)

    def pair(den=997):
        while True:
            a, b = sorted(rnd.sample(range(1, den), 2))
            return F(a, den), F(b, den)

    mism = 0
    for _ in range(1000):
        x1, x2 = pair()
        if timeline.schedule_formula_p32(x1, x2) != timeline.completion_time("P3.2", (x1, x2)):
            mism += 1
    regions = {"a": 0, "b": 0, "c": 0}
    region_mism = 0
    while min(regions.values()) < 100:
        x1, x2 = pair()
        r = _p22_region(x1, x2)
        if regions[r] >= 100:
            continue
        regions[r] += 1
        if timeline.schedule_formula_p22(x1, x2) != timeline.completion_time("P2.2", (x1, x2)):
            region_mism += 1
    report(9, mism == 0 and region_mism == 0,
           f"closed form vs engine: {mism} mismatches in 1000 pairs; piecewise regions {regions}, {region_mism} mismatches")


DETERMINISM_DOCS = [
    'command = "simulate"\nprotocol = "P5"\ntrials = 2\nseed = 11\nformat = "records"\n',
    'command = "simulate"\nprotocol = "P3"\nfixture = "cnot"\nseed = 3\nformat = "records"\n',
    'command = "timeline"\nvariant = "1.3"\npositions = [1/6, 1/2, 5/6]\ndims = [2, 2]\nformat = "records"\n',
    'command = "optimize"\nfamily = "P2.2"\nmethod = "grid"\nformat = "records"\n',
    'command = "bounds"\nformat = "records"\n',
    'command = "posver"\nverifiers = [[0, 0], [1, 0]]\nprover = [1/2, 0]\nformat = "records"\n',
    'command = "report"\nformat = "csv"\n',
]


def _render_all():
    chunks = []
    for doc in DETERMINISM_DOCS:
        buf = io.StringIO()
        cli.run(parse_config(doc), stdout=buf)
        chunks.append(buf.getvalue().encode())
    return b"".join(chunks)


def test_criterion_10_determinism(tmp_path):
    first, second = _render_all(), _render_all()
    cmd = [sys.executable, "-m", "repeatergates.cli", "simulate", "--protocol", "P6", "--trials", "3",
           "--seed", "42", "--format", "records"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    svgs = []
    for k in range(2):
        out = tmp_path / f"p52_{k}.svg"
        cli.main(["timeline", "--variant", "P5.2(1/3,2/3)", "--svg", str(out), "--format", "records"])
        svgs.append(out.read_bytes())
    ok = first == second and runs[0] == runs[1] and runs[0] and svgs[0] == svgs[1]
    report(10, ok, f"{len(first)} record bytes in-process, {len(runs[0])} bytes across processes, SVG "
                   f"{len(svgs[0])} bytes; identical: {ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
