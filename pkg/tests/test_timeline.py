import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from repeatergates import timeline
from repeatergates.maxplus import MaxAffine, tmax
from repeatergates.timeline import (CATALOG, Event, LineTopology, TimelineError, build_schedule, completion_time,
                                    cost_report, critical_path, ent_gen, legs, parse_variant, run_schedule,
                                    schedule_formula_p22, schedule_formula_p32, slack, symbolic_completion)

fractions = st.fractions(min_value=F(1, 1000), max_value=F(999, 1000), max_denominator=1000)


def ordered(n):
    return st.lists(fractions, min_size=n, max_size=n, unique=True).map(sorted).map(tuple)


def test_parse_variant_forms():
    assert parse_variant("3.2")[0].name == "P3.2"
    v, reps = parse_variant("P3.2(1/5,3/5)")
    assert reps == (F(1, 5), F(3, 5))
    with pytest.raises(TimelineError):
        parse_variant("P3.7")
    with pytest.raises(TimelineError):
        parse_variant("P3.2(1/5)")


def test_topology_validation():
    with pytest.raises(TimelineError):
        LineTopology((0, F(3, 5), F(1, 5), 1))
    with pytest.raises(TimelineError):
        LineTopology((0, F(1, 2), 2))
    assert LineTopology((0, 1, 2), allow_span=True).distance(0, 2) == 2
    with pytest.raises(TimelineError):
        timeline.as_fraction(0.5)


def test_ent_gen_two_legs():
    photon, confirm = ent_gen(0, 1, 1, positions=(0, F(1, 3)))
    assert (photon.src, photon.dst, photon.duration) == (1, 0, F(1, 3))
    assert (confirm.src, confirm.dst, confirm.depends_on) == (0, 1, (0,))
    sched = run_schedule([photon, confirm])
    assert sched.completion == F(2, 3)


def test_single_local_op():
    sched = run_schedule([Event(0, "local_op", 0, 0, F(0), F(0))])
    assert sched.completion == 0
    assert critical_path(sched) == []


def test_run_schedule_rejects_bad_graphs():
    with pytest.raises(TimelineError):
        run_schedule([Event(0, "teleport", 0, 1, F(0), F(1))])
    with pytest.raises(TimelineError):
        run_schedule([Event(0, "local_op", 0, 0, F(0), F(0), (1,))])


def test_critical_path_legs():
    sched, _ = build_schedule("P1")
    assert legs(sched) == [1, 1, 1]
    sched, _ = build_schedule("P1.1")
    assert legs(sched) == [F(1, 2)] * 3


@pytest.mark.parametrize("name", list(CATALOG))
def test_speed_of_light_contract(name):
    sched, _ = build_schedule(name)
    pos = LineTopology.from_repeaters(CATALOG[name].default_positions).positions
    for ev, s, e in zip(sched.events, sched.starts, sched.ends):
        assert s >= 0
        if ev.kind in timeline.TRANSIT_KINDS:
            assert e - s == abs(pos[ev.dst] - pos[ev.src])
        else:
            assert e == s


@pytest.mark.parametrize("name", list(CATALOG))
def test_critical_path_realises_completion(name):
    sched, _ = build_schedule(name)
    path = critical_path(sched)
    assert sched.ends[path[-1]] == sched.completion
    assert sum(legs(sched)) <= sched.completion
    sl = slack(sched)
    assert all(v >= 0 for v in sl.values())
    assert all(sl[k] == 0 for k in path)


@settings(max_examples=200, deadline=None)
@given(ordered(2))
def test_p32_formula_matches_engine(xs):
    assert schedule_formula_p32(*xs) == completion_time("P3.2", xs)


@settings(max_examples=200, deadline=None)
@given(ordered(2))
def test_p22_cases_match_engine(xs):
    assert schedule_formula_p22(*xs) == completion_time("P2.2", xs)
    assert completion_time("P4.2", xs) == completion_time("P2.2", xs)


def test_formula_examples():
    assert schedule_formula_p32(F(1, 5), F(3, 5)) == F(7, 5)
    assert schedule_formula_p32(F(1, 3), F(2, 3)) == F(5, 3)
    with pytest.raises(TimelineError):
        schedule_formula_p32(F(3, 5), F(1, 5))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([n for n, v in CATALOG.items() if v.n > 0]), st.data())
def test_monotone_in_distances(name, data):
    """Shrinking any gap between neighbouring nodes never slows a protocol down."""
    n = CATALOG[name].n
    gaps = data.draw(st.lists(st.fractions(F(1, 50), F(1), max_denominator=50), min_size=n + 1, max_size=n + 1))
    k = data.draw(st.integers(0, n))
    shrink = data.draw(st.fractions(F(0), F(99, 100), max_denominator=100))
    def topo(gs):
        pos = [F(0)]
        for g in gs:
            pos.append(pos[-1] + g)
        return LineTopology(tuple(pos), allow_span=True)
    smaller = list(gaps)
    smaller[k] = gaps[k] * (1 - shrink)
    assume(smaller[k] > 0)
    assert completion_time(name, topo(smaller)) <= completion_time(name, topo(gaps))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["P1.2", "P2.2", "P3.2", "P5.2", "P8.2"]), ordered(2))
def test_symbolic_completion_matches_numeric(name, xs):
    exprs = symbolic_completion(name)
    assert min(e(xs) for e in exprs) == completion_time(name, xs)


def test_scaling_is_linear():
    base = completion_time("P3.2", LineTopology((0, F(1, 5), F(3, 5), 1)))
    scaled = completion_time("P3.2", LineTopology((0, F(2, 5), F(6, 5), 2), allow_span=True))
    assert scaled == 2 * base


def test_offsets_delay_start():
    late = LineTopology((0, 1), offsets=(F(1, 2), 0))
    assert completion_time("P1", late) >= completion_time("P1")


def test_cost_reports():
    c = cost_report("P1", {"d_a": 2, "d_b": 2})
    assert (c.ebits, c.cbits) == (2, 4)
    c = cost_report("P2", {"n_control": 2})
    assert (c.ebits, c.cbits) == (1, 2)
    assert cost_report("P3", {"group_order": 16}).ebits == 4
    assert cost_report("P4", {"group_order": 4}).ebits == 2
    assert cost_report("P1", {"d_a": 2, "d_b": 2}, redundancy=2).ebits == 4
    with pytest.raises(TimelineError):
        cost_report("P3", {"d_a": 2})


def test_maxaffine_algebra():
    x = MaxAffine.variable(0, 1)
    e = (x * 2).join(1 - x)
    assert e((F(1, 3),)) == F(2, 3)
    assert (e + 1)((F(0),)) == 2
    assert tmax([F(1), F(2)]) == 2
    with pytest.raises(ValueError):
        -e
    with pytest.raises(ValueError):
        x * -1


def test_random_pairs_against_both_closed_forms():
    rnd = random.Random(0)
    for _ in range(200):
        a, b = sorted(rnd.sample(range(1, 500), 2))
        xs = (F(a, 500), F(b, 500))
        assert completion_time("P8.2", xs) == schedule_formula_p32(*xs)
        assert completion_time("P1.2", xs) == schedule_formula_p32(*xs)
