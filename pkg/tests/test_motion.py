"""Standard motion timetables, exact collision counts, motion lemmas."""

import random
from fractions import Fraction

import pytest

from corpus import glued_phi_pair, kcell_disk, phi_bigon, random_diagram, torsion_wheel
from howie.diagram import validate
from howie.groups import FREE, BaseGroup, fp_from_syllables
from howie.motion import (
    build_standard_schedules,
    check_separated_stops,
    format_collision_report,
    simulate_collisions,
    verify_interior_free,
    verify_lower_bound,
)
from howie.presentation import Normalized, RelatorPresentation, normalize
from howie.words import parse_word

F2 = BaseGroup(FREE, ("a", "b"))


def make_np(text, k):
    res = normalize(RelatorPresentation(F2, parse_word(text, F2), k))
    assert isinstance(res, Normalized)
    return res.np


def np_m0():
    return make_np("a.t.b.t^-1.a.t", 2)  # m = 0, s = 0


def np_s1():
    return make_np("a.t.b.t.a.t^-1.b.t^-1.a.t", 3)  # s = 1, m = 0


def np_m1(k=2):
    return make_np("a.t.b.t^-1.a.t.b.t^-1.a.t", k)  # m = 1, s = 0


def np_m2_k3():
    return make_np("a.t.b.t^-1.a.t.b.t^-1.a.t.b.t^-1.a.t", 3)  # m = 2


def test_phi_schedule_shape():
    np = np_s1()
    p = fp_from_syllables([(0, F2.generator(0))])
    d = phi_bigon(np, p)
    scheds = build_standard_schedules(d, np)
    by_face = {s.face: s for s in scheds}
    phi = by_face["phi"]
    assert phi.period == 2 and phi.multiplicity == 1
    # (+-) corner visited at even moments
    pos0 = phi.position(4, 0, Fraction(0))
    assert pos0[0] == "corner"
    assert d.corner_type(("phi", pos0[1])) == "+-"
    pos1 = phi.position(4, 0, Fraction(1))
    assert d.corner_type(("phi", pos1[1])) == "-+"


def test_kcell_schedule_m2_k3():
    np = np_m2_k3()
    assert np.m == 2 and np.k == 3
    d = kcell_disk(np, 1, tail=2)
    scheds = build_standard_schedules(d, np)
    kc = next(s for s in scheds if s.face == "kcell")
    assert kc.period == 10 and kc.multiplicity == 3
    parks = [seg for car in kc.cars for seg in car if seg.kind == "park"]
    assert len(parks) == 3
    assert all((seg.start, seg.end) == (6, 9) for seg in parks)


def test_kcell_schedule_m0_timetable():
    np = np_m0()
    d = kcell_disk(np, 1, tail=0)
    scheds = build_standard_schedules(d, np)
    kc = next(s for s in scheds if s.face == "kcell")
    assert kc.period == 2 and kc.multiplicity == np.k
    n2 = len(d.faces["kcell"].boundary)
    # b0 at 0, a0 at 1, c at 3/2, b0 at 2
    for j in range(kc.multiplicity):
        for t, want in [(Fraction(0), "+-"), (Fraction(1), "-+"),
                        (Fraction(3, 2), "++"), (Fraction(2), "+-")]:
            loc = kc.position(n2, j, t)
            assert loc[0] == "corner"
            assert d.corner_type(("kcell", loc[1])) == want


def test_schedule_periodicity_property():
    np = np_m1(2)
    d = kcell_disk(np, 1, tail=2)
    rng = random.Random(3)
    for sched in build_standard_schedules(d, np):
        n2 = len(d.faces[sched.face].boundary)
        T = sched.period
        for _ in range(60):
            t = Fraction(rng.randint(0, 400), rng.randint(1, 40))
            for j in range(sched.multiplicity):
                a = sched.position(n2, j, t + T)
                b = sched.position(n2, (j + 1) % sched.multiplicity, t)
                assert a == b


def test_edge_parity_invariant():
    """Moving interior cars go with the arrows exactly at odd integer parts."""
    for np in (np_m0(), np_m1(2), np_m2_k3()):
        d = kcell_disk(np, 1, tail=2)
        for sched in build_standard_schedules(d, np):
            if sched.face == d.exterior_face:
                continue
            boundary = d.faces[sched.face].boundary
            for car in sched.cars:
                for seg in car:
                    if seg.kind != "move":
                        continue
                    mid = (seg.start + seg.end) / 2
                    trav = boundary[seg.pos]
                    if int(mid) % 2 == 1:
                        assert trav.dir == 1, (sched.face, seg)
                    else:
                        assert trav.dir == -1, (sched.face, seg)


def test_phi_bigon_collisions():
    np = np_s1()
    p = fp_from_syllables([(0, F2.generator(0))])
    d = phi_bigon(np, p)
    scheds = build_standard_schedules(d, np)
    report = simulate_collisions(d, scheds)
    assert report.bound == 2
    assert verify_lower_bound(report)
    assert check_separated_stops(d, scheds).ok
    assert verify_interior_free(report, d, np).interior_free


def test_kcell_disk_collisions_all_exterior():
    np = np_m1(2)
    d = kcell_disk(np, 1, tail=2)
    scheds = build_standard_schedules(d, np)
    report = simulate_collisions(d, scheds)
    assert report.bound == 2 + (2 - 1)
    assert report.complete_points >= 3
    assert verify_lower_bound(report)
    check = verify_interior_free(report, d, np)
    assert check.interior_free
    assert check_separated_stops(d, scheds).ok
    assert not report.exterior_edge_over_one


def test_negative_kcell_disk():
    np = np_m1(2)
    d = kcell_disk(np, -1, tail=2)
    scheds = build_standard_schedules(d, np)
    report = simulate_collisions(d, scheds)
    assert verify_lower_bound(report)
    assert check_separated_stops(d, scheds).ok
    assert verify_interior_free(report, d, np).interior_free


def test_glued_phi_pair_motion():
    np = np_s1()
    p = fp_from_syllables([(0, F2.generator(0))])
    d = glued_phi_pair(np, p, p * p)
    scheds = build_standard_schedules(d, np)
    report = simulate_collisions(d, scheds)
    assert verify_lower_bound(report)
    assert check_separated_stops(d, scheds).ok
    # not phi-reduced, but no interior complete collision occurs here
    assert verify_interior_free(report, d, np).interior_free


def test_torsion_wheel_interior_collision_at_source():
    d, np3 = torsion_wheel()
    scheds = build_standard_schedules(d, np3)
    report = simulate_collisions(d, scheds)
    assert check_separated_stops(d, scheds).ok
    assert verify_lower_bound(report)
    check = verify_interior_free(report, d, np3)
    assert not check.interior_free
    assert check.all_localized  # every interior collision at a sink or source
    assert any(v == "hub" and klass == "source" for v, klass, _ in check.witnesses)


def test_random_diagrams_lemmas():
    np = np_s1()
    rng = random.Random(11)
    for _ in range(4):
        d = random_diagram(np, rng, attachments=2)
        scheds = build_standard_schedules(d, np)
        report = simulate_collisions(d, scheds)
        assert verify_lower_bound(report), format_collision_report(report)
        assert check_separated_stops(d, scheds).ok
        rep = validate(d, np)
        if rep.phi_reduced:
            assert verify_interior_free(report, d, np).interior_free
        assert not report.exterior_edge_over_one


def test_report_formatting_deterministic():
    np = np_m0()
    d = kcell_disk(np, 1, tail=0)
    scheds = build_standard_schedules(d, np)
    r1 = format_collision_report(simulate_collisions(d, scheds))
    r2 = format_collision_report(simulate_collisions(d, scheds))
    assert r1 == r2
    assert r1.splitlines()[-1].startswith("TOTAL complete_points=")
