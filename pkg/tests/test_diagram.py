"""Sphere map structure, labels, corner taxonomy and reducedness."""

import random

import pytest

from corpus import glued_phi_pair, kcell_disk, phi_bigon, random_diagram, torsion_wheel
from howie.diagram import (
    Corner,
    Diagram,
    Edge,
    Face,
    Trav,
    ensure_exterior_corners,
    face_label,
    find_reducible_pairs,
    is_phi_reduced,
    parse_diagram,
    serialize_diagram,
    validate,
    vertex_label,
)
from howie.errors import DiagramError, NoSuchConjugate
from howie.groups import FREE, BaseGroup, fp_from_syllables
from howie.presentation import Normalized, RelatorPresentation, normalize
from howie.words import parse_word, tword_cyclic_reduce

F2 = BaseGroup(FREE, ("a", "b"))


def np_simple():
    res = normalize(RelatorPresentation(F2, parse_word("a.t.b.t^-1.a.t", F2), 2))
    assert isinstance(res, Normalized)
    return res.np


def np_s1():
    res = normalize(RelatorPresentation(
        F2, parse_word("a.t.b.t.a.t^-1.b.t^-1.a.t", F2), 3))
    assert isinstance(res, Normalized)
    assert res.np.s >= 1
    return res.np


def some_p(np):
    assert np.s >= 1
    return fp_from_syllables([(0, np.base.generator(0))])


def test_phi_bigon_valid():
    np = np_s1()
    d = phi_bigon(np, some_p(np))
    assert d.euler_characteristic() == 2
    rep = validate(d, np)
    assert rep.valid
    kinds = {fc.face: fc.kind for fc in rep.face_classes}
    assert kinds["phi"] == "phi"
    assert kinds["ext"] == "exterior"
    assert rep.kind_of("phi").p == some_p(np)


def test_phi_bigon_label_is_relator():
    np = np_s1()
    p = some_p(np)
    d = phi_bigon(np, p)
    lbl = face_label(d, "phi")
    expected, _ = tword_cyclic_reduce(np.phi_relator(p))
    assert lbl == expected


def test_vertex_labels_trivial_and_perturbable():
    np = np_s1()
    p = some_p(np)
    d = phi_bigon(np, p)
    for v in d.vertices:
        assert vertex_label(d, v).is_identity()
    # perturb one corner label: a vertex label breaks
    bad_faces = []
    for f in d.faces.values():
        if f.exterior:
            boundary = list(f.boundary)
            boundary[0] = Corner(p)
            bad_faces.append(Face(f.id, True, tuple(boundary)))
        else:
            bad_faces.append(f)
    d2 = Diagram(d.edges.values(), bad_faces)
    rep = validate(d2, np)
    assert not rep.valid
    assert any(not ok for _, ok in rep.vertex_ok)


def test_flipping_one_edge_is_rejected():
    np = np_s1()
    d = phi_bigon(np, some_p(np))
    edges = [Edge("e1", "u", "v"), d.edges["e2"]]  # reverse e1
    with pytest.raises(DiagramError):
        Diagram(edges, list(d.faces.values()))


def test_same_direction_twice_rejected():
    e = Edge("e", "u", "v")
    f1 = Face("f1", False, (Corner(fp_from_syllables([])), Trav("e", 1)))
    f2 = Face("ext", True, (Corner(fp_from_syllables([])), Trav("e", 1)))
    with pytest.raises(DiagramError):
        Diagram([e], [f1, f2])


def test_kcell_disk_valid_and_classified():
    np = np_simple()
    d = kcell_disk(np, 1, tail=0)
    rep = validate(d, np)
    assert rep.valid
    kinds = {fc.face: (fc.kind, fc.sign) for fc in rep.face_classes}
    assert kinds["kcell"] == ("kcell", 1)
    d = kcell_disk(np, -1, tail=0)
    rep = validate(d, np)
    assert rep.valid
    assert rep.kind_of("kcell").sign == -1


def test_kcell_disk_with_tail_valid():
    np = np_simple()
    d = kcell_disk(np, 1, tail=2)
    rep = validate(d, np)
    assert rep.valid
    types = {d.corner_type(ref) for ref in d.corner_refs() if ref[0] == "ext"}
    assert "++" in types and "--" in types


def test_corner_types_on_kcell():
    np = np_simple()
    d = kcell_disk(np, 1, tail=0)
    # interior corners: c is (++), b is (+-), a is (-+)
    types = [d.corner_type(("kcell", i)) for i in range(0, 6 * np.k, 2)]
    per_period = types[:3]
    assert per_period == ["++", "+-", "-+"]


def test_classify_vertex_sink_source():
    wheel, np3 = torsion_wheel()
    rep = validate(wheel, np3)
    assert rep.valid
    assert wheel.classify_vertex("hub") == "source"
    assert not wheel.vertex_on_exterior("hub")
    # rim vertices are mixed and exterior
    assert wheel.classify_vertex("y0") == "mixed"


def test_alternation_lemma_on_fixtures():
    np = np_s1()
    diagrams = [phi_bigon(np, some_p(np)), kcell_disk(np, 1), kcell_disk(np, -1)]
    for d in diagrams:
        _assert_alternation(d)


def _assert_alternation(d):
    for v, cycle in d.vertex_cycles.items():
        marks = [d.corner_type(ref) for ref in cycle]
        extremes = [t for t in marks if t in ("++", "--")]
        for i, t in enumerate(x for x in extremes):
            assert t != extremes[(i + 1) % len(extremes)] or len(extremes) == 1, (v, marks)
        if not extremes:
            assert d.classify_vertex(v) in ("sink", "source")


def test_reducible_pair_detection():
    np = np_s1()
    p = some_p(np)
    d = glued_phi_pair(np, p, p.inverse())
    pairs = find_reducible_pairs(d)
    assert len(pairs) == 1
    assert not is_phi_reduced(d, np)

    d2 = glued_phi_pair(np, p, p * p)
    assert find_reducible_pairs(d2) == []
    assert not is_phi_reduced(d2, np)  # still two phi cells on one edge

    d3 = phi_bigon(np, p)
    assert find_reducible_pairs(d3) == []
    assert is_phi_reduced(d3, np)


def test_serialize_round_trip():
    np = np_s1()
    d = kcell_disk(np, 1, tail=1)
    text = serialize_diagram(d, np.base)
    d2 = parse_diagram(text, np.base)
    assert serialize_diagram(d2, np.base) == text
    rep = validate(d2, np)
    assert rep.valid


def test_parse_rejects_malformed():
    with pytest.raises(DiagramError):
        parse_diagram("{not json", F2)
    with pytest.raises(DiagramError):
        parse_diagram('{"edges": [], "faces": []}', F2)


def test_ensure_exterior_corners():
    np = np_simple()  # m = 0
    u = parse_word("a.t.b", F2)
    assert ensure_exterior_corners(u, 0) == (u, 0)

    np1 = np_s1()
    assert np1.m >= 0
    u = parse_word("t.a.t.b.t^-1.a.t^-1.b", F2)
    u2, n = ensure_exterior_corners(u, 1)
    assert n == 0 and u2 == u

    v = np1.v ** np1.k
    u3, n3 = ensure_exterior_corners(v, max(np1.m, 1))
    assert n3 <= v.length()
    from howie.diagram import _linear_corner_patterns

    assert _linear_corner_patterns(u3) == (True, True)

    # a word with no H letters at all cannot produce a (--) corner by
    # conjugation when it is a positive power of t
    with pytest.raises(NoSuchConjugate):
        ensure_exterior_corners(parse_word("t.t", F2), 1)


def test_random_diagrams_valid():
    np = np_s1()
    rng = random.Random(7)
    for _ in range(6):
        d = random_diagram(np, rng, attachments=2)
        rep = validate(d, np)
        assert rep.valid
        assert d.euler_characteristic() == 2
        _assert_alternation(d)


def test_face_label_stable_under_stored_rotation():
    np = np_s1()
    d = kcell_disk(np, 1, tail=0)
    f = d.faces["kcell"]
    rotated = Face(f.id, False, f.boundary[2:] + f.boundary[:2])
    d2 = Diagram(d.edges.values(), [rotated, d.faces["ext"]])
    assert face_label(d, "kcell") == face_label(d2, "kcell")
