"""Normalization into the pinch form and its condition checks."""

import random

import pytest

from howie.errors import NotInDomain, NotUnimodular, StructureError
from howie.groups import FIN_CYCLIC, FREE, BaseGroup, fp_from_syllables, fp_identity
from howie.presentation import (
    FreeProductCase,
    Normalized,
    NormalizedPresentation,
    RelatorPresentation,
    check_conditions,
    check_unimodular,
    membership_in_P,
    normalize,
    normalized_from_json,
    normalized_to_json,
    phi_apply,
    presentation_from_json,
    presentation_to_json,
)
from howie.words import (
    is_conjugate,
    parse_word,
    substitute_back,
    tword_cyclic_reduce,
    tword_reduce,
)

F1 = BaseGroup(FREE, ("a",))
F2 = BaseGroup(FREE, ("a", "b"))
Z3 = BaseGroup(FIN_CYCLIC, ("a",), order=3)


def w(text, base=F2):
    return parse_word(text, base)


def test_check_unimodular():
    assert check_unimodular(w("t"))
    assert not check_unimodular(w("a^-1.t^-1.a.t"))
    assert check_unimodular(w("a.t.b.t^-1.a.t"))


def test_presentation_validation():
    with pytest.raises(NotUnimodular):
        RelatorPresentation(Z3, w("a^-1.t^-1.a.t", Z3), 3)
    # the paper's example needs the explicit override
    p = RelatorPresentation(Z3, w("a^-1.t^-1.a.t", Z3), 3, allow_nonunimodular=True)
    assert p.k == 3
    with pytest.raises(StructureError):
        RelatorPresentation(F2, w("t.a.t^-1"), 2)  # not cyclically reduced
    with pytest.raises(StructureError):
        RelatorPresentation(F2, w("t"), 1)


def test_membership():
    assert membership_in_P(fp_identity(), "P", 0)
    g = fp_from_syllables([(2, F2.generator(0))])
    assert not membership_in_P(g, "P", 2)
    assert membership_in_P(g, "Pphi", 2)
    h = fp_from_syllables([(0, F2.generator(0))])
    assert not membership_in_P(h, "P", 0)
    assert not membership_in_P(h, "Pphi", 0)


def test_phi_apply():
    one = fp_identity()
    assert phi_apply(one, "forward", 1) == one
    g = fp_from_syllables([(0, F2.generator(0))])
    assert phi_apply(g, "forward", 1) == fp_from_syllables([(1, F2.generator(0))])
    gh = fp_from_syllables([(0, F2.generator(0)), (1, F2.generator(1))])
    shifted = phi_apply(gh, "forward", 2)
    assert shifted.syllables[0][0] == 1 and shifted.syllables[1][0] == 2
    assert phi_apply(shifted, "inverse", 2) == gh
    with pytest.raises(NotInDomain):
        phi_apply(fp_from_syllables([(1, F2.generator(0))]), "forward", 1)


def test_phi_respects_multiplication():
    x = fp_from_syllables([(0, F2.generator(0))])
    y = fp_from_syllables([(0, F2.generator(1)), (1, F2.generator(0))])
    lhs = phi_apply(x * y, "forward", 2)
    rhs = phi_apply(x, "forward", 2) * phi_apply(y, "forward", 2)
    assert lhs == rhs


def test_normalize_free_product_case():
    res = normalize(RelatorPresentation(F2, w("a.t"), 2))
    assert isinstance(res, FreeProductCase)
    assert res.g == F2.generator(0)
    res = normalize(RelatorPresentation(F2, w("t"), 5))
    assert isinstance(res, FreeProductCase)
    assert res.g.is_identity()


def test_normalize_spec_example_routes_to_free_product():
    # w = (t^-1 a t) a t is conjugate to a^2 t, so the gt-case triggers:
    # t w t^-1 = a t a ~ a^2 t.
    u = w("t^-1.a.t.a.t", F1)
    core, _ = tword_cyclic_reduce(u)
    assert core == w("t.a^2", F1)
    res = normalize(RelatorPresentation.build(F1, u, 2))
    assert isinstance(res, FreeProductCase)
    assert res.g == F1.generator(0, 2)


def _assert_sound(p, res):
    assert isinstance(res, Normalized)
    np = res.np
    report = check_conditions(np)
    assert report.all_pass(), report
    assert is_conjugate(substitute_back(np.v, np.s), p.w)
    q = np.back_witness
    assert q is not None
    assert substitute_back(np.v, np.s).conjugate_by(q) == p.w


def test_normalize_simple_pinch():
    # already in pinch shape with s = 0
    p = RelatorPresentation(F2, w("a.t.b.t^-1.a.t"), 2)
    res = normalize(p)
    assert isinstance(res, Normalized)
    np = res.np
    assert np.s == 0 and np.m == 0
    _assert_sound(p, res)


def test_normalize_higher_s():
    p = RelatorPresentation(F2, w("a.t.b.t.a.t^-1.b.t^-1.a.t"), 3)
    res = normalize(p)
    assert isinstance(res, Normalized)
    assert res.np.s >= 1
    _assert_sound(p, res)


def test_normalize_deterministic():
    p = RelatorPresentation(F2, w("a.t.b.t.a.t^-1.b.t^-1.a.t"), 3)
    r1, r2 = normalize(p), normalize(p)
    assert isinstance(r1, Normalized) and isinstance(r2, Normalized)
    assert r1.np == r2.np


def test_normalize_torsion_requires_override():
    from howie.errors import TorsionBase

    u = w("a.t.a.t^-1.a.t", Z3)
    with pytest.raises(TorsionBase):
        normalize(RelatorPresentation(Z3, u, 2))


def _random_unimodular_word(rng, base, max_len):
    while True:
        n = rng.randint(1, max_len)
        raw = []
        for _ in range(n):
            if rng.random() < 0.5:
                raw.append(rng.choice([1, -1]))
            else:
                gen = rng.randrange(base.rank)
                exp = rng.choice([1, -1])
                raw.append(fp_from_syllables([(0, base.generator(gen, exp))]))
        word = tword_reduce(raw)
        if word.is_identity():
            continue
        # fix the exponent sum to one by appending t letters
        from howie.words import t_word, tword_exponent_sum

        delta = 1 - tword_exponent_sum(word)
        step = 1 if delta > 0 else -1
        for _ in range(abs(delta)):
            word = word * t_word(step)
        core, _ = tword_cyclic_reduce(word)
        if not core.is_identity() and core.gen_length() <= max_len:
            return core


def test_normalize_random_soundness_suite():
    rng = random.Random(20613)
    done = 0
    for _ in range(400):
        if done >= 60:
            break
        core = _random_unimodular_word(rng, F2, 8)
        p = RelatorPresentation(F2, core, rng.choice([2, 3, 5]))
        res = normalize(p)
        t_items = [it for it in core.items if isinstance(it, int)]
        h_items = [it for it in core.items if not isinstance(it, int)]
        if isinstance(res, FreeProductCase):
            assert len(t_items) == 1 and len(h_items) <= 1
        else:
            _assert_sound(p, res)
        done += 1
    assert done >= 60


def test_condition3_brute_force_instance():
    # a single syllable in G^(s): no relation p0 a^e1 p1 a^e2 ... collapses,
    # checked over all alternating words of length <= 6
    np_res = normalize(RelatorPresentation(F2, w("a.t.b.t^-1.a.t"), 2))
    np = np_res.np
    assert np.s == 0
    a0 = np.a[0]
    words = []
    for e1 in (1, -1, 2, -2):
        base_pows = [a0]
        pw = fp_identity()
        steps = abs(e1)
        for _ in range(steps):
            pw = pw * (a0 if e1 > 0 else a0.inverse())
        words.append(pw)
    for x in words:
        assert not x.is_identity()


def test_json_round_trip():
    p = RelatorPresentation(F2, w("a.t.b.t^-1.a.t"), 2)
    data = presentation_to_json(p)
    assert presentation_from_json(data) == p
    res = normalize(p)
    np = res.np
    data = normalized_to_json(np)
    back = normalized_from_json(data)
    assert back.s == np.s and back.m == np.m and back.v == np.v


def test_kcell_patterns():
    res = normalize(RelatorPresentation(F2, w("a.t.b.t^-1.a.t"), 2))
    np = res.np
    pos = np.kcell_pattern(+1)
    assert [sgn for _, sgn in pos] == [1, -1, 1]
    neg = np.kcell_pattern(-1)
    assert [sgn for _, sgn in neg] == [1, -1, -1]
    # reading the negative pattern yields the inverse cyclic word
    raw = []
    from howie.words import h_word, t_word

    for corner, sgn in neg:
        raw.extend(h_word(corner).items)
        raw.append(sgn)
    word_neg = tword_reduce(raw)
    core_neg, _ = tword_cyclic_reduce(word_neg)
    core_inv, _ = tword_cyclic_reduce(np.v.inverse())
    assert core_neg == core_inv
