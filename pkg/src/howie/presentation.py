"""Relator presentations <G, t | w^k = 1> and their pinch normal form.

``normalize`` rewrites a unimodular relator into the form

    (c t b_0 a_0^t b_1 a_1^t ... b_m a_m^t)^k = 1

over H = G^(0) * ... * G^(s), with the shift isomorphism identifying
p^t = p^phi for p in P = G^(0) * ... * G^(s-1).  Words conjugate to g t
are routed to the free product case G * <x>_k instead.

The construction is a height rewriting: pick a seam inside a t-run of
the cyclic relator, read letter heights from there, and cut the letter
sequence into blocks c | b_0 | a_0 | ... | b_m | a_m so that every
b-block contains a letter of maximal height and every a-block one of
minimal height; copy indices then absorb the t-runs.  Both soundness
checks (the normal-form conditions and back-substitution conjugacy)
are machine verified before the result is returned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .errors import (
    NormalizationFailed,
    NotInDomain,
    NotUnimodular,
    StructureError,
    TorsionBase,
    WordSyntaxError,
)
from .groups import BaseElement, BaseGroup, FPElement, fp_from_syllables, fp_identity
from .words import (
    TWord,
    format_fp,
    format_word,
    h_word,
    parse_fp,
    parse_word,
    substitute_back,
    t_word,
    tword_conjugacy_witness,
    tword_cyclic_reduce,
    tword_exponent_sum,
    tword_reduce,
)


def check_unimodular(w: TWord) -> bool:
    """A word is unimodular when its t-exponent sum is one."""
    return tword_exponent_sum(w) == 1


def _is_cyclically_reduced(w: TWord) -> bool:
    core, conj = tword_cyclic_reduce(w)
    return conj.is_identity() or len(core.items) == len(w.items)


@dataclass(frozen=True)
class RelatorPresentation:
    """Starting presentation <G, t | w^k = 1>."""

    base: BaseGroup
    w: TWord
    k: int
    allow_nonunimodular: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise StructureError("k must be at least 2")
        if self.w.is_identity():
            raise StructureError("relator is empty")
        if not _is_cyclically_reduced(self.w):
            raise StructureError("relator must be cyclically reduced")
        if self.w.max_factor() > 0:
            raise StructureError("relator letters must lie in the single copy G^(0)")
        if not check_unimodular(self.w) and not self.allow_nonunimodular:
            raise NotUnimodular("relator is not unimodular (t-exponent sum != 1)")

    def relator(self) -> TWord:
        return self.w ** self.k

    @classmethod
    def build(cls, base: BaseGroup, w: TWord, k: int,
              allow_nonunimodular: bool = False) -> "RelatorPresentation":
        """Construct after replacing w by its cyclic core.

        Conjugating the relator does not change the normal closure, so
        this is the friendly entry point for raw input words.
        """
        core, _ = tword_cyclic_reduce(w)
        return cls(base, core, k, allow_nonunimodular)


@dataclass(frozen=True)
class NormalizedPresentation:
    """The data (s, m, c, a_i, b_i, k) of the pinch form."""

    base: BaseGroup
    s: int
    m: int
    c: FPElement
    a: tuple[FPElement, ...]
    b: tuple[FPElement, ...]
    k: int
    source_w: TWord | None = None
    back_witness: TWord | None = None

    def __post_init__(self):
        if self.s < 0 or self.m < 0 or self.k < 2:
            raise StructureError("bad normalized presentation parameters")
        if len(self.a) != self.m + 1 or len(self.b) != self.m + 1:
            raise StructureError("a and b must have m + 1 entries")
        for h in (self.c, *self.a, *self.b):
            if h.max_factor() > self.s:
                raise StructureError("element leaves H = G^(0) * ... * G^(s)")

    @property
    def v(self) -> TWord:
        """The relator base c t prod_i (b_i a_i^t) as a reduced word."""
        raw = list(h_word(self.c).items) + [1]
        for bi, ai in zip(self.b, self.a):
            raw.extend(h_word(bi).items)
            raw.append(-1)
            raw.extend(h_word(ai).items)
            raw.append(1)
        return tword_reduce(raw)

    def kcell_pattern(self, sign: int) -> list[tuple[FPElement, int]]:
        """One period of the k-cell boundary as (corner, following edge sign).

        The positive pattern is c [t] b_0 [t^-1] a_0 [t] ... a_m [t];
        the negative one is its formal inverse.
        """
        pos = [(self.c, 1)]
        for bi, ai in zip(self.b, self.a):
            pos.append((bi, -1))
            pos.append((ai, 1))
        if sign > 0:
            return pos
        # Formal inverse of the cyclic word: corner x_j becomes x_j^-1 and
        # is now followed by the inverse of the edge that preceded x_j.
        neg = []
        for j in range(len(pos) - 1, -1, -1):
            neg.append((pos[j][0].inverse(), -pos[j - 1][1]))
        return neg

    def phi_relator(self, p: FPElement) -> TWord:
        """The word p^t p^-phi = t^-1 p t (p^phi)^-1."""
        if not membership_in_P(p, "P", self.s) or p.is_identity():
            raise StructureError("phi relator requires p in P minus identity")
        return t_word(-1) * h_word(p) * t_word(1) * h_word(p.shift(1)).inverse()


@dataclass(frozen=True)
class FreeProductCase:
    """w is conjugate to g t: the group is G * <x>_k."""

    g: BaseElement


@dataclass(frozen=True)
class Normalized:
    np: NormalizedPresentation


NormalizationResult = Union[Normalized, FreeProductCase]


def membership_in_P(h: FPElement, side: str, s: int) -> bool:
    """Membership in P = G^(0)*...*G^(s-1) or its shift P^phi."""
    if h.max_factor() > s:
        raise StructureError(f"element uses factor index above s={s}")
    if side == "P":
        return all(i <= s - 1 for i, _ in h.syllables)
    if side in ("Pphi", "Pφ"):
        return all(1 <= i <= s for i, _ in h.syllables)
    raise StructureError(f"unknown side {side!r}")


def phi_apply(p: FPElement, direction: str, s: int) -> FPElement:
    """The shift isomorphism phi: P -> P^phi or its inverse."""
    if direction == "forward":
        if not membership_in_P(p, "P", s):
            raise NotInDomain("phi is defined on P only")
        return p.shift(1)
    if direction == "inverse":
        if not membership_in_P(p, "Pphi", s):
            raise NotInDomain("phi^-1 is defined on P^phi only")
        return p.shift(-1)
    raise StructureError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class ConditionReport:
    condition1: bool
    condition2: bool
    condition2_detail: tuple[str, ...]
    condition3: str  # "pass" | "undetermined"
    condition3_detail: tuple[str, ...]
    condition4: bool

    def all_pass(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3 == "pass" and self.condition4


def check_conditions(np: NormalizedPresentation) -> ConditionReport:
    """Verify the pinch-form conditions 1 through 4.

    Condition 3 is certified only through the sufficient structural
    criterion (infinite order plus a syllable in the extreme factor);
    anything else is reported as undetermined, never as a pass.
    """
    cond1 = len(np.a) >= 1
    c2_detail = []
    cond2 = True
    for i, ai in enumerate(np.a):
        if membership_in_P(ai, "P", np.s):
            cond2 = False
            c2_detail.append(f"a[{i}] lies in P")
    for i, bi in enumerate(np.b):
        if membership_in_P(bi, "Pphi", np.s):
            cond2 = False
            c2_detail.append(f"b[{i}] lies in P^phi")
    c3_detail = []
    cond3 = "pass"
    for i, ai in enumerate(np.a):
        if not (ai.has_infinite_order() and any(j == np.s for j, _ in ai.syllables)):
            cond3 = "undetermined"
            c3_detail.append(f"a[{i}] not certified (needs infinite order and a G^(s) syllable)")
    for i, bi in enumerate(np.b):
        if not (bi.has_infinite_order() and any(j == 0 for j, _ in bi.syllables)):
            cond3 = "undetermined"
            c3_detail.append(f"b[{i}] not certified (needs infinite order and a G^(0) syllable)")
    cond4 = np.s >= 0 and all(
        h.max_factor() <= np.s for h in (np.c, *np.a, *np.b)
    )
    return ConditionReport(cond1, cond2, tuple(c2_detail), cond3, tuple(c3_detail), cond4)


def _letters_with_heights(items) -> list[tuple[BaseElement, int]]:
    """G-letters of a linear item list with running t-exponent heights."""
    out = []
    height = 0
    for it in items:
        if isinstance(it, int):
            height += it
        else:
            if len(it.syllables) != 1 or it.syllables[0][0] != 0:
                raise StructureError("starting relator must live in G^(0)")
            out.append((it.syllables[0][1], height))
    return out


def _try_seam(linear_items) -> tuple[FPElement, list[FPElement], list[FPElement], int] | None:
    """Attempt the block decomposition for one linear reading of w.

    Returns (c, a_blocks, b_blocks, s) or None when this seam fails.
    """
    letters = _letters_with_heights(linear_items)
    if not letters:
        return None
    heights = [h for _, h in letters]
    lo, hi = min(heights), max(heights)
    if hi == lo:
        return None
    extremes = [j for j, h in enumerate(heights) if h in (lo, hi)]
    if heights[extremes[-1]] != lo:
        return None  # the final block a_m would miss its minimal letter
    first_hi = next(j for j, h in enumerate(heights) if h == hi)

    blocks: list[tuple[str, list[tuple[BaseElement, int]]]] = []
    c_block = letters[:first_hi]
    kind = "b"
    current: list[tuple[BaseElement, int]] = []
    for g, h in letters[first_hi:]:
        if kind == "b" and h == lo:
            blocks.append(("b", current))
            current = []
            kind = "a"
        elif kind == "a" and h == hi:
            blocks.append(("a", current))
            current = []
            kind = "b"
        current.append((g, h))
    blocks.append((kind, current))
    if blocks[-1][0] != "a":
        return None

    a_level = hi - 1
    s = hi - lo - 1

    def build(block, is_b):
        sylls = []
        for g, h in block:
            idx = (a_level + 1 - h) if is_b else (a_level - h)
            if not 0 <= idx <= s:
                raise NormalizationFailed("copy index out of range during rewriting")
            sylls.append((idx, g))
        elem = fp_from_syllables(sylls)
        if len(elem.syllables) != len(sylls):
            raise NormalizationFailed("unexpected cancellation inside a block")
        return elem

    c = build(c_block, is_b=False)
    a_blocks, b_blocks = [], []
    for kind, block in blocks:
        if kind == "b":
            b_blocks.append(build(block, is_b=True))
        else:
            a_blocks.append(build(block, is_b=False))
    if len(a_blocks) != len(b_blocks) or not a_blocks:
        return None
    return c, a_blocks, b_blocks, s


def normalize(p: RelatorPresentation) -> NormalizationResult:
    """Rewrite <G, t | w^k> into the pinch form, or detect G * <x>_k.

    Raises NotUnimodular for exponent sum != 1, TorsionBase for a
    torsion base group without the override, and NormalizationFailed
    if no seam yields data passing all machine checks (a bug, not an
    accepted outcome).
    """
    if not check_unimodular(p.w):
        raise NotUnimodular("cannot normalize a non-unimodular relator")
    if not p.base.is_torsion_free() and not p.allow_nonunimodular:
        raise TorsionBase("base group has torsion")

    core, _ = tword_cyclic_reduce(p.w)
    t_items = [it for it in core.items if isinstance(it, int)]
    h_items = [it for it in core.items if not isinstance(it, int)]
    if len(t_items) == 1 and len(h_items) <= 1:
        if h_items:
            syl = h_items[0].syllables
            g = syl[0][1] if len(syl) == 1 and syl[0][0] == 0 else None
            if g is None:
                raise NormalizationFailed("free product case with letters outside G^(0)")
            return FreeProductCase(g)
        return FreeProductCase(p.base.identity())

    items = core.items
    n = len(items)
    failures = []
    for j in range(n):
        if not isinstance(items[j], int):
            continue
        linear = items[j + 1:] + items[: j + 1]
        try:
            attempt = _try_seam(linear)
        except NormalizationFailed as exc:
            failures.append(str(exc))
            continue
        if attempt is None:
            continue
        c, a_blocks, b_blocks, s = attempt
        np = NormalizedPresentation(
            base=p.base,
            s=s,
            m=len(a_blocks) - 1,
            c=c,
            a=tuple(a_blocks),
            b=tuple(b_blocks),
            k=p.k,
            source_w=p.w,
        )
        report = check_conditions(np)
        if not (report.condition1 and report.condition2 and report.condition4):
            failures.append("conditions 1/2/4 failed: " + ";".join(report.condition2_detail))
            continue
        if p.base.is_torsion_free() and report.condition3 != "pass":
            failures.append("condition 3 not certified: " + ";".join(report.condition3_detail))
            continue
        witness = tword_conjugacy_witness(substitute_back(np.v, s), p.w)
        if witness is None:
            failures.append("back-substitution of v is not conjugate to w")
            continue
        return Normalized(NormalizedPresentation(
            base=np.base, s=np.s, m=np.m, c=np.c, a=np.a, b=np.b, k=np.k,
            source_w=p.w, back_witness=witness,
        ))
    raise NormalizationFailed(
        "height rewriting found no valid seam: " + (failures[0] if failures else "no seam candidates")
    )


# ---------------------------------------------------------------------------
# file formats


def base_to_json(base: BaseGroup) -> dict:
    out = {"kind": base.kind, "generators": list(base.generators)}
    if base.order is not None:
        out["order"] = base.order
    return out


def base_from_json(data: dict) -> BaseGroup:
    try:
        return BaseGroup(data["kind"], tuple(data["generators"]), data.get("order"))
    except (KeyError, TypeError) as exc:
        raise WordSyntaxError(f"bad base group record: {exc}") from exc


def presentation_to_json(p: RelatorPresentation) -> dict:
    out = {"base": base_to_json(p.base), "w": format_word(p.w, p.base), "k": p.k}
    if p.allow_nonunimodular:
        out["allow_nonunimodular"] = True
    return out


def presentation_from_json(data: dict) -> RelatorPresentation:
    base = base_from_json(data["base"])
    w = parse_word(data["w"], base)
    return RelatorPresentation(base, w, int(data["k"]), bool(data.get("allow_nonunimodular", False)))


def normalized_to_json(np: NormalizedPresentation) -> dict:
    base = np.base
    return {
        "base": base_to_json(base),
        "k": np.k,
        "s": np.s,
        "m": np.m,
        "c": format_fp(np.c, base),
        "a": [format_fp(x, base) for x in np.a],
        "b": [format_fp(x, base) for x in np.b],
        "v": format_word(np.v, base),
    }


def normalized_from_json(data: dict) -> NormalizedPresentation:
    base = base_from_json(data["base"])
    np = NormalizedPresentation(
        base=base,
        s=int(data["s"]),
        m=int(data["m"]),
        c=parse_fp(data["c"], base),
        a=tuple(parse_fp(x, base) for x in data["a"]),
        b=tuple(parse_fp(x, base) for x in data["b"]),
        k=int(data["k"]),
    )
    if "v" in data and parse_word(data["v"], base) != np.v:
        raise WordSyntaxError("stored relator v disagrees with the pinch data")
    return np


def load_presentation(path: str) -> Union[RelatorPresentation, NormalizedPresentation]:
    """Read a presentation file, auto-detecting the normalized form."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "s" in data:
        return normalized_from_json(data)
    return presentation_from_json(data)
