"""Words over H and a stable letter t, i.e. elements of H * <t>.

A ``TWord`` is a reduced alternating sequence of items, each item being
either a t-letter (the int +1 or -1) or a nontrivial ``FPElement``.
Reduced means: no two adjacent FPElement items, no adjacent t / t^-1
pair, and no identity FPElement item.

The word grammar used by every file format in this package:

* ``t`` and ``t^-1`` are the stable letter and its inverse,
* a base letter is ``name``, ``name^exp`` or ``name^exp@copy`` where
  ``@copy`` selects the factor copy G^(copy) and is omitted for copy 0,
* letters are joined with ``.``, the empty word is ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import StructureError, WordSyntaxError
from .groups import (
    BaseGroup,
    FPElement,
    base_from_letters,
    fp_conjugacy_witness,
    fp_from_syllables,
    fp_identity,
)

Item = Union[int, FPElement]


@dataclass(frozen=True)
class TWord:
    items: tuple[Item, ...] = ()

    def __post_init__(self):
        prev = None
        for it in self.items:
            if isinstance(it, int):
                if it not in (1, -1):
                    raise StructureError("t letters are +1 or -1")
                if isinstance(prev, int) and prev == -it:
                    raise StructureError("adjacent inverse t letters")
            else:
                if it.is_identity():
                    raise StructureError("identity h item in reduced word")
                if prev is not None and not isinstance(prev, int):
                    raise StructureError("adjacent h items in reduced word")
            prev = it

    def is_identity(self) -> bool:
        return not self.items

    def length(self) -> int:
        """Number of letters with H-elements counting one each."""
        return len(self.items)

    def gen_length(self) -> int:
        """Number of base-generator and t letters."""
        return sum(1 if isinstance(it, int) else it.length() for it in self.items)

    def __mul__(self, other: "TWord") -> "TWord":
        return tword_reduce(self.items + other.items)

    def inverse(self) -> "TWord":
        inv = tuple(-it if isinstance(it, int) else it.inverse() for it in reversed(self.items))
        return TWord(inv)

    def conjugate_by(self, q: "TWord") -> "TWord":
        return q.inverse() * self * q

    def __pow__(self, n: int) -> "TWord":
        if n < 0:
            return self.inverse() ** (-n)
        out = TWord()
        for _ in range(n):
            out = out * self
        return out

    def exponent_sum(self) -> int:
        return tword_exponent_sum(self)

    def base_group(self) -> BaseGroup | None:
        for it in self.items:
            if not isinstance(it, int):
                return it.base_group()
        return None

    def max_factor(self) -> int:
        return max((it.max_factor() for it in self.items if not isinstance(it, int)), default=-1)


def t_word(sign: int = 1) -> TWord:
    return TWord((1 if sign > 0 else -1,))


def h_word(h: FPElement) -> TWord:
    return TWord(()) if h.is_identity() else TWord((h,))


def tword_reduce(raw: Iterable[Item]) -> TWord:
    """Normal form in H * <t> of an arbitrary item sequence.

    Idempotent and length-nonincreasing; identity h items vanish,
    adjacent h items merge, and t t^-1 pairs cancel (cascading).
    """
    stack: list[Item] = []
    for it in raw:
        if isinstance(it, int):
            if stack and isinstance(stack[-1], int) and stack[-1] == -it:
                stack.pop()
            else:
                stack.append(it)
        else:
            if it.is_identity():
                continue
            if stack and not isinstance(stack[-1], int):
                merged = stack.pop() * it
                if not merged.is_identity():
                    stack.append(merged)
            else:
                stack.append(it)
    return TWord(tuple(stack))


def tword_exponent_sum(w: TWord) -> int:
    return sum(it for it in w.items if isinstance(it, int))


def _syllable_count(items: tuple[Item, ...]) -> int:
    count = 0
    prev_t = None
    for it in items:
        if isinstance(it, int):
            if prev_t != it:
                count += 1
            prev_t = it
        else:
            count += 1
            prev_t = None
    return count


def _item_key(it: Item):
    if isinstance(it, int):
        return (0,) if it == 1 else (1,)
    return (2, it.sort_key())


def tword_cyclic_reduce(w: TWord) -> tuple[TWord, TWord]:
    """Return (core, conj) with w = conj^-1 * core * conj.

    The core is cyclically reduced as a free product word: its first and
    last syllables lie in different factors (or it has at most one
    syllable), and it is put into the canonical rotation.
    """
    core = w
    conj = TWord()
    while True:
        items = core.items
        if len(items) < 2 or _syllable_count(items) < 2:
            break
        first, last = items[0], items[-1]
        same_factor = isinstance(first, int) == isinstance(last, int)
        if not same_factor:
            break
        rot = TWord((last,))
        core = tword_reduce((last,) + items[:-1])
        conj = rot * conj
    core, extra = _canonical_rotation(core)
    return core, extra * conj


def _canonical_rotation(core: TWord) -> tuple[TWord, TWord]:
    """Rotate a cyclically reduced word to its least form.

    Returns (canonical, rho) with canonical = rho * core * rho^-1 where
    rho is the inverse of the rotated-out prefix, so that
    core = rho^-1 * canonical * rho.
    """
    items = core.items
    if len(items) <= 1:
        return core, TWord()
    best = None
    best_r = 0
    for r in range(len(items)):
        rot = items[r:] + items[:r]
        key = tuple(_item_key(it) for it in rot)
        if best is None or key < best:
            best = key
            best_r = r
    canonical = TWord(items[best_r:] + items[:best_r])
    prefix = TWord(items[:best_r])
    return canonical, prefix.inverse()


def tword_conjugacy_witness(u: TWord, v: TWord) -> TWord | None:
    """Return q with v = q^-1 u q in H * <t>, or None if not conjugate."""
    cu, wu = tword_cyclic_reduce(u)
    cv, wv = tword_cyclic_reduce(v)
    nu, nv = _syllable_count(cu.items), _syllable_count(cv.items)
    if nu != nv:
        return None
    mid = None
    if nu == 0:
        mid = TWord()
    elif nu == 1:
        a, b = cu.items[0], cv.items[0]
        if isinstance(a, int) and isinstance(b, int):
            if cu.items == cv.items:
                mid = TWord()
        elif not isinstance(a, int) and not isinstance(b, int):
            r = fp_conjugacy_witness(a, b)
            if r is not None:
                mid = h_word(r)
    else:
        items = cu.items
        for r in range(len(items)):
            if items[r:] + items[:r] == cv.items:
                mid = TWord(items[:r])
                break
    if mid is None:
        return None
    q = wu.inverse() * mid * wv
    if u.conjugate_by(q) != v:
        raise AssertionError("t-word conjugacy witness verification failed")
    return q


def is_conjugate(u: TWord, v: TWord) -> bool:
    """Conjugacy in the free product H * <t>, via cyclic words."""
    return tword_conjugacy_witness(u, v) is not None


def substitute_back(x: TWord | FPElement, s: int) -> TWord:
    """Image under G^(i) -> t^-i g t^i, t -> t, reduced.

    Inverse of the height rewriting: kills every relator p^t p^-phi and
    carries the normalized relator back to a conjugate of the original.
    """
    if isinstance(x, FPElement):
        x = h_word(x)
    raw: list[Item] = []
    for it in x.items:
        if isinstance(it, int):
            raw.append(it)
            continue
        for i, g in it.syllables:
            if i > s:
                raise StructureError(f"factor index {i} exceeds s={s}")
            raw.extend([-1] * i)
            raw.append(FPElement(((0, g),)))
            raw.extend([1] * i)
    return tword_reduce(raw)


# ---------------------------------------------------------------------------
# serialization


def format_fp(h: FPElement, base: BaseGroup, s: int | None = None) -> str:
    if h.is_identity():
        return "1"
    parts = []
    for i, g in h.syllables:
        for gen, exp in g.syllables:
            tok = base.generators[gen]
            if exp != 1:
                tok += f"^{exp}"
            if i > 0:
                tok += f"@{i}"
            parts.append(tok)
    return ".".join(parts)


def format_word(w: TWord, base: BaseGroup, s: int | None = None) -> str:
    if w.is_identity():
        return "1"
    parts = []
    for it in w.items:
        if isinstance(it, int):
            parts.append("t" if it == 1 else "t^-1")
        else:
            parts.append(format_fp(it, base))
    return ".".join(parts)


def _parse_letter(token: str, base: BaseGroup) -> list[Item]:
    if token == "1":
        return []
    if token == "t":
        return [1]
    body, at, copy_part = token.partition("@")
    name, caret, exp_part = body.partition("^")
    if name == "t":
        if at or not caret:
            raise WordSyntaxError(f"bad t letter {token!r}")
        try:
            exp = int(exp_part)
        except ValueError as exc:
            raise WordSyntaxError(f"bad exponent in {token!r}") from exc
        return [1 if exp > 0 else -1] * abs(exp)
    if name not in base.generators:
        raise WordSyntaxError(f"unknown generator {name!r}")
    gen = base.generators.index(name)
    exp = 1
    if caret:
        try:
            exp = int(exp_part)
        except ValueError as exc:
            raise WordSyntaxError(f"bad exponent in {token!r}") from exc
    copy = 0
    if at:
        try:
            copy = int(copy_part)
        except ValueError as exc:
            raise WordSyntaxError(f"bad factor copy in {token!r}") from exc
        if copy < 0:
            raise WordSyntaxError(f"negative factor copy in {token!r}")
    g = base_from_letters(base, [(gen, exp)])
    if g.is_identity():
        return []
    return [FPElement(((copy, g),))]


def parse_word(text: str, base: BaseGroup) -> TWord:
    text = text.strip()
    if not text:
        raise WordSyntaxError("empty word string")
    if text == "1":
        return TWord()
    raw: list[Item] = []
    for token in text.split("."):
        token = token.strip()
        if not token:
            raise WordSyntaxError("empty letter between separators")
        raw.extend(_parse_letter(token, base))
    return tword_reduce(raw)


def parse_fp(text: str, base: BaseGroup) -> FPElement:
    w = parse_word(text, base)
    if any(isinstance(it, int) for it in w.items):
        raise WordSyntaxError("t letter in an H-element")
    if w.is_identity():
        return fp_identity()
    return w.items[0]


# ---------------------------------------------------------------------------
# shortlex enumeration of reduced words (used by the prover and tests)


def gen_alphabet(base: BaseGroup, s: int, include_t: bool = True) -> list[TWord]:
    """Single-letter words in shortlex letter order: t, t^-1, then the
    base generators and inverses of copy 0, copy 1, ..., copy s."""
    letters: list[TWord] = []
    if include_t:
        letters.append(t_word(1))
        letters.append(t_word(-1))
    for copy in range(s + 1):
        for gen in range(base.rank):
            for exp in _gen_exponents(base):
                g = base_from_letters(base, [(gen, exp)])
                letters.append(h_word(fp_from_syllables([(copy, g)])))
    return letters


def _gen_exponents(base: BaseGroup) -> list[int]:
    if base.kind == "finite_cyclic":
        return list(range(1, base.order))
    return [1, -1]


def shortlex_words(base: BaseGroup, s: int, max_len: int, include_t: bool = True) -> list[TWord]:
    """All reduced words of generator length <= max_len, shortlex order."""
    letters = gen_alphabet(base, s, include_t)
    out = [TWord()]
    layer = [TWord()]
    for n in range(1, max_len + 1):
        nxt = []
        for w in layer:
            for letter in letters:
                cand = w * letter
                if cand.gen_length() == n:
                    nxt.append(cand)
        seen = set()
        uniq = []
        for w in nxt:
            if w.items not in seen:
                seen.add(w.items)
                uniq.append(w)
        out.extend(uniq)
        layer = uniq
    return out
