"""Base groups and finite free products of copies of one base group.

Three base group kinds are supported: free of finite rank, infinite
cyclic, and finite cyclic of order n >= 2.  The free and infinite-cyclic
kinds are torsion free; the finite cyclic kind exists only to exercise
torsion phenomena and is flagged accordingly.

Elements are immutable and always in normal form:

* ``BaseElement`` stores a reduced syllable word ((gen, exp), ...); the
  cyclic kinds have a single generator, and the finite kind keeps its
  exponent reduced into [1, n).
* ``FPElement`` stores an alternating word of (factor, BaseElement)
  syllables over copies G^(0), G^(1), ... of the base group; the empty
  word is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StructureError

FREE = "free"
INF_CYCLIC = "infinite_cyclic"
FIN_CYCLIC = "finite_cyclic"

_KINDS = (FREE, INF_CYCLIC, FIN_CYCLIC)


@dataclass(frozen=True)
class BaseGroup:
    kind: str
    generators: tuple[str, ...]
    order: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise StructureError(f"unknown base group kind {self.kind!r}")
        if not self.generators:
            raise StructureError("base group needs at least one generator")
        if len(set(self.generators)) != len(self.generators):
            raise StructureError("duplicate generator names")
        if self.kind == FREE:
            if self.order is not None:
                raise StructureError("free groups carry no order")
        elif self.kind == INF_CYCLIC:
            if len(self.generators) != 1 or self.order is not None:
                raise StructureError("infinite cyclic group has one generator and no order")
        else:
            if len(self.generators) != 1:
                raise StructureError("finite cyclic group has one generator")
            if self.order is None or self.order < 2:
                raise StructureError("finite cyclic order must be >= 2")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def is_torsion_free(self) -> bool:
        return self.kind != FIN_CYCLIC

    def identity(self) -> "BaseElement":
        return BaseElement(self, ())

    def generator(self, index: int = 0, exp: int = 1) -> "BaseElement":
        if not 0 <= index < self.rank:
            raise StructureError(f"no generator with index {index}")
        return base_from_letters(self, [(index, exp)])


def _norm_exp(group: BaseGroup, exp: int) -> int:
    if group.kind == FIN_CYCLIC:
        return exp % group.order
    return exp


@dataclass(frozen=True)
class BaseElement:
    """Normal-form element of a base group."""

    group: BaseGroup
    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        for g, e in self.syllables:
            if not 0 <= g < self.group.rank:
                raise StructureError(f"generator index {g} out of range")
            if e == 0:
                raise StructureError("zero syllable in base element")
            if self.group.kind == FIN_CYCLIC and not 0 < e < self.group.order:
                raise StructureError("finite cyclic exponent not reduced")
        for (g1, _), (g2, _) in zip(self.syllables, self.syllables[1:]):
            if g1 == g2:
                raise StructureError("adjacent syllables share a generator")
        if self.group.kind != FREE and len(self.syllables) > 1:
            raise StructureError("cyclic group element has one syllable")

    def is_identity(self) -> bool:
        return not self.syllables

    def __mul__(self, other: "BaseElement") -> "BaseElement":
        if self.group != other.group:
            raise StructureError("elements of different base groups")
        out = list(self.syllables)
        for g, e in other.syllables:
            if out and out[-1][0] == g:
                merged = _norm_exp(self.group, out[-1][1] + e)
                out.pop()
                if merged:
                    out.append((g, merged))
            else:
                out.append((g, e))
        return BaseElement(self.group, tuple(out))

    def inverse(self) -> "BaseElement":
        inv = tuple((g, _norm_exp(self.group, -e)) for g, e in reversed(self.syllables))
        return BaseElement(self.group, inv)

    def letters(self) -> list[tuple[int, int]]:
        """Flatten into unit letters (gen, +1/-1); finite cyclic keeps its residue."""
        if self.group.kind == FIN_CYCLIC:
            return list(self.syllables)
        out = []
        for g, e in self.syllables:
            step = 1 if e > 0 else -1
            out.extend([(g, step)] * abs(e))
        return out

    def length(self) -> int:
        if self.group.kind == FIN_CYCLIC:
            return len(self.syllables)
        return sum(abs(e) for _, e in self.syllables)

    def has_infinite_order(self) -> bool:
        if self.is_identity():
            return False
        return self.group.is_torsion_free()

    def sort_key(self):
        return tuple((g, 0 if e > 0 else 1, abs(e)) for g, e in self.syllables)


def base_from_letters(group: BaseGroup, letters) -> BaseElement:
    """Multiply out raw (gen, exp) pairs with free/mod-n reduction."""
    out = group.identity()
    for g, e in letters:
        e = _norm_exp(group, e)
        if e:
            out = out * BaseElement(group, ((g, e),))
    return out


def base_conjugacy_witness(x: BaseElement, y: BaseElement) -> BaseElement | None:
    """Return r with y = r^-1 x r in the base group, or None.

    Cyclic kinds are abelian, so conjugacy is equality; the free kind
    uses the cyclic-word criterion.
    """
    if x.group != y.group:
        raise StructureError("elements of different base groups")
    group = x.group
    if group.kind != FREE:
        return group.identity() if x == y else None

    def strip(letters):
        # w = c^-1 core c where c is the product of stripped last letters,
        # newest on the left.
        core = list(letters)
        conj = []
        while len(core) >= 2 and core[0] == (core[-1][0], -core[-1][1]):
            conj.insert(0, core.pop())
            core = core[1:]
        return core, conj

    cx, wx = strip(x.letters())
    cy, wy = strip(y.letters())
    if len(cx) != len(cy):
        return None
    rot = None
    if not cx:
        rot = []
    else:
        for r in range(len(cx)):
            if cx[r:] + cx[:r] == cy:
                rot = cx[:r]
                break
    if rot is None:
        return None
    # y = q^-1 x q with q = wx^-1 rot wy.
    inv = lambda ls: [(g, -e) for g, e in reversed(ls)]
    q = base_from_letters(group, inv(wx) + rot + wy)
    if q.inverse() * x * q != y:
        raise AssertionError("conjugacy witness verification failed")
    return q


@dataclass(frozen=True)
class FPElement:
    """Element of the free product G^(0) * ... * G^(s) in normal form."""

    syllables: tuple[tuple[int, BaseElement], ...] = ()

    def __post_init__(self):
        for i, g in self.syllables:
            if i < 0:
                raise StructureError("negative factor index")
            if g.is_identity():
                raise StructureError("identity syllable in free product word")
        for (i1, _), (i2, _) in zip(self.syllables, self.syllables[1:]):
            if i1 == i2:
                raise StructureError("adjacent syllables in the same factor")
        groups = {g.group for _, g in self.syllables}
        if len(groups) > 1:
            raise StructureError("syllables over different base groups")

    def is_identity(self) -> bool:
        return not self.syllables

    def base_group(self) -> BaseGroup | None:
        return self.syllables[0][1].group if self.syllables else None

    def max_factor(self) -> int:
        return max((i for i, _ in self.syllables), default=-1)

    def __mul__(self, other: "FPElement") -> "FPElement":
        return fp_multiply(self, other)

    def inverse(self) -> "FPElement":
        return FPElement(tuple((i, g.inverse()) for i, g in reversed(self.syllables)))

    def shift(self, offset: int) -> "FPElement":
        return FPElement(tuple((i + offset, g) for i, g in self.syllables))

    def length(self) -> int:
        return sum(g.length() for _, g in self.syllables)

    def has_infinite_order(self) -> bool:
        """True unless trivial or conjugate into a torsion factor."""
        if self.is_identity():
            return False
        core, _ = fp_cyclic_reduce(self)
        if len(core) >= 2:
            return True
        return core[0][1].has_infinite_order()

    def sort_key(self):
        return tuple((i, g.sort_key()) for i, g in self.syllables)


def fp_identity() -> FPElement:
    return FPElement(())


def fp_from_syllables(pairs) -> FPElement:
    """Multiply out raw (factor, BaseElement) pairs, reducing as needed."""
    out = fp_identity()
    for i, g in pairs:
        if not g.is_identity():
            out = fp_multiply(out, FPElement(((i, g),)))
    return out


def fp_multiply(x: FPElement, y: FPElement) -> FPElement:
    """Product in the free product, in normal form."""
    gx, gy = x.base_group(), y.base_group()
    if gx is not None and gy is not None and gx != gy:
        raise StructureError("free product elements over different base groups")
    out = list(x.syllables)
    for i, g in y.syllables:
        if out and out[-1][0] == i:
            merged = out[-1][1] * g
            out.pop()
            if not merged.is_identity():
                out.append((i, merged))
        else:
            out.append((i, g))
    return FPElement(tuple(out))


def fp_cyclic_reduce(x: FPElement) -> tuple[tuple[tuple[int, BaseElement], ...], FPElement]:
    """Return (core syllables, c) with x = c^-1 * core * c, core cyclically reduced."""
    core = FPElement(x.syllables)
    conj = fp_identity()
    while len(core.syllables) >= 2 and core.syllables[0][0] == core.syllables[-1][0]:
        last = FPElement((core.syllables[-1],))
        core = fp_multiply(last, FPElement(core.syllables[:-1]))
        conj = fp_multiply(last, conj)
    return core.syllables, conj


def fp_conjugacy_witness(x: FPElement, y: FPElement) -> FPElement | None:
    """Return q with y = q^-1 x q in the free product, or None."""
    cx, wx = fp_cyclic_reduce(x)
    cy, wy = fp_cyclic_reduce(y)
    if len(cx) != len(cy):
        return None
    mid = None
    if not cx:
        mid = fp_identity()
    elif len(cx) == 1:
        (i1, g1), (i2, g2) = cx[0], cy[0]
        if i1 == i2:
            r = base_conjugacy_witness(g1, g2)
            if r is not None:
                mid = fp_from_syllables([(i1, r)])
    else:
        for r in range(len(cx)):
            if cx[r:] + cx[:r] == cy:
                mid = FPElement(tuple(cx[:r]))
                break
    if mid is None:
        return None
    # x = wx^-1 core_x wx and core_y = mid^-1 core_x mid, so
    # y = q^-1 x q with q = wx^-1 mid wy.
    q = wx.inverse() * mid * wy
    if q.inverse() * x * q != y:
        raise AssertionError("free product conjugacy witness verification failed")
    return q


def fp_is_conjugate(x: FPElement, y: FPElement) -> bool:
    return fp_conjugacy_witness(x, y) is not None
