"""Labelled sphere maps: t-labelled directed edges, H-labelled corners.

A diagram is stored face-first: each face is a cyclic boundary
alternating corner records and edge traversals, every edge is traversed
exactly twice with opposite directions, and exactly one face is marked
exterior.  Vertex rotations are derived from the traversal pairing, and
structural sphere conditions (orientation, connectivity, Euler
characteristic 2, one rotation cycle per vertex) are enforced at parse
time.  Label conditions against a presentation live in ``validate``.

The corner type of a corner is the pair of directions, relative to the
anticlockwise boundary walk, of the traversal arriving at it and the
traversal leaving it: ``++`` both with the arrows, ``--`` both against,
``+-`` both edges pointing at the vertex (all such at a vertex make it
a sink), ``-+`` both pointing away (a source).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DiagramError, NoSuchConjugate, WordSyntaxError
from .groups import BaseGroup, FPElement, fp_identity
from .presentation import NormalizedPresentation, RelatorPresentation, membership_in_P
from .words import (
    TWord,
    format_fp,
    h_word,
    parse_fp,
    t_word,
    tword_cyclic_reduce,
    tword_reduce,
)

EdgeId = Union[int, str]
FaceId = Union[int, str]


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    tail: Union[int, str]
    head: Union[int, str]


@dataclass(frozen=True)
class Corner:
    label: FPElement


@dataclass(frozen=True)
class Trav:
    edge: EdgeId
    dir: int  # +1 with the arrow, -1 against it

    def reverse(self) -> "Trav":
        return Trav(self.edge, -self.dir)


BoundaryItem = Union[Corner, Trav]


@dataclass(frozen=True)
class Face:
    id: FaceId
    exterior: bool
    boundary: tuple[BoundaryItem, ...]  # corner-first, alternating


CornerRef = tuple[FaceId, int]  # face id, even boundary index


class Diagram:
    """Oriented sphere map with derived rotation system."""

    def __init__(self, edges: Iterable[Edge], faces: Iterable[Face]):
        self.edges: dict[EdgeId, Edge] = {}
        for e in edges:
            if e.id in self.edges:
                raise DiagramError(f"duplicate edge id {e.id!r}")
            self.edges[e.id] = e
        self.faces: dict[FaceId, Face] = {}
        for f in faces:
            if f.id in self.faces:
                raise DiagramError(f"duplicate face id {f.id!r}")
            self.faces[f.id] = f
        self._check_boundaries()
        self._index_traversals()
        self._build_rotation()
        self._check_sphere()

    # -- structure ---------------------------------------------------------

    def _check_boundaries(self):
        exterior = [f.id for f in self.faces.values() if f.exterior]
        if len(exterior) != 1:
            raise DiagramError("exactly one exterior face required")
        self.exterior_face = exterior[0]
        for f in self.faces.values():
            if not f.boundary or len(f.boundary) % 2 != 0:
                raise DiagramError(f"face {f.id!r}: boundary must alternate corners and edges")
            for i, item in enumerate(f.boundary):
                want_corner = i % 2 == 0
                if want_corner != isinstance(item, Corner):
                    raise DiagramError(f"face {f.id!r}: boundary must alternate corners and edges")
                if isinstance(item, Trav) and item.edge not in self.edges:
                    raise DiagramError(f"face {f.id!r}: unknown edge {item.edge!r}")

    def _index_traversals(self):
        self.trav_pos: dict[tuple[EdgeId, int], tuple[FaceId, int]] = {}
        for f in self.faces.values():
            for i, item in enumerate(f.boundary):
                if isinstance(item, Trav):
                    key = (item.edge, item.dir)
                    if key in self.trav_pos:
                        raise DiagramError(
                            f"edge {item.edge!r} traversed twice in the same direction")
                    self.trav_pos[key] = (f.id, i)
        for e in self.edges.values():
            for d in (1, -1):
                if (e.id, d) not in self.trav_pos:
                    raise DiagramError(f"edge {e.id!r} missing its {d:+d} traversal")

    def trav_start(self, t: Trav):
        e = self.edges[t.edge]
        return e.tail if t.dir == 1 else e.head

    def trav_end(self, t: Trav):
        e = self.edges[t.edge]
        return e.head if t.dir == 1 else e.tail

    def corner_refs(self) -> list[CornerRef]:
        return [(f.id, i) for f in self.faces.values()
                for i in range(0, len(f.boundary), 2)]

    def corner_label(self, ref: CornerRef) -> FPElement:
        f, i = ref
        return self.faces[f].boundary[i].label

    def corner_in_trav(self, ref: CornerRef) -> Trav:
        f, i = ref
        b = self.faces[f].boundary
        return b[(i - 1) % len(b)]

    def corner_out_trav(self, ref: CornerRef) -> Trav:
        f, i = ref
        b = self.faces[f].boundary
        return b[(i + 1) % len(b)]

    def corner_vertex(self, ref: CornerRef):
        return self.trav_end(self.corner_in_trav(ref))

    def _build_rotation(self):
        for ref in self.corner_refs():
            if self.trav_end(self.corner_in_trav(ref)) != self.trav_start(self.corner_out_trav(ref)):
                f, i = ref
                raise DiagramError(
                    f"face {f!r} position {i}: traversal endpoints disagree at the corner")
        self.vertices = sorted({e.tail for e in self.edges.values()}
                               | {e.head for e in self.edges.values()}, key=str)
        # anticlockwise next: the corner before the reversal of the in-traversal
        self._ac_next: dict[CornerRef, CornerRef] = {}
        for ref in self.corner_refs():
            rev = self.corner_in_trav(ref).reverse()
            f2, p2 = self.trav_pos[(rev.edge, rev.dir)]
            b2 = self.faces[f2].boundary
            self._ac_next[ref] = (f2, (p2 - 1) % len(b2))
        # group corners into rotation cycles
        self.vertex_cycles: dict = {}
        seen = set()
        for ref in sorted(self.corner_refs(), key=lambda r: (str(r[0]), r[1])):
            if ref in seen:
                continue
            cycle = []
            cur = ref
            while cur not in seen:
                seen.add(cur)
                cycle.append(cur)
                cur = self._ac_next[cur]
            if cur != ref:
                raise DiagramError("corner rotation does not close into a cycle")
            v = self.corner_vertex(ref)
            if v in self.vertex_cycles:
                raise DiagramError(f"vertex {v!r} splits into several rotation cycles")
            if any(self.corner_vertex(r) != v for r in cycle):
                raise DiagramError("rotation cycle mixes vertices")
            self.vertex_cycles[v] = cycle

    def _check_sphere(self):
        if set(self.vertex_cycles) != set(self.vertices):
            raise DiagramError("vertices without corners")
        V, E, F = len(self.vertices), len(self.edges), len(self.faces)
        if V - E + F != 2:
            raise DiagramError(f"Euler characteristic {V - E + F} != 2")
        # connectivity of the 1-skeleton
        if self.edges:
            adj: dict = {}
            for e in self.edges.values():
                adj.setdefault(e.tail, set()).add(e.head)
                adj.setdefault(e.head, set()).add(e.tail)
            start = next(iter(adj))
            seen = {start}
            stack = [start]
            while stack:
                for nb in adj.get(stack.pop(), ()):
                    if nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            if seen != set(self.vertices):
                raise DiagramError("underlying map is not connected")

    # -- queries -----------------------------------------------------------

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def degree(self, v) -> int:
        return len(self.vertex_cycles[v])

    def corner_type(self, ref: CornerRef) -> str:
        din = "+" if self.corner_in_trav(ref).dir == 1 else "-"
        dout = "+" if self.corner_out_trav(ref).dir == 1 else "-"
        return din + dout

    def classify_vertex(self, v) -> str:
        types = {self.corner_type(ref) for ref in self.vertex_cycles[v]}
        if types == {"+-"}:
            return "sink"
        if types == {"-+"}:
            return "source"
        return "mixed"

    def face_word(self, fid: FaceId, start: int = 0) -> TWord:
        """Reduced boundary word read anticlockwise from the given index."""
        b = self.faces[fid].boundary
        raw = []
        for j in range(len(b)):
            item = b[(start + j) % len(b)]
            if isinstance(item, Corner):
                raw.extend(h_word(item.label).items)
            else:
                raw.append(item.dir)
        return tword_reduce(raw)

    def face_formal_items(self, fid: FaceId, start: int = 0) -> list:
        """Formal boundary letters from start: FPElements and t signs."""
        b = self.faces[fid].boundary
        out = []
        for j in range(len(b)):
            item = b[(start + j) % len(b)]
            out.append(item.label if isinstance(item, Corner) else item.dir)
        return out

    def exterior_edge_count(self) -> int:
        """Edge slots of the exterior boundary (doubly exterior edges count twice)."""
        return len(self.faces[self.exterior_face].boundary) // 2

    def vertex_on_exterior(self, v) -> bool:
        return any(ref[0] == self.exterior_face for ref in self.vertex_cycles[v])

    def edge_on_exterior(self, eid: EdgeId) -> bool:
        return any(self.trav_pos[(eid, d)][0] == self.exterior_face for d in (1, -1))


def vertex_label(d: Diagram, v) -> FPElement:
    """Product of the corner labels near v listed clockwise, canonical
    rotation.  Clockwise is the reverse of the stored rotation cycles:
    that is the order in which a face boundary sweeps merged corners, so
    it is the order under which face-merging identities close up.

    The result is defined up to conjugation; triviality does not depend
    on the starting corner.
    """
    cycle = d.vertex_cycles[v]
    labels = [d.corner_label(ref) for ref in reversed(cycle)]
    best = None
    for r in range(len(labels)):
        prod = fp_identity()
        for x in labels[r:] + labels[:r]:
            prod = prod * x
        if best is None or prod.sort_key() < best.sort_key():
            best = prod
    return best


def face_label(d: Diagram, fid: FaceId) -> TWord:
    """Boundary word of a face, canonical cyclic form."""
    core, _ = tword_cyclic_reduce(d.face_word(fid))
    return core


# ---------------------------------------------------------------------------
# validation against a presentation


@dataclass(frozen=True)
class FaceClass:
    face: FaceId
    kind: str           # "phi" | "kcell" | "exterior" | "invalid"
    sign: int = 0       # k-cells only
    p: FPElement | None = None  # phi-cells only
    reason: str = ""


@dataclass(frozen=True)
class ValidationReport:
    vertex_ok: tuple[tuple[object, bool], ...]
    face_classes: tuple[FaceClass, ...]
    reducible_pairs: tuple[tuple[EdgeId, FaceId, FaceId], ...]
    phi_reduced: bool
    euler_ok: bool
    oriented_ok: bool
    connected_ok: bool
    exterior_unique: bool

    @property
    def valid(self) -> bool:
        return (self.euler_ok and self.oriented_ok and self.connected_ok
                and self.exterior_unique
                and all(ok for _, ok in self.vertex_ok)
                and all(fc.kind != "invalid" for fc in self.face_classes))

    def kind_of(self, fid: FaceId) -> FaceClass:
        for fc in self.face_classes:
            if fc.face == fid:
                return fc
        raise KeyError(fid)


def _relator_data(pres: Union[NormalizedPresentation, RelatorPresentation]):
    """Return (v, k, s, phi_allowed) for either presentation flavour."""
    if isinstance(pres, NormalizedPresentation):
        return pres.v, pres.k, pres.s, True
    return pres.w, pres.k, 0, False


def _classify_face(d: Diagram, fid: FaceId, pres) -> FaceClass:
    v, k, s, phi_allowed = _relator_data(pres)
    core = face_label(d, fid)
    canon_pos, _ = tword_cyclic_reduce(v ** k)
    canon_neg, _ = tword_cyclic_reduce(v.inverse() ** k)
    if core == canon_pos:
        return FaceClass(fid, "kcell", sign=+1)
    if core == canon_neg:
        return FaceClass(fid, "kcell", sign=-1)
    if phi_allowed and len(core.items) == 4:
        items = core.items
        for r in range(4):
            rot = items[r:] + items[:r]
            if (rot[0] == -1 and isinstance(rot[1], FPElement)
                    and rot[2] == 1 and isinstance(rot[3], FPElement)):
                p, q = rot[1], rot[3]
                if p.is_identity():
                    return FaceClass(fid, "invalid", reason="phi cell with trivial p")
                if p.max_factor() > s or not membership_in_P(p, "P", s):
                    return FaceClass(fid, "invalid", reason="phi cell with p outside P")
                if q != p.shift(1).inverse():
                    return FaceClass(fid, "invalid", reason="phi cell label mismatch")
                return FaceClass(fid, "phi", p=p)
    return FaceClass(fid, "invalid", reason="label is no relator power")


def find_reducible_pairs(d: Diagram) -> list[tuple[EdgeId, FaceId, FaceId]]:
    """Edges whose two interior sides carry mutually inverse labels."""
    out = []
    for eid in d.edges:
        (f1, p1) = d.trav_pos[(eid, 1)]
        (f2, p2) = d.trav_pos[(eid, -1)]
        if f1 == f2 or d.faces[f1].exterior or d.faces[f2].exterior:
            continue
        w1 = d.face_formal_items(f1, p1)
        w2 = d.face_formal_items(f2, p2)
        if len(w1) != len(w2):
            continue
        inv_first = -w1[0]
        rest = [(-x if isinstance(x, int) else x.inverse()) for x in w1[:0:-1]]
        if w2 == [inv_first] + rest:
            out.append((eid, f1, f2))
    return out


def is_phi_reduced(d: Diagram, pres=None) -> bool:
    """Reduced, and no two distinct phi-cells share an edge."""
    if find_reducible_pairs(d):
        return False
    phi_faces = set()
    for f in d.faces.values():
        if f.exterior:
            continue
        if pres is not None:
            if _classify_face(d, f.id, pres).kind == "phi":
                phi_faces.add(f.id)
        else:
            core = face_label(d, f.id)
            items = core.items
            if len(items) == 4:
                for r in range(4):
                    rot = items[r:] + items[:r]
                    if (rot[0] == -1 and isinstance(rot[1], FPElement) and rot[2] == 1
                            and isinstance(rot[3], FPElement)
                            and rot[3] == rot[1].shift(1).inverse()):
                        phi_faces.add(f.id)
    for eid in d.edges:
        f1 = d.trav_pos[(eid, 1)][0]
        f2 = d.trav_pos[(eid, -1)][0]
        if f1 != f2 and f1 in phi_faces and f2 in phi_faces:
            return False
    return True


def validate(d: Diagram, pres) -> ValidationReport:
    """Check every Howie condition of the diagram against a presentation."""
    vertex_ok = tuple((v, vertex_label(d, v).is_identity()) for v in d.vertices)
    classes = []
    for f in d.faces.values():
        if f.exterior:
            classes.append(FaceClass(f.id, "exterior"))
        else:
            classes.append(_classify_face(d, f.id, pres))
    pairs = tuple(find_reducible_pairs(d))
    return ValidationReport(
        vertex_ok=vertex_ok,
        face_classes=tuple(classes),
        reducible_pairs=pairs,
        phi_reduced=is_phi_reduced(d, pres),
        euler_ok=d.euler_characteristic() == 2,
        oriented_ok=True,   # enforced structurally at parse
        connected_ok=True,  # enforced structurally at parse
        exterior_unique=True,
    )


# ---------------------------------------------------------------------------
# boundary corner preparation (word level)


def _linear_corner_patterns(word: TWord) -> tuple[bool, bool]:
    """Scan a linear word for (++) and (--) corner patterns.

    A (++) corner is a subword t g t with g a single H letter or nothing;
    symmetrically for (--).
    """
    items = word.items
    has_pp = has_mm = False
    for i, it in enumerate(items):
        if not isinstance(it, int):
            continue
        if i + 1 < len(items) and items[i + 1] == it:
            has_pp |= it == 1
            has_mm |= it == -1
        if i + 2 < len(items) and not isinstance(items[i + 1], int) and items[i + 2] == it:
            has_pp |= it == 1
            has_mm |= it == -1
    return has_pp, has_mm


def ensure_exterior_corners(u: TWord, m: int) -> tuple[TWord, int]:
    """Conjugate u by t^n so the word shows both stop corner shapes.

    For m = 0 the standard motion parks nowhere and u is returned as is.
    The scan is bounded by the length of u; beyond that the failure is
    reported, not guessed.
    """
    if m == 0:
        return u, 0
    bound = max(u.length(), 2)
    for n in range(0, bound + 1):
        conj = (t_word(-1) ** n) * u * (t_word(1) ** n)
        has_pp, has_mm = _linear_corner_patterns(conj)
        if has_pp and has_mm:
            return conj, n
    raise NoSuchConjugate(f"no n <= {bound} produces both (++) and (--) corners")


# ---------------------------------------------------------------------------
# file format


def parse_diagram(text: str, base: BaseGroup) -> Diagram:
    """Read the JSON diagram format; structural checks run in the constructor."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"bad JSON: {exc}") from exc
    try:
        edges = [Edge(e["id"], e["tail"], e["head"]) for e in data["edges"]]
        faces = []
        for f in data["faces"]:
            items: list[BoundaryItem] = []
            for rec in f["boundary"]:
                if "corner" in rec:
                    items.append(Corner(parse_fp(rec["corner"], base)))
                elif "edge" in rec:
                    if rec["dir"] not in ("+", "-"):
                        raise DiagramError(f"bad direction {rec['dir']!r}")
                    items.append(Trav(rec["edge"], 1 if rec["dir"] == "+" else -1))
                else:
                    raise DiagramError(f"bad boundary record {rec!r}")
            if items and isinstance(items[0], Trav):
                # rotate to corner-first storage
                for j, item in enumerate(items):
                    if isinstance(item, Corner):
                        items = items[j:] + items[:j]
                        break
            faces.append(Face(f["id"], bool(f.get("exterior", False)), tuple(items)))
    except (KeyError, TypeError, WordSyntaxError) as exc:
        raise DiagramError(f"malformed diagram: {exc}") from exc
    return Diagram(edges, faces)


def serialize_diagram(d: Diagram, base: BaseGroup) -> str:
    data = {
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in d.edges.values()],
        "faces": [
            {
                "id": f.id,
                "exterior": f.exterior,
                "boundary": [
                    {"corner": format_fp(item.label, base)} if isinstance(item, Corner)
                    else {"edge": item.edge, "dir": "+" if item.dir == 1 else "-"}
                    for item in f.boundary
                ],
            }
            for f in d.faces.values()
        ],
    }
    return json.dumps(data, indent=1, sort_keys=False)
