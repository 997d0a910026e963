"""The standard multiple motion and exact collision counting.

Cars traverse face boundaries anticlockwise with the published
timetables: a phi-cell car circles in period 2 sitting at its (+-)
corner at even moments; each of the k cars of a k-cell covers one
relator period per period 4m+2, parking at the (++) corner on
[2m+2, 4m+1] (positive cells) or at the (--) corner on [1, 2m]
(negative cells, mirrored), with the m = 0 cells running nonstop at
speeds 2 and 1; the single exterior car parks at one designated (--)
and one designated (++) corner on the same windows and crosses each
complementary arc in time 2.

All times and positions are Fractions; collision points are found by
solving the linear meeting equations segment pair by segment pair, so
the counts are exact and platform independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import ScheduleError
from .diagram import Diagram, FaceId, validate
from .presentation import NormalizedPresentation

Frac = Fraction


@dataclass(frozen=True)
class Segment:
    start: Frac
    end: Frac
    kind: str  # "park" | "move"
    pos: int   # boundary index: even corner index for parks, odd trav index for moves

    def __post_init__(self):
        if self.end <= self.start:
            raise ScheduleError("degenerate segment")


@dataclass(frozen=True)
class Schedule:
    face: FaceId
    multiplicity: int
    period: Frac
    cars: tuple[tuple[Segment, ...], ...]

    def chain_start(self, j: int) -> Frac:
        return self.cars[j][0].start

    def position(self, boundary_len: int, j: int, t: Frac):
        """Location of car j at time t: ("corner", pos) or ("edge", pos, coord).

        Satisfies the defining periodicity position(j, t + T) ==
        position(j + 1 mod d, t).
        """
        t = Frac(t)
        t0 = self.chain_start(j)
        q = (t - t0) // self.period
        r = t - q * self.period
        car = self.cars[(j + int(q)) % self.multiplicity]
        for seg in car:
            if seg.start < r < seg.end:
                if seg.kind == "park":
                    return ("corner", seg.pos)
                coord = (r - seg.start) / (seg.end - seg.start)
                return ("edge", seg.pos, coord)
            if r == seg.start:
                if seg.kind == "park":
                    return ("corner", seg.pos)
                return ("corner", (seg.pos - 1) % boundary_len)
        raise AssertionError("time not covered by the car chain")


@dataclass(frozen=True)
class CollisionEvent:
    kind: str            # "vertex" | "edge"
    location: object     # vertex id, or (edge id, Fraction coordinate)
    time: Frac
    cars: int
    multiplicity: int
    complete: bool
    cls: str             # "interior" | "exterior"


@dataclass(frozen=True)
class CollisionReport:
    events: tuple[CollisionEvent, ...]
    complete_points: int
    bound: int
    multiplicities: tuple[int, ...]
    common_period: Frac
    exterior_edge_over_one: bool  # True if some exterior edge hosts > 1 complete point

    def complete_locations(self):
        return sorted({(e.kind, str(e.location)) for e in self.events if e.complete})


# ---------------------------------------------------------------------------
# schedule construction


def _align_pattern(d: Diagram, fid: FaceId, pattern) -> list[int]:
    """Boundary offsets (corner indices) where the formal pattern matches."""
    b = d.faces[fid].boundary
    n2 = len(b)
    if n2 != 2 * len(pattern):
        return []
    hits = []
    for off in range(0, n2, 2):
        ok = True
        for j, (label, sgn) in enumerate(pattern):
            corner = b[(off + 2 * j) % n2]
            trav = b[(off + 2 * j + 1) % n2]
            if corner.label != label or trav.dir != sgn:
                ok = False
                break
        if ok:
            hits.append(off)
    return hits


def _chain(times_positions) -> tuple[Segment, ...]:
    return tuple(Segment(Frac(a), Frac(b), kind, pos) for a, b, kind, pos in times_positions)


def _kcell_schedule(d: Diagram, fid: FaceId, np: NormalizedPresentation, sign: int) -> Schedule:
    pattern = np.kcell_pattern(sign) * np.k
    period_len = 2 * np.m + 3
    offsets = _align_pattern(d, fid, pattern)
    if not offsets:
        raise ScheduleError(f"face {fid!r}: cannot align the k-cell pattern")
    n2 = len(d.faces[fid].boundary)
    m, k = np.m, np.k
    T = 4 * m + 2
    # pattern index of the car start corner b_0 (resp. b_0^-1)
    start_idx = 1 if sign > 0 else 2 * m + 1
    starts = sorted({(off + 2 * start_idx) % n2 for off in offsets})
    if len(starts) != k:
        raise ScheduleError(f"face {fid!r}: found {len(starts)} car arcs, expected {k}")
    cars = []
    for p0 in starts:
        trav = lambda r: (p0 + 2 * r + 1) % n2
        segs = []
        if m > 0 and sign > 0:
            for r in range(2 * m + 2):
                segs.append((r, r + 1, "move", trav(r)))
            segs.append((2 * m + 2, 4 * m + 1, "park", (p0 + 2 * (2 * m + 2)) % n2))
            segs.append((4 * m + 1, 4 * m + 2, "move", trav(2 * m + 2)))
        elif m > 0 and sign < 0:
            segs.append((0, 1, "move", trav(0)))
            segs.append((1, 2 * m, "park", (p0 + 2) % n2))
            segs.append((2 * m, 2 * m + 1, "move", trav(1)))
            for r in range(2 * m + 1):
                segs.append((2 * m + 1 + r, 2 * m + 2 + r, "move", trav(2 + r)))
        elif sign > 0:
            segs.append((0, 1, "move", trav(0)))
            segs.append((1, Frac(3, 2), "move", trav(1)))
            segs.append((Frac(3, 2), 2, "move", trav(2)))
        else:
            segs.append((0, Frac(1, 2), "move", trav(0)))
            segs.append((Frac(1, 2), 1, "move", trav(1)))
            segs.append((1, 2, "move", trav(2)))
        cars.append(_chain(segs))
    assert period_len * k * 2 == n2
    return Schedule(fid, k, Frac(T), tuple(cars))


def _phi_schedule(d: Diagram, fid: FaceId) -> Schedule:
    b = d.faces[fid].boundary
    if len(b) != 4:
        raise ScheduleError(f"face {fid!r}: phi cell must be a bigon")
    start = None
    for pos in (0, 2):
        if d.corner_type((fid, pos)) == "+-":
            start = pos
            break
    if start is None:
        raise ScheduleError(f"face {fid!r}: phi cell has no (+-) corner")
    segs = _chain([
        (0, 1, "move", (start + 1) % 4),
        (1, 2, "move", (start + 3) % 4),
    ])
    return Schedule(fid, 1, Frac(2), (segs,))


def _exterior_schedule(d: Diagram, np: NormalizedPresentation) -> Schedule:
    fid = d.exterior_face
    b = d.faces[fid].boundary
    n2 = len(b)
    f_edges = n2 // 2
    m = np.m
    if m == 0:
        T = Frac(2)
        step = Frac(2, f_edges)
        segs = [(i * step, (i + 1) * step, "move", 2 * i + 1) for i in range(f_edges)]
        return Schedule(fid, 1, T, (_chain(segs),))
    pmm = ppp = None
    for pos in range(0, n2, 2):
        typ = d.corner_type((fid, pos))
        if typ == "--" and pmm is None:
            pmm = pos
        if typ == "++" and ppp is None:
            ppp = pos
    if pmm is None or ppp is None:
        raise ScheduleError("exterior face lacks a designated (--) or (++) corner")
    # walk pmm -> ppp -> pmm anticlockwise
    arc1 = []
    pos = pmm
    while pos != ppp:
        arc1.append((pos + 1) % n2)
        pos = (pos + 2) % n2
    arc2 = []
    while pos != pmm:
        arc2.append((pos + 1) % n2)
        pos = (pos + 2) % n2
    T = Frac(4 * m + 2)
    segs = [(Frac(1), Frac(2 * m), "park", pmm)]
    step1 = Frac(2, len(arc1))
    for i, tp in enumerate(arc1):
        segs.append((2 * m + i * step1, 2 * m + (i + 1) * step1, "move", tp))
    segs.append((Frac(2 * m + 2), Frac(4 * m + 1), "park", ppp))
    step2 = Frac(2, len(arc2))
    for i, tp in enumerate(arc2):
        segs.append((4 * m + 1 + i * step2, 4 * m + 1 + (i + 1) * step2, "move", tp))
    return Schedule(fid, 1, T, (_chain(segs),))


def build_standard_schedules(d: Diagram, np: NormalizedPresentation) -> list[Schedule]:
    """One schedule per face, following the published timetables."""
    report = validate(d, np)
    if not report.valid:
        raise ScheduleError("diagram is not valid over the presentation")
    out = []
    for fc in report.face_classes:
        if fc.kind == "exterior":
            out.append(_exterior_schedule(d, np))
        elif fc.kind == "phi":
            out.append(_phi_schedule(d, fc.face))
        elif fc.kind == "kcell":
            out.append(_kcell_schedule(d, fc.face, np, fc.sign))
        else:
            raise ScheduleError(f"face {fc.face!r}: class unknown")
    return out


# ---------------------------------------------------------------------------
# occupancy and collision detection


@dataclass
class _Occupancy:
    intervals: list  # (a, b) closed, within [0, Tc]
    instants: list   # times


def _fold(a: Frac, length: Frac, Tc: Frac):
    """Return pieces of [a, a+length] reduced mod Tc as (start, end, offset).

    offset is the time shift applied (t_orig = t_folded + offset), so a
    linear function of original time can be re-expressed on each piece.
    """
    a0 = a % Tc
    shift = a0 - a
    end = a0 + length
    if end <= Tc:
        return [(a0, end, -shift)]
    return [(a0, Tc, -shift), (Frac(0), end - Tc, -shift + Tc)]


def _corner_after(d: Diagram, fid: FaceId, trav_pos: int) -> int:
    return (trav_pos + 1) % len(d.faces[fid].boundary)


def _junction_corners(d: Diagram, sched: Schedule, car: tuple[Segment, ...]):
    """Instant corner visits of one car chain: (time, corner pos) pairs.

    Park intervals already cover their endpoints, so only junctions
    between move segments (and the chain wrap) yield new instants.
    """
    n = len(car)
    out = []
    for i, seg in enumerate(car):
        nxt = car[(i + 1) % n]
        t = seg.end
        if seg.kind == "move":
            pos = _corner_after(d, sched.face, seg.pos)
            if nxt.kind == "park":
                continue  # the park covers the arrival instant
            out.append((t, pos))
    return out


class _Simulator:
    def __init__(self, d: Diagram, schedules: list[Schedule]):
        self.d = d
        self.schedules = schedules
        for s in schedules:
            if s.period.denominator != 1:
                raise ScheduleError("non-integer period")
        self.Tc = Frac(lcm(*[int(s.period) for s in schedules])) if schedules else Frac(1)
        self._build_crossings()
        self._build_occupancy()

    def _build_crossings(self):
        """Per traversal slot: (t0, t1, coord0, coord1) in arrow coordinates."""
        self.crossings: dict[tuple, list] = {}
        for sched in self.schedules:
            reps = int(self.Tc / sched.period)
            for car in sched.cars:
                for seg in car:
                    if seg.kind != "move":
                        continue
                    trav = self.d.faces[sched.face].boundary[seg.pos]
                    c0, c1 = (Frac(0), Frac(1)) if trav.dir == 1 else (Frac(1), Frac(0))
                    for q in range(reps):
                        a = seg.start + q * sched.period
                        for (fa, fb, off) in _fold(a, seg.end - seg.start, self.Tc):
                            # coord as linear function over [fa, fb]
                            dur = seg.end - seg.start
                            la = (fa + off - a) / dur
                            lb = (fb + off - a) / dur
                            ca = c0 + (c1 - c0) * la
                            cb = c0 + (c1 - c0) * lb
                            key = (trav.edge, trav.dir)
                            self.crossings.setdefault(key, []).append((fa, fb, ca, cb))

    def _build_occupancy(self):
        self.occ: dict[tuple, _Occupancy] = {}
        for sched in self.schedules:
            reps = int(self.Tc / sched.period)
            for car in sched.cars:
                for seg in car:
                    if seg.kind != "park":
                        continue
                    for q in range(reps):
                        a = seg.start + q * sched.period
                        for (fa, fb, _off) in _fold(a, seg.end - seg.start, self.Tc):
                            occ = self.occ.setdefault((sched.face, seg.pos), _Occupancy([], []))
                            occ.intervals.append((fa, fb))
                for (t, pos) in _junction_corners(self.d, sched, car):
                    for q in range(reps):
                        tt = (t + q * sched.period) % self.Tc
                        occ = self.occ.setdefault((sched.face, pos), _Occupancy([], []))
                        occ.instants.append(tt)

    def edge_events(self):
        events = []
        for eid in self.d.edges:
            side_a = self.crossings.get((eid, 1), [])
            side_b = self.crossings.get((eid, -1), [])
            cls = "exterior" if self.d.edge_on_exterior(eid) else "interior"
            for (a0, a1, ca0, ca1) in side_a:
                for (b0, b1, cb0, cb1) in side_b:
                    lo, hi = max(a0, b0), min(a1, b1)
                    if hi < lo:
                        continue
                    # coord_a(t) = ca0 + va (t - a0), coord_b likewise
                    va = (ca1 - ca0) / (a1 - a0)
                    vb = (cb1 - cb0) / (b1 - b0)
                    denom = va - vb
                    if denom == 0:
                        continue
                    tstar = (cb0 - vb * b0 - ca0 + va * a0) / denom
                    if not (lo <= tstar <= hi):
                        continue
                    coord = ca0 + va * (tstar - a0)
                    if not (0 < coord < 1):
                        continue
                    events.append(CollisionEvent(
                        kind="edge", location=(eid, coord), time=tstar % self.Tc,
                        cars=2, multiplicity=2, complete=True, cls=cls,
                    ))
        return events

    def corner_occupancy(self, ref) -> _Occupancy:
        return self.occ.get(ref, _Occupancy([], []))

    def cars_at_corner(self, ref, t: Frac) -> int:
        occ = self.corner_occupancy(ref)
        n = sum(1 for (a, b) in occ.intervals if a <= t <= b)
        n += sum(1 for x in occ.instants if x == t)
        return n

    def vertex_events(self):
        events = []
        for v, cycle in self.d.vertex_cycles.items():
            degree = len(cycle)
            times = set()
            for ref in cycle:
                occ = self.corner_occupancy(ref)
                for (a, b) in occ.intervals:
                    times.add(a)
                    times.add(b)
                times.update(occ.instants)
            cls = "exterior" if self.d.vertex_on_exterior(v) else "interior"
            for t in sorted(times):
                cars = sum(self.cars_at_corner(ref, t) for ref in cycle)
                # a single car reaching a degree-1 vertex is a complete
                # collision: one car at a vertex of degree one
                if cars >= 2 or (cars >= 1 and cars >= degree):
                    events.append(CollisionEvent(
                        kind="vertex", location=v, time=t,
                        cars=cars, multiplicity=degree,
                        complete=cars == degree, cls=cls,
                    ))
        return events


def simulate_collisions(d: Diagram, schedules: list[Schedule]) -> CollisionReport:
    """Exact enumeration of collision events over one common period."""
    sim = _Simulator(d, schedules)
    events = sim.edge_events() + sim.vertex_events()
    events.sort(key=lambda e: (e.time, e.kind, str(e.location)))
    complete_locs = {(e.kind, repr(e.location)) for e in events if e.complete}
    bound = 2 + sum(s.multiplicity - 1 for s in schedules)
    per_edge: dict = {}
    for e in events:
        if e.complete and e.kind == "edge" and e.cls == "exterior":
            per_edge.setdefault(e.location[0], set()).add(e.location[1])
    over_one = any(len(coords) > 1 for coords in per_edge.values())
    return CollisionReport(
        events=tuple(events),
        complete_points=len(complete_locs),
        bound=bound,
        multiplicities=tuple(s.multiplicity for s in schedules),
        common_period=sim.Tc,
        exterior_edge_over_one=over_one,
    )


def verify_lower_bound(report: CollisionReport) -> bool:
    """Complete collision points are at least 2 + sum(d_i - 1)."""
    return report.complete_points >= report.bound


@dataclass(frozen=True)
class InteriorCheck:
    interior_free: bool
    all_localized: bool   # every interior complete collision sits at a sink or source
    witnesses: tuple      # (vertex, classification, corner labels) per violation

    def __bool__(self):
        return self.interior_free


def verify_interior_free(report: CollisionReport, d: Diagram,
                         np: NormalizedPresentation) -> InteriorCheck:
    """No complete collision away from the exterior boundary.

    Interior complete collisions, when present (controls with broken
    normal-form conditions), must sit at sinks or sources; the corner
    labels around the vertex are returned as the forbidden-relation
    witness.
    """
    interior = [e for e in report.events if e.complete and e.cls == "interior"]
    witnesses = []
    localized = True
    for e in interior:
        if e.kind == "vertex":
            klass = d.classify_vertex(e.location)
            labels = tuple(d.corner_label(ref) for ref in d.vertex_cycles[e.location])
            if klass == "mixed":
                localized = False
            witnesses.append((e.location, klass, labels))
        else:
            localized = False
            witnesses.append((e.location, "edge", ()))
    return InteriorCheck(not interior, localized, tuple(witnesses))


# ---------------------------------------------------------------------------
# separated stops


@dataclass(frozen=True)
class SeparationReport:
    park_corners_ok: bool
    separation_ok: bool
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.park_corners_ok and self.separation_ok


def check_separated_stops(d: Diagram, schedules: list[Schedule]) -> SeparationReport:
    """Cars park only at (++)/(--) corners, and anticlockwise-consecutive
    stop corners at a vertex are never occupied simultaneously."""
    sim = _Simulator(d, schedules)
    violations = []
    parks_ok = True
    for sched in schedules:
        for car in sched.cars:
            for seg in car:
                if seg.kind == "park":
                    typ = d.corner_type((sched.face, seg.pos))
                    if typ not in ("++", "--"):
                        parks_ok = False
                        violations.append(
                            f"park at {sched.face}:{seg.pos} of type {typ}")
    sep_ok = True
    for v, cycle in d.vertex_cycles.items():
        stops = [ref for ref in cycle if d.corner_type(ref) in ("++", "--")]
        if not stops:
            continue
        if len(stops) == 1:
            occ = sim.corner_occupancy(stops[0])
            if occ.intervals or occ.instants:
                sep_ok = False
                violations.append(f"vertex {v}: a single occupied stop corner")
            continue
        for i, ref in enumerate(stops):
            nxt = stops[(i + 1) % len(stops)]
            if _occupancy_meet(sim.corner_occupancy(ref), sim.corner_occupancy(nxt)):
                sep_ok = False
                violations.append(f"vertex {v}: stop corners {ref} and {nxt} meet")
    return SeparationReport(parks_ok, sep_ok, tuple(violations))


def _occupancy_meet(a: _Occupancy, b: _Occupancy) -> bool:
    for (a0, a1) in a.intervals:
        for (b0, b1) in b.intervals:
            if max(a0, b0) <= min(a1, b1):
                return True
        if any(a0 <= x <= a1 for x in b.instants):
            return True
    for (b0, b1) in b.intervals:
        if any(b0 <= x <= b1 for x in a.instants):
            return True
    return any(x in set(b.instants) for x in a.instants)


# ---------------------------------------------------------------------------
# report formatting (the simulate CLI golden format)


def _frac(x: Frac) -> str:
    return f"{x.numerator}/{x.denominator}"


def format_collision_report(report: CollisionReport) -> str:
    lines = []
    for e in report.events:
        if e.kind == "vertex":
            loc = f"vertex:{e.location}"
        else:
            loc = f"edge:{e.location[0]}@{_frac(e.location[1])}"
        lines.append(
            f"COLLISION {e.cls} {loc} t={_frac(e.time)} cars={e.cars} "
            f"complete={'true' if e.complete else 'false'}"
        )
    passed = report.complete_points >= report.bound
    lines.append(
        f"TOTAL complete_points={report.complete_points} bound={report.bound} "
        f"pass={'true' if passed else 'false'}"
    )
    return "\n".join(lines)
