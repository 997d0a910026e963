import sys
sys.path.insert(0, "tests")
from fractions import Fraction

from corpus import kcell_disk
from howie.diagram import validate
from howie.groups import FREE, BaseGroup
from howie.motion import build_standard_schedules, simulate_collisions, format_collision_report
from howie.presentation import Normalized, RelatorPresentation, normalize
from howie.words import parse_word

F2 = BaseGroup(FREE, ("a", "b"))
res = normalize(RelatorPresentation(F2, parse_word("a.t.b.t^-1.a.t.b.t^-1.a.t", F2), 2))
np = res.np
print("m,s,k:", np.m, np.s, np.k)
d = kcell_disk(np, 1, tail=2)
scheds = build_standard_schedules(d, np)
for s in scheds:
    print("face", s.face, "d", s.multiplicity, "T", s.period)
    for j, car in enumerate(s.cars):
        print("  car", j, [(str(seg.start), str(seg.end), seg.kind, seg.pos) for seg in car])

report = simulate_collisions(d, scheds)
print(format_collision_report(report))

# dense sampling oracle: car positions on a fine grid; find multi-car points
from collections import defaultdict

def positions_at(t):
    locs = defaultdict(list)
    for s in scheds:
        n2 = len(d.faces[s.face].boundary)
        for j in range(s.multiplicity):
            loc = s.position(n2, j, t)
            if loc[0] == "corner":
                v = d.corner_vertex((s.face, loc[1]))
                locs[("v", v)].append((s.face, j))
            else:
                trav = d.faces[s.face].boundary[loc[1]]
                coord = loc[2] if trav.dir == 1 else 1 - loc[2]
                locs[("e", trav.edge, coord)].append((s.face, j))
    return locs

hits = set()
N = 240
for i in range(N):
    t = Fraction(6 * i, N)
    locs = positions_at(t)
    for key, cars in locs.items():
        if len(cars) >= 2:
            if key[0] == "v":
                deg = d.degree(key[1])
                if len(cars) >= deg:
                    hits.add((key, str(t), len(cars), deg))
            else:
                hits.add((key[0], key[1], str(key[2]), str(t)))
for h in sorted(map(str, hits)):
    print("SAMPLE-HIT", h)
