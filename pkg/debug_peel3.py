import random
import sys
sys.path.insert(0, "tests")

from corpus import DiagramBuilder, kcell_disk, random_fp
from howie.diagram import Trav, serialize_diagram, validate
from howie.groups import FREE, BaseGroup
from howie.presentation import RelatorPresentation, normalize
from howie.prover import _ext_word, _items_to_word, _merge_items
from howie.words import format_word, parse_word, tword_conjugacy_witness

F2 = BaseGroup(FREE, ("a", "b"))
np = normalize(RelatorPresentation(F2, parse_word("a.t.b.t.a.t^-1.b.t^-1.a.t", F2), 3)).np

rng = random.Random(0)
builder = DiagramBuilder(np, kcell_disk(np, 1, tail=2))
ok = False
while not ok:
    ext_id = builder.exterior_id()
    boundary = builder.faces[ext_id][1]
    slots = [i for i in range(1, len(boundary), 2) if isinstance(boundary[i], Trav)]
    pos = rng.choice(slots)
    if rng.random() < 0.5:
        ok = builder.attach_phi(pos, random_fp(rng, np, "P"))
    else:
        ok = builder.attach_kcell(pos, rng.choice([1, -1]), rng.randrange(8))
d = builder.diagram()
report = validate(d, np)
print("valid", report.valid)
classes = {fc.face: fc for fc in report.face_classes}
print({fc.face: (fc.kind, fc.sign) for fc in report.face_classes})

boundary_items = {}
for f in d.faces.values():
    items = []
    for it in f.boundary:
        items.append(it.label if hasattr(it, "label") else ("E", it.edge, it.dir))
    boundary_items[f.id] = items

ext = list(boundary_items[d.exterior_face])
remaining = {fid for fid in d.faces if fid != d.exterior_face}
while remaining:
    pick = None
    for pos, it in enumerate(ext):
        if isinstance(it, tuple):
            _, eid, dr = it
            f1, _ = d.trav_pos[(eid, -dr)]
            if f1 in remaining:
                pick = (pos, eid, dr, f1)
                break
    pos, eid, dr, fid = pick
    fitems = boundary_items[fid]
    fpos = next(i for i, x in enumerate(fitems)
                if isinstance(x, tuple) and x[1] == eid and x[2] == -dr)
    C = (fitems[fpos:] + fitems[:fpos])[1:]
    print(f"peel {fid} via {eid} (ext dir {dr}) at pos {pos}; |C| = {len(C)}")
    ext = _merge_items(ext[:pos], C, ext[pos + 1:])
    remaining.discard(fid)

residue = _ext_word(ext)
print("residue:", format_word(residue, F2))

# check the tree structure of the residual: which travs remain
travs = [x for x in ext if isinstance(x, tuple)]
from collections import Counter
cnt = Counter(x[1] for x in travs)
print("edges in residue boundary:", dict(cnt))
both = all(v == 2 for v in cnt.values())
print("each edge twice:", both)
vs = set()
for e in d.edges.values():
    if e.id in cnt:
        vs.add(e.tail); vs.add(e.head)
print("V_res", len(vs), "E_res", len(cnt), "tree needs E=V-1:", len(cnt) == len(vs) - 1)
