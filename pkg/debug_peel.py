import random
import sys
sys.path.insert(0, "tests")

from corpus import random_diagram
from howie.diagram import validate
from howie.groups import FREE, BaseGroup
from howie.presentation import RelatorPresentation, normalize
from howie.prover import CertTerm, _ext_word, _items_to_word, _merge_items, _relator_word, term_word
from howie.words import TWord, parse_word, tword_conjugacy_witness, tword_reduce

F2 = BaseGroup(FREE, ("a", "b"))
np = normalize(RelatorPresentation(F2, parse_word("a.t.b.t.a.t^-1.b.t^-1.a.t", F2), 3)).np
rng = random.Random(23)
d = random_diagram(np, rng, attachments=3)
report = validate(d, np)
print("valid:", report.valid, "faces:", len(d.faces))
classes = {fc.face: fc for fc in report.face_classes}

boundary_items = {}
for f in d.faces.values():
    items = []
    for it in f.boundary:
        if hasattr(it, "label"):
            items.append(it.label)
        else:
            items.append(("E", it.edge, it.dir))
    boundary_items[f.id] = items

ext = list(boundary_items[d.exterior_face])
u = _ext_word(ext)
remaining = {fid for fid in d.faces if fid != d.exterior_face}
while remaining:
    pick = None
    for pos, it in enumerate(ext):
        if isinstance(it, tuple):
            _, eid, dr = it
            (f1, _) = d.trav_pos[(eid, -dr)]
            if f1 in remaining:
                pick = (pos, eid, dr, f1)
                break
    assert pick, "stuck"
    pos, eid, dr, fid = pick
    fitems = boundary_items[fid]
    fpos = next(i for i, x in enumerate(fitems)
                if isinstance(x, tuple) and x[1] == eid and x[2] == -dr)
    rotated = fitems[fpos:] + fitems[:fpos]
    C = rotated[1:]
    A_items = ext[:pos]
    B_items = ext[pos + 1:]
    fc = classes[fid]
    if fc.kind == "phi":
        base_rel = np.phi_relator(fc.p)
        sigma = 1
        sel = fc.p
    else:
        base_rel = np.v ** np.k
        sigma = fc.sign
        sel = "k"
    rho_prime = _items_to_word([x if not isinstance(x, tuple) else x[2] for x in C] + [-dr])
    target = base_rel if sigma == 1 else base_rel.inverse()
    q = tword_conjugacy_witness(target.inverse(), rho_prime.inverse())
    print(f"peel face {fid} kind {fc.kind} sigma {sigma} via edge {eid} dr {dr}: witness {'ok' if q else 'NONE'}")
    A_word = _ext_word(A_items)
    f_conj = q * A_word.inverse()
    term = CertTerm(f_conj, sel, -sigma)
    new_ext = _merge_items(A_items, C, B_items)
    u_old = _ext_word(ext)
    u_new = _ext_word(new_ext)
    tw = term_word(np, term)
    lhs = tw * u_new
    print("   step identity holds:", lhs == u_old)
    ext = new_ext
    remaining.discard(fid)

residue = _ext_word(ext)
print("residue identity:", residue.is_identity(), "len", residue.length())
print("u == prod(terms)? final check via chain")
