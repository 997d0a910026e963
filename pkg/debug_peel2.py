import random
import sys
sys.path.insert(0, "tests")

from corpus import DiagramBuilder, glued_phi_pair, kcell_disk, phi_bigon, random_fp
from howie.diagram import Trav, validate
from howie.groups import FREE, BaseGroup, fp_from_syllables
from howie.presentation import RelatorPresentation, normalize
from howie.prover import certificate_from_diagram, verify_certificate
from howie.words import parse_word

F2 = BaseGroup(FREE, ("a", "b"))
np = normalize(RelatorPresentation(F2, parse_word("a.t.b.t.a.t^-1.b.t^-1.a.t", F2), 3)).np
p = fp_from_syllables([(0, F2.generator(0))])

print("== glued pair ==")
d = glued_phi_pair(np, p, p * p)
try:
    cert = certificate_from_diagram(d, np)
    print("ok, h =", cert.h, "verifies:", verify_certificate(cert, np))
except Exception as exc:
    print("FAIL:", exc)

print("== kcell disk tail=2 ==")
d = kcell_disk(np, 1, tail=2)
try:
    cert = certificate_from_diagram(d, np)
    print("ok, h =", cert.h, "verifies:", verify_certificate(cert, np))
except Exception as exc:
    print("FAIL:", exc)

print("== single attachments ==")
for seed in range(12):
    rng = random.Random(seed)
    builder = DiagramBuilder(np, kcell_disk(np, 1, tail=2))
    ok = False
    guard = 0
    while not ok and guard < 50:
        guard += 1
        ext_id = builder.exterior_id()
        boundary = builder.faces[ext_id][1]
        slots = [i for i in range(1, len(boundary), 2) if isinstance(boundary[i], Trav)]
        pos = rng.choice(slots)
        if rng.random() < 0.5:
            ok = builder.attach_phi(pos, random_fp(rng, np, "P"))
            kind = "phi"
        else:
            ok = builder.attach_kcell(pos, rng.choice([1, -1]), rng.randrange(8))
            kind = "kcell"
    d = builder.diagram()
    try:
        cert = certificate_from_diagram(d, np)
        print(f"seed {seed}: attach {kind}: ok h={cert.h}")
    except Exception as exc:
        print(f"seed {seed}: attach {kind}: FAIL {exc}")
