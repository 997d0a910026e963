"""Area certificates and the linear isoperimetric bound.

A certificate expresses a word as a product of conjugated relator
powers in the ambient free product; verification is plain normal-form
reduction.  Certificates can be read off a valid diagram by peeling
interior faces into the exterior one at a time, carried from the pinch
presentation back to the starting one, and searched for at desk scale
by iterative deepening over term count and conjugator length.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import CertificateError
from .diagram import Diagram, face_label, validate
from .groups import FPElement
from .motion import build_standard_schedules, simulate_collisions
from .presentation import (
    NormalizedPresentation,
    RelatorPresentation,
    membership_in_P,
)
from .words import (
    TWord,
    format_fp,
    format_word,
    h_word,
    parse_fp,
    parse_word,
    shortlex_words,
    substitute_back,
    t_word,
    tword_conjugacy_witness,
    tword_cyclic_reduce,
    tword_exponent_sum,
    tword_reduce,
)

Presentation = Union[RelatorPresentation, NormalizedPresentation]


def isoperimetric_constant(k: int) -> Fraction:
    """The constant 1 / (2 (k - 1)) of the linear bound."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return Fraction(1, 2 * (k - 1))


@dataclass(frozen=True)
class CertTerm:
    f: TWord
    relator: Union[str, FPElement]  # "k" or the phi parameter p
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise CertificateError("term sign must be +1 or -1")
        if not (self.relator == "k" or isinstance(self.relator, FPElement)):
            raise CertificateError("malformed relator selector")


@dataclass(frozen=True)
class AreaCertificate:
    u: TWord
    terms: tuple[CertTerm, ...]

    @property
    def h(self) -> int:
        return len(self.terms)

    @property
    def e(self) -> int:
        return sum(1 for t in self.terms if t.relator == "k")


def _relator_word(pres: Presentation, term: CertTerm) -> TWord:
    if term.relator == "k":
        if isinstance(pres, NormalizedPresentation):
            return pres.v ** pres.k
        return pres.w ** pres.k
    if not isinstance(pres, NormalizedPresentation):
        raise CertificateError("phi relators exist only over the pinch presentation")
    p = term.relator
    if p.is_identity() or not membership_in_P(p, "P", pres.s):
        raise CertificateError("phi relator requires p in P minus the identity")
    return pres.phi_relator(p)


def term_word(pres: Presentation, term: CertTerm) -> TWord:
    rel = _relator_word(pres, term)
    body = rel if term.sign == 1 else rel.inverse()
    return term.f.inverse() * body * term.f


def verify_certificate(cert: AreaCertificate, pres: Presentation) -> bool:
    """True iff u^-1 prod_i f_i^-1 R_i^{+-1} f_i reduces to the identity."""
    prod = TWord()
    for term in cert.terms:
        prod = prod * term_word(pres, term)
    return (cert.u.inverse() * prod).is_identity()


# ---------------------------------------------------------------------------
# reading a certificate off a diagram


def _formal_inverse(items):
    return [(-x if isinstance(x, int) else x.inverse()) for x in reversed(items)]


def _items_to_word(items) -> TWord:
    return tword_reduce(items)


def certificate_from_diagram(d: Diagram, pres: Presentation) -> AreaCertificate:
    """One term per interior face, by peeling faces into the exterior.

    Peeling an interior face F sharing an edge e with the exterior
    rewrites the exterior word A t^e B as (conjugated relator) . A C B,
    where C is the rest of F's boundary; the conjugators come out of a
    dual spanning-tree traversal from the exterior basepoint.
    """
    report = validate(d, pres)
    if not report.valid:
        raise CertificateError("diagram is not valid over the presentation")
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
    terms = []
    guard = 0
    while remaining:
        guard += 1
        if guard > 4 * len(d.faces) + 8:
            raise CertificateError("face peeling did not converge")
        pick = None
        for pos, it in enumerate(ext):
            if isinstance(it, tuple):
                _, eid, dr = it
                (f1, _) = d.trav_pos[(eid, -dr)]
                if f1 in remaining:
                    pick = (pos, eid, dr, f1)
                    break
        if pick is None:
            raise CertificateError(
                "interior faces touch the exterior only at vertices; unsupported")
        pos, eid, dr, fid = pick
        fitems = boundary_items[fid]
        fpos = next(i for i, it in enumerate(fitems)
                    if isinstance(it, tuple) and it[1] == eid and it[2] == -dr)
        rotated = fitems[fpos:] + fitems[:fpos]
        C = rotated[1:]  # starts and ends with corners
        A_items = ext[:pos]
        B_items = ext[pos + 1:]
        # rho' = C . t^{-dr} is a rotation of the face relator; the peeled
        # term is A rho'^-1 A^-1 = (q A^-1)^-1 R^{-sigma} (q A^-1).
        fc = classes[fid]
        if fc.kind == "phi":
            selector: Union[str, FPElement] = fc.p
            base_rel = pres.phi_relator(fc.p)
            sigma = 1
        else:
            selector = "k"
            base_rel = _relator_word(pres, CertTerm(TWord(), "k", 1))
            sigma = fc.sign
        rho_prime = _items_to_word([x if not isinstance(x, tuple) else x[2] for x in C]
                                   + [-dr])
        target = base_rel if sigma == 1 else base_rel.inverse()
        q = tword_conjugacy_witness(target.inverse(), rho_prime.inverse())
        if q is None:
            raise CertificateError("face label lost its relator shape during peeling")
        A_word = _ext_word_open(A_items)
        f_conj = q * A_word.inverse()
        terms.append(CertTerm(f_conj, selector, -sigma))
        # splice: A . C . B with corner merges at both junctions
        new_ext = _merge_items(A_items, C, B_items)
        ext = new_ext
        remaining.discard(fid)

    residue = _ext_word(ext)
    if not residue.is_identity():
        raise CertificateError("peeled diagram boundary does not vanish")
    cert = AreaCertificate(u, tuple(terms))
    if not verify_certificate(cert, pres):
        raise CertificateError("internal error: read-off certificate fails")
    return cert


def _ext_word(items) -> TWord:
    return _items_to_word([x if not isinstance(x, tuple) else x[2] for x in items])


def _ext_word_open(items) -> TWord:
    return _ext_word(items)


def _merge_items(A, C, B):
    """Concatenate boundary stretches; reading starts at A's first item.

    Adjacent corner labels are left as separate items: word reduction
    multiplies them out, and keeping the basepoint fixed preserves the
    exact peeling identity u_old = term . u_new.
    """
    return list(A) + list(C) + list(B)


# ---------------------------------------------------------------------------
# collapsing to the starting presentation


def collapse_certificate(cert: AreaCertificate, np: NormalizedPresentation) -> AreaCertificate:
    """Carry a pinch-presentation certificate back to <G, t | w^k>.

    Phi terms die under back-substitution; k-cell terms become
    conjugates of w^{+-k}.  The k-term count e is preserved.
    """
    if np.source_w is None or np.back_witness is None:
        raise CertificateError("normalized presentation lacks its source relator")
    if not verify_certificate(cert, np):
        raise CertificateError("certificate does not verify over the pinch presentation")
    # back_witness q_w satisfies substitute_back(v) conjugated by q_w = w,
    # i.e. substitute_back(v) = q^-1 w q with q = q_w^-1.
    q = np.back_witness.inverse()
    s = np.s
    new_terms = []
    for term in cert.terms:
        if term.relator != "k":
            continue
        f_new = q * substitute_back(term.f, s)
        new_terms.append(CertTerm(f_new, "k", term.sign))
    out = AreaCertificate(substitute_back(cert.u, s), tuple(new_terms))
    rp = RelatorPresentation(np.base, np.source_w, np.k)
    if not verify_certificate(out, rp):
        raise CertificateError("collapsed certificate fails over the starting presentation")
    return out


# ---------------------------------------------------------------------------
# area statistics


@dataclass(frozen=True)
class AreaStats:
    e: int
    d_phi: int
    f: int
    k: int
    constant: Fraction
    u_letters: int
    alternating: bool
    faces_ok: bool       # e <= (f - 2) / (k - 1)
    area_ok: bool        # e < constant * u_letters
    area_ok_weak: bool   # e < u_letters / (k - 1)
    collision_points: int
    collisions_le_f: bool


def area_stats(d: Diagram, np: NormalizedPresentation) -> AreaStats:
    """Face counts against exterior length, with the collision cross-check."""
    report = validate(d, np)
    if not report.valid:
        raise CertificateError("diagram is not valid over the presentation")
    e = sum(1 for fc in report.face_classes if fc.kind == "kcell")
    d_phi = sum(1 for fc in report.face_classes if fc.kind == "phi")
    f = d.exterior_edge_count()
    k = np.k
    C = isoperimetric_constant(k)
    u_H = face_label(d, d.exterior_face)
    u_G = substitute_back(u_H, np.s)
    u_letters = u_G.length()
    alternating = _is_alternating(u_G)
    faces_ok = Fraction(e) <= Fraction(f - 2, k - 1)
    area_ok = Fraction(e) < C * u_letters
    area_ok_weak = Fraction(e) < Fraction(u_letters, k - 1)
    sim = simulate_collisions(d, build_standard_schedules(d, np))
    return AreaStats(
        e=e, d_phi=d_phi, f=f, k=k, constant=C,
        u_letters=u_letters, alternating=alternating,
        faces_ok=faces_ok, area_ok=area_ok, area_ok_weak=area_ok_weak,
        collision_points=sim.complete_points,
        collisions_le_f=sim.complete_points <= f,
    )


def _is_alternating(w: TWord) -> bool:
    if len(w.items) < 2:
        return False
    for a, b in zip(w.items, w.items[1:] + w.items[:1]):
        if isinstance(a, int) == isinstance(b, int):
            return False
    return True


# ---------------------------------------------------------------------------
# bounded search


def _relator_options(pres: Presentation, max_len: int):
    """Relator selectors in deterministic order: the power relator first,
    then phi relators with p enumerated shortlex."""
    opts: list[tuple[Union[str, FPElement], TWord]] = []
    if isinstance(pres, NormalizedPresentation):
        opts.append(("k", pres.v ** pres.k))
        if pres.s >= 1:
            for wd in shortlex_words(pres.base, pres.s - 1, max_len, include_t=False):
                if wd.is_identity() or len(wd.items) != 1:
                    continue
                p = wd.items[0]
                opts.append((p, pres.phi_relator(p)))
    else:
        opts.append(("k", pres.w ** pres.k))
    return opts


def bounded_prove(u: TWord, pres: Presentation, max_terms: int,
                  max_conj_len: int) -> AreaCertificate | None:
    """Iterative-deepening certificate search; None means Unknown.

    Deepens on term count, then on conjugator length; conjugators are
    enumerated shortlex and the final term is solved directly from the
    residual word.  Sound (the result re-verifies) but incomplete by
    design: None is not a proof that u is nontrivial.
    """
    if isinstance(pres, NormalizedPresentation):
        s = pres.s
        k = pres.k
    else:
        s = 0
        k = pres.k
    base = pres.base
    words_by_len: dict[int, list[TWord]] = {}
    all_words = shortlex_words(base, s, max_conj_len, include_t=True)
    for wd in all_words:
        words_by_len.setdefault(wd.gen_length(), []).append(wd)

    for E in range(0, max_terms + 1):
        if E == 0:
            if u.is_identity():
                return AreaCertificate(u, ())
            continue
        for L in range(0, max_conj_len + 1):
            opts = _relator_options(pres, L)
            max_rel_len = max(rel.gen_length() for _, rel in opts)
            found = _search_level(u, pres, E, L, opts, words_by_len, k, max_rel_len)
            if found is not None:
                assert verify_certificate(found, pres)
                return found
    return None


def _search_level(u, pres, E, L, opts, words_by_len, k, max_rel_len):
    conjugators = [wd for n in range(0, L + 1) for wd in words_by_len.get(n, [])]

    def feasible(residual: TWord, remaining: int, used_max_len: int) -> bool:
        exp = tword_exponent_sum(residual)
        if exp % k != 0 or abs(exp) > remaining * k:
            return False
        if residual.gen_length() > remaining * (2 * L + max_rel_len):
            return False
        return True

    def close(residual: TWord, used_max_len: int):
        """Solve the final term directly from the residual."""
        core_r, _ = tword_cyclic_reduce(residual)
        for selector, rel in opts:
            for sign in (1, -1):
                target = rel if sign == 1 else rel.inverse()
                core_t, _ = tword_cyclic_reduce(target)
                if core_t != core_r:
                    continue
                q = tword_conjugacy_witness(target, residual)
                if q is None:
                    continue
                flen = q.gen_length()
                if flen > L:
                    continue
                if max(used_max_len, flen) != L:
                    return "seen"  # found at a smaller L level already
                return CertTerm(q, selector, sign)
        return None

    def rec(residual: TWord, depth: int, used_max_len: int, acc: list):
        remaining = E - depth
        if remaining == 1:
            got = close(residual, used_max_len)
            if isinstance(got, CertTerm):
                return acc + [got]
            return None
        if not feasible(residual, remaining, used_max_len):
            return None
        for f in conjugators:
            flen = f.gen_length()
            for selector, rel in opts:
                for sign in (1, -1):
                    body = rel if sign == 1 else rel.inverse()
                    tw = f.inverse() * body * f
                    nxt = tw.inverse() * residual
                    got = rec(nxt, depth + 1, max(used_max_len, flen),
                              acc + [CertTerm(f, selector, sign)])
                    if got is not None:
                        return got
        return None

    terms = rec(u, 0, 0, [])
    if terms is None:
        return None
    return AreaCertificate(u, tuple(terms))


# ---------------------------------------------------------------------------
# certificate files


def certificate_to_json(cert: AreaCertificate, pres: Presentation) -> dict:
    base = pres.base
    terms = []
    for t in cert.terms:
        rec = {"f": format_word(t.f, base), "sign": t.sign}
        rec["R"] = "k" if t.relator == "k" else {"phi": format_fp(t.relator, base)}
        terms.append(rec)
    return {"u": format_word(cert.u, base), "terms": terms}


def certificate_from_json(data: dict, pres: Presentation) -> AreaCertificate:
    base = pres.base
    try:
        u = parse_word(data["u"], base)
        terms = []
        for rec in data["terms"]:
            f = parse_word(rec["f"], base)
            sign = int(rec["sign"])
            R = rec["R"]
            if R == "k":
                terms.append(CertTerm(f, "k", sign))
            elif isinstance(R, dict) and "phi" in R:
                terms.append(CertTerm(f, parse_fp(R["phi"], base), sign))
            else:
                raise CertificateError(f"bad relator selector {R!r}")
    except (KeyError, TypeError) as exc:
        raise CertificateError(f"malformed certificate: {exc}") from exc
    return AreaCertificate(u, tuple(terms))
