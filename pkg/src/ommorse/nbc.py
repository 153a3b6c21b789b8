"""Circuits, broken circuits, and the chamber-to-nbc bijection.

Broken circuits drop the smallest element of a circuit, smallest in the
chosen hyperplane order.  The bijection eta is defined recursively through
deletion of the last hyperplane and restriction onto it, and only under
orderings with the cut property, which guarantee that the restricted base
chamber is full dimensional at every level of the recursion.
"""

from __future__ import annotations

from itertools import combinations

from .arrangement import Arrangement, Flat, deletion, rank, restriction
from .errors import InputError, TheoremViolationError
from .salvetti import FlatPoset, SalvettiCell, compute_XC, distinguished_face, patchwork_matching
from .signs import SignVector
from .topeposet import cut_property_check, lex_extension


def circuits(arr: Arrangement):
    """Minimal dependent sets of normals, by brute force over subsets."""
    out = []
    for size in range(2, arr.n + 1):
        for subset in combinations(range(arr.n), size):
            vectors = [arr.normals[i] for i in subset]
            if rank(vectors) < size and \
                    not any(set(c) <= set(subset) for c in out):
                out.append(frozenset(subset))
    return tuple(sorted(out, key=sorted))


def broken_circuits(arr: Arrangement, ordering):
    ordering = tuple(ordering)
    pos = {e: i for i, e in enumerate(ordering)}
    return tuple(sorted((c - {min(c, key=pos.get)} for c in circuits(arr)),
                        key=sorted))


def nbc_complex(arr: Arrangement, ordering=None):
    """Independent sets containing no broken circuit; the empty set counts."""
    if ordering is None:
        ordering = tuple(range(arr.n))
    broken = broken_circuits(arr, ordering)
    out = []
    for size in range(arr.n + 1):
        for subset in combinations(range(arr.n), size):
            vectors = [arr.normals[i] for i in subset]
            if rank(vectors) < size:
                continue
            if any(b <= set(subset) for b in broken):
                continue
            out.append(frozenset(subset))
    return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))


# ----------------------------------------------------------------- eta

def _hyperplane_flat(arr: Arrangement, e: int) -> Flat:
    return Flat(frozenset({e}), 1)


def _restriction_data(arr: Arrangement, e: int, priority):
    """Arrangement induced on hyperplane e with order-smallest labels."""
    sub, labels, _ = restriction(arr, _hyperplane_flat(arr, e), priority=priority)
    return sub, labels


def eta(arr: Arrangement, base: SignVector, ordering) -> dict:
    """The bijection from chambers to nbc sets, eta(base) empty.

    ordering must satisfy the cut property with respect to base; the
    recursion peels off the last hyperplane, sending chambers on the base
    side (and uncut chambers) to the deletion and the others through the
    restriction, prepending the peeled hyperplane.
    """
    ordering = tuple(ordering)
    ok, j = cut_property_check(arr, base, ordering)
    if not ok:
        raise InputError(f"ordering fails the cut property at position {j}")
    topes = frozenset(arr.matroid().topes)
    if base not in topes:
        raise InputError(f"{base} is not a chamber")
    table = _eta_rec(arr, topes, base, ordering)
    values = sorted(table.values(), key=lambda s: (len(s), sorted(s)))
    expected = sorted(nbc_complex(arr, ordering), key=lambda s: (len(s), sorted(s)))
    if values != expected:
        raise TheoremViolationError("eta is not a bijection onto the nbc sets")
    if table[base]:
        raise TheoremViolationError("eta(base) is nonempty")
    return table


def _eta_rec(arr: Arrangement, topes, base: SignVector, ordering) -> dict:
    n = arr.n
    if n == 1:
        return {base: frozenset(), -base: frozenset({0})}
    h = ordering[-1]
    keep = tuple(e for e in range(n) if e != h)
    renumber = {e: i for i, e in enumerate(keep)}

    sub = deletion(arr, h)
    sub_order = tuple(renumber[e] for e in ordering[:-1])
    sub_base = base.restrict(keep)
    sub_topes = frozenset(t.restrict(keep) for t in topes)
    ok, j = cut_property_check(sub, sub_base, sub_order)
    if not ok:
        raise TheoremViolationError(
            f"induced ordering on the deletion fails the cut property at {j}")
    eta_del = _eta_rec(sub, sub_topes, sub_base, sub_order)

    # chambers of the deletion cut by the peeled hyperplane
    def extend(tvec, sign):
        signs = [0] * n
        for e in keep:
            signs[e] = tvec.sign(renumber[e])
        signs[h] = sign
        return SignVector.from_signs(signs)

    cut_chambers = {t for t in sub_topes
                    if extend(t, 1) in topes and extend(t, -1) in topes}

    rest, labels = _restriction_data(arr, h, priority=ordering)
    eta_res = None
    if labels:
        res_base = SignVector.from_signs([base.sign(r) for r in labels])
        res_topes = frozenset(
            SignVector.from_signs([c.sign(renumber[r]) for r in labels])
            for c in cut_chambers)
        if res_base not in res_topes:
            raise TheoremViolationError(
                "restricted base chamber is not full dimensional; "
                "the cut property failed silently")
        res_order = tuple(range(len(labels)))
        ok, j = cut_property_check(rest, res_base, res_order)
        if not ok:
            raise TheoremViolationError(
                f"induced ordering on the restriction fails the cut property at {j}")
        eta_res = _eta_rec(rest, res_topes, res_base, res_order)

    table = {}
    for c in topes:
        c_del = c.restrict(keep)
        if c.sign(h) == base.sign(h) or c_del not in cut_chambers:
            table[c] = frozenset(keep[i] for i in eta_del[c_del])
        else:
            res_vec = SignVector.from_signs([c.sign(r) for r in labels])
            lifted = frozenset(labels[i] for i in eta_res[res_vec])
            table[c] = lifted | {h}
    return table


# ------------------------------------------------------------- verifications

def verify_restriction_lemma(arr: Arrangement, base: SignVector, ordering):
    """Deletion and restriction eta values span the same flat inside the
    peeled hyperplane, for every chamber it cuts."""
    ordering = tuple(ordering)
    ok, j = cut_property_check(arr, base, ordering)
    if not ok:
        raise InputError(f"ordering fails the cut property at position {j}")
    n = arr.n
    if n == 1:
        return True, ()
    h = ordering[-1]
    keep = tuple(e for e in range(n) if e != h)
    renumber = {e: i for i, e in enumerate(keep)}
    topes = frozenset(arr.matroid().topes)

    sub = deletion(arr, h)
    sub_order = tuple(renumber[e] for e in ordering[:-1])
    sub_base = base.restrict(keep)
    sub_topes = frozenset(t.restrict(keep) for t in topes)
    eta_del = _eta_rec(sub, sub_topes, sub_base, sub_order)

    def extend(tvec, sign):
        signs = [0] * n
        for e in keep:
            signs[e] = tvec.sign(renumber[e])
        signs[h] = sign
        return SignVector.from_signs(signs)

    cut_chambers = {t for t in sub_topes
                    if extend(t, 1) in topes and extend(t, -1) in topes}
    if not cut_chambers:
        return True, ()
    rest, labels = _restriction_data(arr, h, priority=ordering)
    res_base = SignVector.from_signs([base.sign(r) for r in labels])
    res_topes = frozenset(
        SignVector.from_signs([c.sign(renumber[r]) for r in labels])
        for c in cut_chambers)
    eta_res = _eta_rec(rest, res_topes, res_base, tuple(range(len(labels))))

    witnesses = []
    for c in sorted(cut_chambers, key=SignVector.key):
        left = arr.closure(frozenset(keep[i] for i in eta_del[c]) | {h})
        res_vec = SignVector.from_signs([c.sign(renumber[r]) for r in labels])
        right = arr.closure(frozenset(labels[i] for i in eta_res[res_vec]) | {h})
        if left != right:
            witnesses.append((c, sorted(left), sorted(right)))
    return not witnesses, tuple(witnesses)


def verify_corresp(arr: Arrangement, base: SignVector, ordering):
    """The flat attached to each chamber equals the span of its eta set.

    Requires the lexicographic extension taken in the same hyperplane
    order; returns (ok, per-chamber report).
    """
    ordering = tuple(ordering)
    matroid = arr.matroid()
    table = eta(arr, base, ordering)
    flats = FlatPoset(matroid)
    ext = lex_extension(matroid, base, hyperplane_order=ordering)
    report = []
    ok = True
    for c in ext:
        x = compute_XC(matroid, flats, ext, c)
        spanned = arr.closure(table[c])
        good = x == spanned
        ok = ok and good
        report.append((c, sorted(table[c]), sorted(x), good))
    if not ok:
        bad = [str(c) for c, _, _, g in report if not g]
        raise TheoremViolationError(f"span of eta differs from the flat at {bad}")
    return ok, tuple(report)


def critical_cells_via_nbc(arr: Arrangement, base: SignVector, ordering):
    """Critical cells read off eta alone, checked against the matching."""
    ordering = tuple(ordering)
    matroid = arr.matroid()
    table = eta(arr, base, ordering)
    cells = []
    for c in lex_extension(matroid, base, hyperplane_order=ordering):
        x = arr.closure(table[c])
        face = distinguished_face(matroid, c, x)
        cells.append((SalvettiCell(face, c), len(table[c])))
    ext = lex_extension(matroid, base, hyperplane_order=ordering)
    pm = patchwork_matching(matroid, base, ext)
    if {c for c, _ in cells} != {c for c, _ in pm.critical}:
        raise TheoremViolationError(
            "eta critical cells differ from the matching critical cells")
    if sorted(d for _, d in cells) != sorted(d for _, d in pm.critical):
        raise TheoremViolationError("eta dimensions differ from cell dimensions")
    return tuple(cells)
