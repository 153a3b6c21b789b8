"""The Salvetti poset, its tope-wise stratification and patchwork matchings.

Cells are pairs <F, T> of a face and a tope above it; the cell order makes
vertices out of the pairs <T, T> and one top cell <0, T> per tope.  A
linear extension of the tope poset slices the poset into strata N(C), one
per tope; each stratum is a contraction face poset, carries its own
shelling-induced matching, and contributes exactly one critical cell,
placed on the flat attached to the tope by the separation conditions.

Every structural theorem used along the way is asserted at runtime and
raises TheoremViolationError when an input sneaks past validation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, TheoremViolationError
from .posets import FinitePoset, Matching, is_acyclic
from .shelling import build_shelling_type_ordering, matching_from_ordering
from .signs import OrientedMatroid, SignVector, compose, face_leq, separation_set
from .topeposet import TopePoset, _ContractionCache, face_poset, lex_extension, rem0_oracle


@dataclass(frozen=True)
class SalvettiCell:
    face: SignVector
    tope: SignVector

    def label(self) -> str:
        return f"{self.face}|{self.tope}"

    def __repr__(self):
        return f"<{self.face}|{self.tope}>"


class FlatPoset:
    """Flat supports of a matroid (zero sets of covectors), by inclusion."""

    def __init__(self, matroid: OrientedMatroid):
        supports = sorted({v.zero_set() for v in matroid.covectors},
                          key=lambda s: (len(s), sorted(s)))
        self.supports = tuple(supports)
        self._set = frozenset(supports)
        self._rank = {}
        for s in self.supports:           # sorted by size, so lower first
            below = [t for t in self.supports if t < s]
            self._rank[s] = 0 if not below else 1 + max(self._rank[t] for t in below)

    def __iter__(self):
        return iter(self.supports)

    def __contains__(self, support):
        return frozenset(support) in self._set

    @property
    def bottom(self):
        return self.supports[0]

    @property
    def top(self):
        return self.supports[-1]

    def rank(self, support) -> int:
        return self._rank[frozenset(support)]

    def meet(self, s1, s2):
        inter = frozenset(s1) & frozenset(s2)
        if inter not in self._set:
            raise TheoremViolationError(
                f"flat supports not closed under intersection at {sorted(inter)}")
        return inter

    def closure(self, support):
        support = frozenset(support)
        candidates = [s for s in self.supports if support <= s]
        out = candidates[0]
        for s in candidates[1:]:
            out = out & s
        if out not in self._set:
            raise TheoremViolationError("closure left the flat family")
        return out


def salvetti_leq(a: SalvettiCell, b: SalvettiCell) -> bool:
    """a <= b in the cell order: a's face refines b's and the topes agree
    after pushing b's tope into a's face."""
    if a == b:
        return True
    return face_leq(b.face, a.face) and a.face != b.face \
        and a.tope == compose(a.face, b.tope)


def build_salvetti(matroid: OrientedMatroid) -> FinitePoset:
    """All cells <F, T> with F below T, ordered as a poset."""
    cells = []
    for f in matroid.covectors:
        for t in matroid.topes:
            if face_leq(f, t):
                cells.append(SalvettiCell(f, t))
    cells.sort(key=lambda c: (len(c.face.support()), c.face.key(), c.tope.key()))
    return FinitePoset.from_order(cells, salvetti_leq)


def cell_dimension(flats: FlatPoset, cell: SalvettiCell) -> int:
    return flats.rank(cell.face.zero_set())


# ----------------------------------------------------------------- the flats

def compute_XC(matroid: OrientedMatroid, flats: FlatPoset, extension,
               c: SignVector):
    """Minimum of the filter of flats meeting every earlier separation set.

    Asserts that the filter is a principal upper ideal (closed upward and
    under intersection, with a unique minimal element).
    """
    extension = tuple(extension)
    idx = extension.index(c)
    seps = [separation_set(c, k) for k in extension[:idx]]
    members = [s for s in flats if all(s & sep for sep in seps)]
    member_set = set(members)
    for s in members:
        for t in flats:
            if s <= t and t not in member_set:
                raise TheoremViolationError(f"filter not upward closed at {sorted(t)}")
    bottom = members[0]
    for s in members[1:]:
        bottom = flats.meet(bottom, s)
        if bottom not in member_set:
            raise TheoremViolationError(
                f"filter of {c} not closed under meet; not a linear extension?")
    minima = [s for s in members if not any(t < s for t in members)]
    if len(minima) != 1 or minima[0] != bottom:
        raise TheoremViolationError(f"filter of {c} is not principal")
    return bottom


def tec_lm_flat(matroid: OrientedMatroid, flats: FlatPoset, extension,
                c: SignVector):
    """Independent characterization of the same flat, brute-forced.

    A flat X qualifies when (1) it meets every separation set S(C, K) for
    earlier K and (2) every flat not above X misses some separation set.
    """
    extension = tuple(extension)
    idx = extension.index(c)
    seps = [separation_set(c, k) for k in extension[:idx]]
    hits = {s: all(s & sep for sep in seps) for s in flats}
    found = [x for x in flats
             if hits[x] and all(x <= y for y in flats if hits[y])]
    if len(found) != 1:
        raise TheoremViolationError(
            f"brute-force characterization found {len(found)} flats for {c}")
    return found[0]


def distinguished_face(matroid: OrientedMatroid, c: SignVector, x_support) -> SignVector:
    """The unique covector vanishing exactly on the flat and agreeing with
    the tope elsewhere; its existence is the content of the span identity."""
    signs = [0 if e in x_support else c.sign(e) for e in range(matroid.n)]
    f = SignVector.from_signs(signs)
    if f not in matroid:
        raise TheoremViolationError(
            f"face {f} cut out of {c} by {sorted(x_support)} is not a covector")
    return f


# ------------------------------------------------------------- stratification

@dataclass
class Stratum:
    tope: SignVector
    x_support: frozenset
    dimension: int
    face: SignVector                  # the distinguished face
    faces: tuple                      # faces F with <F, F o C> new at this tope
    cells: tuple                      # the corresponding cells


@dataclass
class Stratification:
    matroid: OrientedMatroid
    base: SignVector
    extension: tuple
    strata: tuple

    def stratum_of(self):
        out = {}
        for s in self.strata:
            for cell in s.cells:
                out[cell] = s.tope
        return out


def stratify(matroid: OrientedMatroid, base: SignVector, extension,
             flats: FlatPoset | None = None) -> Stratification:
    """Slice the cell poset along the linear extension.

    The new cells at a tope C are those whose tope coordinate changes when
    C replaces any earlier tope; the faces involved are asserted to be
    exactly the covectors vanishing on the attached flat, which is the
    contraction description of the stratum.
    """
    extension = tuple(extension)
    tp = TopePoset(matroid, base)
    if not tp.is_linear_extension(extension):
        raise InputError("not a linear extension of the tope poset")
    if flats is None:
        flats = FlatPoset(matroid)
    cache = _ContractionCache(matroid)
    strata = []
    for idx, c in enumerate(extension):
        earlier = extension[:idx]
        faces = tuple(f for f in matroid.covectors
                      if all(compose(f, c) != compose(f, k) for k in earlier))
        x = compute_XC(matroid, flats, extension, c)
        expected = tuple(f for f in matroid.covectors if not f.support() & x)
        if set(faces) != set(expected):
            raise TheoremViolationError(
                f"stratum of {c} is not the contraction by {sorted(x)}")
        fc = distinguished_face(matroid, c, x)
        if fc.zero_set() != x:
            raise TheoremViolationError(f"distinguished face of {c} has the wrong span")
        cells = tuple(SalvettiCell(f, compose(f, c)) for f in faces)
        _assert_stratum_isomorphism(matroid, cache, x, faces, c)
        strata.append(Stratum(c, x, flats.rank(x), fc, faces, cells))
    total = sum(len(s.cells) for s in strata)
    cellcount = sum(1 for f in matroid.covectors for t in matroid.topes
                    if compose(f, t) == t)
    if total != cellcount:
        raise TheoremViolationError("strata do not partition the cell poset")
    return Stratification(matroid, base, extension, tuple(strata))


def _assert_stratum_isomorphism(matroid, cache, x_support, faces, c):
    """The stratum, ordered inside the cell poset, is the (opposite of the)
    face poset of the contraction, via restriction of faces."""
    simple, keep, rep_elements, orient, _ = cache.get(x_support)
    lifted = {}
    for v in simple.covectors:
        g = _unrestrict(matroid, keep, orient, x_support, v)
        lifted[v] = g
    if set(lifted.values()) != set(faces):
        raise TheoremViolationError(
            f"contraction covectors do not match the stratum of {c}")
    cells = {f: SalvettiCell(f, compose(f, c)) for f in faces}
    stratum_poset = FinitePoset.from_order(
        sorted(cells.values(), key=lambda cl: (len(cl.face.support()), cl.face.key())),
        salvetti_leq)
    contraction_poset = face_poset(simple)
    # covers must correspond under restriction, with the order reversed
    stratum_covers = {(cells[lifted[b]], cells[lifted[a]])
                      for a, b in contraction_poset.covers}
    if stratum_covers != set(stratum_poset.covers):
        raise TheoremViolationError(
            f"stratum of {c} is not isomorphic to the contraction face poset")


def _unrestrict(matroid, keep, orient, x_support, v: SignVector) -> SignVector:
    """Inverse of restrict-and-simplify: zeros on the flat, class signs
    spread from the representatives."""
    signs = [0] * matroid.n
    for i, e in enumerate(keep):
        pos, sgn = orient[i]
        signs[e] = sgn * v.sign(pos)
    g = SignVector.from_signs(signs)
    if g not in matroid:
        raise TheoremViolationError(f"lifted covector {g} escapes the matroid")
    return g


# --------------------------------------------------------------- the matching

@dataclass
class PatchworkMatching:
    poset: FinitePoset                # the full cell poset
    matching: Matching
    critical: tuple                   # (cell, dimension) per stratum, in order
    stratification: Stratification


def patchwork_matching(matroid: OrientedMatroid, base: SignVector, extension,
                       poset: FinitePoset | None = None,
                       flats: FlatPoset | None = None) -> PatchworkMatching:
    """Per-stratum shelling matchings glued along the linear extension.

    Each stratum is matched through its contraction; the base tope of the
    contraction is chosen opposite to the image of the stratum's tope, so
    the unique critical cell of the stratum is the distinguished face paired
    with the tope itself.  The union is asserted acyclic.
    """
    if flats is None:
        flats = FlatPoset(matroid)
    strat = stratify(matroid, base, extension, flats)
    if poset is None:
        poset = build_salvetti(matroid)
    cache = _ContractionCache(matroid)
    pairs = []
    criticals = []
    for stratum in strat.strata:
        simple, keep, rep_elements, orient, _ = cache.get(stratum.x_support)
        c_image = stratum.tope.restrict(rep_elements)
        if not simple.is_tope(c_image):
            raise TheoremViolationError("tope image is not a contraction tope")
        stratum_base = -c_image
        sub_ext = lex_extension(simple, stratum_base)
        sub_poset = face_poset(simple)
        oracle = rem0_oracle(simple, stratum_base, sub_ext)
        sto = build_shelling_type_ordering(sub_poset, sub_ext, oracle)
        sub_matching = matching_from_ordering(sto)
        crit = sub_matching.critical(sub_poset)
        if len(crit) != 1 or crit[0] != c_image:
            raise TheoremViolationError(
                f"stratum of {stratum.tope} has criticals "
                f"{[str(x) for x in crit]} instead of the tope image")
        lift = {v: _unrestrict(matroid, keep, orient, stratum.x_support, v)
                for v in simple.covectors}
        for p, q in sub_matching.pairs:
            upper = SalvettiCell(lift[q], compose(lift[q], stratum.tope))
            lower = SalvettiCell(lift[p], compose(lift[p], stratum.tope))
            if (upper, lower) not in poset.covers:
                raise TheoremViolationError(
                    f"transported pair ({upper}, {lower}) is not a cover")
            pairs.append((upper, lower))
        critical_cell = SalvettiCell(stratum.face, stratum.tope)
        criticals.append((critical_cell, stratum.dimension))

    matching = Matching.of(pairs)
    matching.validate(poset)
    crit_set = {c for c, _ in criticals}
    if set(matching.critical(poset)) != crit_set:
        raise TheoremViolationError("critical cells disagree with the strata")
    report = is_acyclic(matching, poset)
    if not report.acyclic:
        raise TheoremViolationError(f"patchwork matching has a cycle: {report.cycle}")
    if len(crit_set) != len(matroid.topes):
        raise TheoremViolationError("matching is not maximum")
    return PatchworkMatching(poset, matching, tuple(criticals), strat)


def euler_characteristic(flats: FlatPoset, poset: FinitePoset) -> int:
    chi = 0
    for cell in poset.elements:
        chi += (-1) ** cell_dimension(flats, cell)
    return chi


def critical_euler_characteristic(criticals) -> int:
    return sum((-1) ** dim for _, dim in criticals)
