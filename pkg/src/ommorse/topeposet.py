"""Tope posets, their linear extensions, cut orderings, chain oracles.

The ordering oracle turns a linear extension of the tope poset into coatom
orders for the whole face poset: the coatoms of a face correspond to the
walls of a tope in a contraction, and they are ordered by the first
crossing of those walls along a gallery (a maximal tope-poset chain) that
honors the mandatory prefix.  This is the constructive content behind the
fact that linear extensions of tope posets induce recursive coatom
orderings of the face poset.
"""

from __future__ import annotations

from .errors import InputError, StructureError, TheoremViolationError
from .posets import FinitePoset
from .shelling import ShellingTypeOrdering, build_shelling_type_ordering
from .signs import OrientedMatroid, SignVector, compose, face_leq, separation_set


class TopePoset:
    """Topes ordered by inclusion of separation sets from a base tope."""

    def __init__(self, matroid: OrientedMatroid, base: SignVector):
        if not matroid.is_tope(base):
            raise InputError(f"{base} is not a tope")
        self.matroid = matroid
        self.base = base
        self.topes = matroid.topes
        self._sep = {t: separation_set(base, t) for t in self.topes}

    def separation(self, t: SignVector) -> frozenset:
        return self._sep[t]

    def rank(self, t: SignVector) -> int:
        return len(self._sep[t])

    def leq(self, t1: SignVector, t2: SignVector) -> bool:
        return self._sep[t1] <= self._sep[t2]

    def poset(self) -> FinitePoset:
        order = sorted(self.topes, key=lambda t: (self.rank(t), t.key()))
        return FinitePoset.from_order(order, self.leq)

    def is_linear_extension(self, order) -> bool:
        order = tuple(order)
        if sorted(order, key=SignVector.key) != sorted(self.topes, key=SignVector.key):
            return False
        pos = {t: i for i, t in enumerate(order)}
        return all(not (self.leq(a, b) and a != b) or pos[a] < pos[b]
                   for a in order for b in order)

    def linear_extensions(self):
        """All linear extensions, for exhaustive desk-scale theorem checks."""
        ranked = sorted(self.topes, key=lambda t: (self.rank(t), t.key()))
        used = [False] * len(ranked)
        current = []

        def rec():
            if len(current) == len(ranked):
                yield tuple(current)
                return
            for i, t in enumerate(ranked):
                if used[i]:
                    continue
                if all(used[j] or not self.leq(s, t) or s == t
                       for j, s in enumerate(ranked)):
                    used[i] = True
                    current.append(t)
                    yield from rec()
                    current.pop()
                    used[i] = False

        yield from rec()

    def random_linear_extension(self, rng):
        remaining = sorted(self.topes, key=SignVector.key)
        out = []
        placed = set()
        while remaining:
            ready = [t for t in remaining
                     if all(s in placed or not self.leq(s, t) or s == t
                            for s in remaining)]
            t = ready[rng.randrange(len(ready))]
            out.append(t)
            placed.add(t)
            remaining.remove(t)
        return tuple(out)


def lex_extension(matroid: OrientedMatroid, base: SignVector,
                  hyperplane_order=None):
    """Topes sorted lexicographically by their 0/1 arrays relative to base.

    The array of a tope has a 0 in position k when the tope agrees with the
    base on the k-th hyperplane of the given order.
    """
    if not matroid.is_tope(base):
        raise InputError(f"{base} is not a tope")
    order = tuple(range(matroid.n)) if hyperplane_order is None else tuple(hyperplane_order)
    if sorted(order) != list(range(matroid.n)):
        raise InputError("hyperplane order must be a permutation")

    def sigma(t):
        return tuple(0 if t.sign(e) == base.sign(e) else 1 for e in order)

    return tuple(sorted(matroid.topes, key=sigma))


def sigma_array(base: SignVector, t: SignVector, hyperplane_order=None):
    order = range(base.n) if hyperplane_order is None else hyperplane_order
    return tuple(0 if t.sign(e) == base.sign(e) else 1 for e in order)


# ------------------------------------------------------------- cut orderings

def cut_property_check(arr, base: SignVector, ordering):
    """Does every hyperplane slice the open cone cut out by its predecessors?

    Returns (True, None) or (False, j) with j the first failing position.
    """
    ordering = tuple(ordering)
    if sorted(ordering) != list(range(arr.n)):
        raise InputError("ordering must be a permutation of the hyperplanes")
    if not base.is_full() or not arr.feasible(base):
        raise InputError(f"{base} is not a chamber")
    for j in range(1, arr.n):
        for side in (1, -1):
            assignment = {e: base.sign(e) for e in ordering[:j]}
            assignment[ordering[j]] = side * base.sign(ordering[j])
            if not arr.feasible_signs(assignment):
                return False, j + 1
    return True, None


def gallery_from_base(matroid: OrientedMatroid, base: SignVector):
    """Greedy maximal chain from base to its antipode, smallest wall first."""
    topes = set(matroid.topes)
    crossing = []
    current = base
    remaining = set(range(matroid.n))
    while remaining:
        for e in sorted(remaining):
            if current.flip(e) in topes:
                current = current.flip(e)
                crossing.append(e)
                remaining.discard(e)
                break
        else:
            raise StructureError("gallery construction is stuck")
    if current != -base:
        raise StructureError("gallery did not reach the opposite tope")
    return tuple(crossing)


def generate_cut_ordering(arr, base: SignVector):
    """Hyperplane ordering read off a maximal tope-poset chain from base."""
    ordering = gallery_from_base(arr.matroid(), base)
    ok, j = cut_property_check(arr, base, ordering)
    if not ok:
        raise TheoremViolationError(
            f"gallery ordering fails the cut check at position {j}")
    return ordering


# ------------------------------------------------------ the chain oracle

class _ContractionCache:
    """Simplified contractions of one matroid, keyed by zero support."""

    def __init__(self, matroid: OrientedMatroid):
        self.matroid = matroid
        self._cache = {}

    def get(self, zero_support):
        key = frozenset(zero_support)
        if key not in self._cache:
            contracted, keep = self.matroid.contraction(key)
            simple, reps, orient = contracted.simplify()
            # reps are positions into keep; store original indices
            rep_elements = tuple(keep[r] for r in reps)
            topes = frozenset(simple.topes)
            self._cache[key] = (simple, keep, rep_elements, orient, topes)
        return self._cache[key]


def _constrained_gallery(simple: OrientedMatroid, topes, start: SignVector,
                         first_walls, later_walls):
    """Maximal chain from start to -start crossing first_walls before
    later_walls; depth-first with backtracking, smallest element first."""
    n = simple.n
    first_walls = frozenset(first_walls)
    later_walls = frozenset(later_walls)

    def rec(current, remaining):
        if not remaining:
            return []
        pending_first = first_walls & remaining
        for e in sorted(remaining):
            if e in later_walls and pending_first:
                continue
            flipped = current.flip(e)
            if flipped not in topes:
                continue
            rest = rec(flipped, remaining - {e})
            if rest is not None:
                return [e] + rest
        return None

    out = rec(start, frozenset(range(n)))
    if out is None:
        raise TheoremViolationError(
            "no gallery honors the mandatory prefix; the supplied order is "
            "not a linear extension or the matroid is invalid")
    return tuple(out)


def face_poset(matroid: OrientedMatroid) -> FinitePoset:
    """Covectors under the conformal order, as a generic poset."""
    order = sorted(matroid.covectors,
                   key=lambda v: (len(v.support()), v.key()))
    return FinitePoset.from_order(order, face_leq)


def rem0_oracle(matroid: OrientedMatroid, base: SignVector, extension):
    """Ordering oracle for the face poset induced by a linear extension.

    For a face p, the coatoms are ordered by first crossing of the matching
    walls along a gallery of the contraction to p's span; galleries are
    chosen greedily with the smallest wall first, constrained to honor the
    mandatory prefix.
    """
    extension = tuple(extension)
    tp = TopePoset(matroid, base)
    if not tp.is_linear_extension(extension):
        raise InputError("extension is not a linear extension of the tope poset")
    cache = _ContractionCache(matroid)

    def oracle(poset: FinitePoset, p: SignVector, prefix):
        coat = poset.below[p]
        if not coat:
            return ()
        simple, _, rep_elements, _, topes = cache.get(p.zero_set())
        pbar = p.restrict(rep_elements)
        if not pbar.is_full():
            raise StructureError(f"{p} does not restrict to a tope of its span")
        # wall class of each coatom: the one parallel class it kills
        wall_of = {}
        for g in coat:
            gbar = g.restrict(rep_elements)
            zeros = [k for k in range(simple.n) if gbar.sign(k) == 0]
            if len(zeros) != 1:
                raise StructureError(
                    f"coatom {g} of {p} kills {len(zeros)} wall classes")
            wall_of[g] = zeros[0]
        mandatory = set(prefix)
        first = {wall_of[g] for g in prefix}
        later = {wall_of[g] for g in coat if g not in mandatory}
        crossing = _constrained_gallery(simple, topes, pbar, first, later)
        position = {e: i for i, e in enumerate(crossing)}
        rest = sorted((g for g in coat if g not in mandatory),
                      key=lambda g: position[wall_of[g]])
        return tuple(prefix) + tuple(rest)

    return oracle


def shelling_of_face_poset(matroid: OrientedMatroid, base: SignVector,
                           extension) -> ShellingTypeOrdering:
    """Shelling-type ordering of the face poset for a linear extension."""
    poset = face_poset(matroid)
    oracle = rem0_oracle(matroid, base, extension)
    return build_shelling_type_ordering(poset, tuple(extension), oracle)
