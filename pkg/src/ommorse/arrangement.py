"""Exact-rational linear hyperplane arrangements.

Everything here is over Q with fractions.Fraction: sign feasibility must be
decided exactly, otherwise the combinatorics downstream silently breaks.
Feasibility of a strict sign pattern is decided by Fourier-Motzkin
elimination; flats are computed by Gaussian elimination rank closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import DimensionError, InputError, ValidationError
from .signs import OrientedMatroid, SignVector


# ----------------------------------------------------------------- linalgebra

def _rref(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    cols = len(rows[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(vectors) -> int:
    return len(_rref(list(vectors))[0])


def in_span(v, vectors) -> bool:
    base = list(vectors)
    return rank(base + [list(v)]) == rank(base)


def kernel_basis(rows, dim):
    """Basis of {x : M x = 0} for the row matrix M over Q^dim."""
    red, pivots = _rref(rows)
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * dim
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -red[i][f]
        basis.append(tuple(vec))
    return basis


def _scale_canonical(v):
    """Scale a nonzero rational vector so the first nonzero entry is 1."""
    lead = next(x for x in v if x != 0)
    return tuple(x / lead for x in v)


def parallel(v, w) -> bool:
    return _scale_canonical(v) == _scale_canonical(w)


# --------------------------------------------------------------- feasibility

def _fm_feasible(strict):
    """Is there x with a.x > 0 for every row a?  Homogeneous Fourier-Motzkin."""
    rows = [list(r) for r in strict]
    dim = len(rows[0]) if rows else 0
    if any(all(c == 0 for c in r) for r in rows):
        return False
    for var in range(dim):
        pos = [r for r in rows if r[var] > 0]
        neg = [r for r in rows if r[var] < 0]
        new = [r for r in rows if r[var] == 0]
        for p in pos:
            for q in neg:
                # positive combination killing var; strictness is preserved
                comb = [p[j] * (-q[var]) + q[j] * p[var] for j in range(dim)]
                if all(c == 0 for c in comb):
                    return False
                new.append(comb)
        rows = new
    # every surviving row would read 0 > 0
    return not rows


def _substitute_equalities(eq_rows, other_rows, dim):
    """Project strict rows onto the solution space of the equality rows."""
    if not eq_rows:
        return [list(r) for r in other_rows], dim
    basis = kernel_basis(eq_rows, dim)
    if not basis:
        return None, 0
    projected = [[sum(r[j] * b[j] for j in range(dim)) for b in basis]
                 for r in other_rows]
    return projected, len(basis)


# -------------------------------------------------------------------- types

@dataclass(frozen=True)
class Flat:
    """Closed set of hyperplane indices together with its codimension."""

    support: frozenset
    codim: int

    def key(self):
        return (self.codim, tuple(sorted(self.support)))

    def __repr__(self):
        return f"Flat({sorted(self.support)}, codim={self.codim})"


class Arrangement:
    """n linear hyperplanes in Q^d given by their normal vectors, in order."""

    def __init__(self, normals, require_simple=True, require_essential=True):
        normals = tuple(tuple(Fraction(x) for x in v) for v in normals)
        if not normals:
            raise InputError("empty arrangement")
        d = len(normals[0])
        for v in normals:
            if len(v) != d:
                raise DimensionError("normals of mixed dimensions")
            if all(x == 0 for x in v):
                raise ValidationError(f"zero normal {v}")
        if require_simple:
            for i in range(len(normals)):
                for j in range(i + 1, len(normals)):
                    if parallel(normals[i], normals[j]):
                        raise ValidationError(
                            f"hyperplanes {i} and {j} are parallel: "
                            f"{normals[i]} ~ {normals[j]}")
        if require_essential and rank(normals) < d:
            raise ValidationError(
                f"normals span rank {rank(normals)} < d={d}; "
                "essentialize the arrangement first")
        self.normals = normals
        self.d = d
        self.n = len(normals)
        self._matroid = None
        self._lattice = None

    # ------------------------------------------------------------- geometry

    def closure(self, support) -> frozenset:
        sub = [self.normals[i] for i in support]
        return frozenset(i for i in range(self.n) if in_span(self.normals[i], sub))

    def feasible(self, pattern: SignVector) -> bool:
        """Is there x in Q^d with sign(<v_i, x>) = pattern_i for every i?"""
        if pattern.n != self.n:
            raise DimensionError("pattern length differs from n")
        return self.feasible_signs({i: pattern.sign(i) for i in range(self.n)})

    def feasible_signs(self, assignment) -> bool:
        """Partial sign conditions; hyperplanes not listed are unconstrained."""
        eq = [list(self.normals[i]) for i, s in assignment.items() if s == 0]
        strict = [[x * s for x in self.normals[i]]
                  for i, s in assignment.items() if s != 0]
        projected, _ = _substitute_equalities(eq, strict, self.d)
        if projected is None:
            return not strict
        return _fm_feasible(projected)

    # ------------------------------------------------------------- lattice

    def lattice(self) -> "IntersectionLattice":
        if self._lattice is None:
            self._lattice = build_lattice(self)
        return self._lattice

    def matroid(self) -> OrientedMatroid:
        if self._matroid is None:
            self._matroid = enumerate_covectors(self)
        return self._matroid


def build_lattice(arr: Arrangement) -> "IntersectionLattice":
    """All flats, by closing supports starting from the empty flat."""
    seen = {arr.closure(frozenset())}
    frontier = list(seen)
    while frontier:
        base = frontier.pop()
        for e in range(arr.n):
            if e in base:
                continue
            new = arr.closure(base | {e})
            if new not in seen:
                seen.add(new)
                frontier.append(new)
    flats = [Flat(s, rank([arr.normals[i] for i in s])) for s in seen]
    flats.sort(key=Flat.key)
    return IntersectionLattice(arr, tuple(flats))


class IntersectionLattice:
    """Flats of an arrangement ordered by reverse inclusion of subspaces."""

    def __init__(self, arr: Arrangement, flats):
        self.arrangement = arr
        self.flats = flats
        self._by_support = {f.support: f for f in flats}

    def __iter__(self):
        return iter(self.flats)

    def __len__(self):
        return len(self.flats)

    def flat(self, support) -> Flat:
        try:
            return self._by_support[frozenset(support)]
        except KeyError as exc:
            raise InputError(f"{sorted(support)} is not a flat support") from exc

    @property
    def bottom(self) -> Flat:
        return self.flats[0]

    @property
    def top(self) -> Flat:
        return self.flats[-1]

    def leq(self, y1: Flat, y2: Flat) -> bool:
        return y1.support <= y2.support

    def join(self, y1: Flat, y2: Flat) -> Flat:
        return self.flat(self.arrangement.closure(y1.support | y2.support))

    def meet(self, y1: Flat, y2: Flat) -> Flat:
        return self.flat(y1.support & y2.support)

    def closure_flat(self, support) -> Flat:
        return self.flat(self.arrangement.closure(frozenset(support)))


# ----------------------------------------------------------------- covectors

def enumerate_covectors(arr: Arrangement) -> OrientedMatroid:
    """Flat-by-flat enumeration of all realizable sign vectors."""
    vs = []
    for flat in arr.lattice():
        zero = flat.support
        restricted, labels, _ = _restrict_normals(arr, zero)
        if not labels:
            vs.append(SignVector.zero(arr.n))
            continue
        free = [e for e in range(arr.n) if e not in zero]
        for signs in product((1, -1), repeat=len(free)):
            pattern = [0] * arr.n
            for e, s in zip(free, signs):
                pattern[e] = s
            sv = SignVector.from_signs(pattern)
            if arr.feasible(sv):
                vs.append(sv)
    matroid = OrientedMatroid(arr.n, vs)
    return matroid


def count_topes_sweep(arr: Arrangement) -> int:
    """Independent tope count: plain 2^n sweep of full-support patterns."""
    count = 0
    for signs in product((1, -1), repeat=arr.n):
        if arr.feasible(SignVector.from_signs(signs)):
            count += 1
    return count


def walls(arr: Arrangement, c: SignVector) -> frozenset:
    """Hyperplanes whose single flip of c stays feasible."""
    m = arr.matroid()
    if not m.is_tope(c):
        raise InputError(f"{c} is not a tope")
    topes = set(m.topes)
    return frozenset(e for e in range(arr.n) if c.flip(e) in topes)


def project_tope(arr: Arrangement, flat: Flat, c: SignVector) -> SignVector:
    """Image of a tope in the subarrangement of hyperplanes through the flat."""
    return c.restrict(sorted(flat.support))


def _restrict_normals(arr: Arrangement, zero_support):
    """Normals of the arrangement induced on the flat with given support.

    Returns (list of restricted normals for hyperplanes outside the flat,
    their indices, and the kernel basis used as coordinates on the flat).
    """
    sub = [list(arr.normals[i]) for i in sorted(zero_support)]
    basis = kernel_basis(sub, arr.d)
    outside = [e for e in range(arr.n) if e not in zero_support]
    restricted = []
    for e in outside:
        v = arr.normals[e]
        w = tuple(sum(v[j] * b[j] for j in range(arr.d)) for b in basis)
        restricted.append(w)
    return restricted, outside, basis


def restriction(arr: Arrangement, flat: Flat, priority=None):
    """Arrangement induced on a flat, deduplicated and canonically labeled.

    Hyperplanes H with H >= flat are dropped; the rest intersect the flat
    and coincide in groups.  Each group is labeled by its smallest member,
    smallest in the priority sequence when one is given and by index
    otherwise.  Returns (arrangement on the flat or None when the flat is
    zero dimensional, labels tuple, coordinate basis of the flat).
    """
    restricted, outside, basis = _restrict_normals(arr, flat.support)
    order = list(range(arr.n)) if priority is None else list(priority)
    pos = {e: order.index(e) for e in outside}
    groups = []
    for w, e in zip(restricted, outside):
        if all(x == 0 for x in w):
            raise ValidationError(f"hyperplane {e} contains the flat but "
                                  "is outside its support")
        for g in groups:
            if parallel(w, g["normal"]):
                g["members"].append(e)
                break
        else:
            groups.append({"normal": w, "members": [e]})
    for g in groups:
        g["rep"] = min(g["members"], key=lambda e: pos[e])
    groups.sort(key=lambda g: pos[g["rep"]])
    labels = tuple(g["rep"] for g in groups)
    if not groups:
        return None, labels, basis
    normals = []
    for g in groups:
        # orient the class by its representative
        rep_w = restricted[outside.index(g["rep"])]
        normals.append(rep_w)
    sub = Arrangement(normals, require_simple=True, require_essential=False)
    return sub, labels, basis


def deletion(arr: Arrangement, e: int) -> Arrangement:
    """Remove one hyperplane; the result may be non-essential."""
    normals = [v for i, v in enumerate(arr.normals) if i != e]
    return Arrangement(normals, require_simple=True, require_essential=False)


# ----------------------------------------------------------------- file I/O

def parse_arrangement(text: str, require_essential=True) -> Arrangement:
    """First data line 'n d', then n lines of d rationals; # starts a comment."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InputError("empty arrangement file")
    head = lines[0].split()
    if len(head) != 2:
        raise InputError(f"expected 'n d' header, got {lines[0]!r}")
    n, d = int(head[0]), int(head[1])
    if len(lines) != n + 1:
        raise InputError(f"expected {n} normal lines, found {len(lines) - 1}")
    normals = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != d:
            raise InputError(f"expected {d} entries per normal, got {ln!r}")
        normals.append(tuple(Fraction(p) for p in parts))
    return Arrangement(normals, require_essential=require_essential)


def random_arrangement(rng, n, d, bound=4, require_essential=True) -> Arrangement:
    """Random simple (and by default essential) arrangement, by rejection."""
    while True:
        normals = []
        for _ in range(n):
            v = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(d))
            normals.append(v)
        try:
            return Arrangement(normals, require_essential=require_essential)
        except ValidationError:
            continue
