"""Sign vectors and oriented matroids given by their covector sets.

A sign vector lives in {+, 0, -}^E for a ground set E = {0..n-1} and is
stored as a pair of bitmasks (positive set, negative set), so negation,
composition and separation are O(1) per machine word.  Covector sets are
always kept in a canonical order (lexicographic in the coding - < 0 < +)
so that every downstream enumeration is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import DimensionError, InputError, ValidationError

_CHAR = {-1: "-", 0: "0", 1: "+"}
_SIGN = {"-": -1, "0": 0, "+": 1}


@dataclass(frozen=True)
class SignVector:
    """Element of {+,0,-}^E as (length, positive mask, negative mask)."""

    n: int
    pos: int
    neg: int

    def __post_init__(self):
        if self.pos & self.neg:
            raise InputError("a coordinate cannot be both positive and negative")

    @classmethod
    def from_signs(cls, signs) -> "SignVector":
        pos = neg = 0
        signs = tuple(signs)
        for i, s in enumerate(signs):
            if s > 0:
                pos |= 1 << i
            elif s < 0:
                neg |= 1 << i
        return cls(len(signs), pos, neg)

    @classmethod
    def from_string(cls, text: str) -> "SignVector":
        try:
            return cls.from_signs(_SIGN[c] for c in text.strip())
        except KeyError as exc:
            raise InputError(f"bad sign character in {text!r}") from exc

    @classmethod
    def zero(cls, n: int) -> "SignVector":
        return cls(n, 0, 0)

    def sign(self, e: int) -> int:
        if self.pos >> e & 1:
            return 1
        if self.neg >> e & 1:
            return -1
        return 0

    @property
    def signs(self) -> tuple:
        return tuple(self.sign(e) for e in range(self.n))

    def support(self) -> frozenset:
        return frozenset(e for e in range(self.n) if (self.pos | self.neg) >> e & 1)

    def zero_set(self) -> frozenset:
        return frozenset(e for e in range(self.n) if not (self.pos | self.neg) >> e & 1)

    def is_full(self) -> bool:
        return self.pos | self.neg == (1 << self.n) - 1

    def __neg__(self) -> "SignVector":
        return SignVector(self.n, self.neg, self.pos)

    def __str__(self) -> str:
        return "".join(_CHAR[s] for s in self.signs)

    def __repr__(self) -> str:
        return f"SignVector({str(self)!r})" if self.n else "SignVector('')"

    # canonical coding - < 0 < + per coordinate, used for all sorted output
    def key(self) -> tuple:
        return tuple(s + 1 for s in self.signs)

    def flip(self, e: int) -> "SignVector":
        mask = 1 << e
        if not (self.pos | self.neg) & mask:
            raise InputError(f"cannot flip zero coordinate {e}")
        return SignVector(self.n, self.pos ^ mask, self.neg ^ mask)

    def restrict(self, elements) -> "SignVector":
        """Sign vector over the listed elements, in the listed order."""
        return SignVector.from_signs(self.sign(e) for e in elements)


def parse_sign_vector(text: str) -> SignVector:
    return SignVector.from_string(text)


def compose(x: SignVector, y: SignVector) -> SignVector:
    """(x o y)_e = x_e if x_e != 0 else y_e."""
    if x.n != y.n:
        raise DimensionError(f"length mismatch {x.n} != {y.n}")
    taken = x.pos | x.neg
    return SignVector(x.n, x.pos | (y.pos & ~taken), x.neg | (y.neg & ~taken))


def separation_set(x: SignVector, y: SignVector) -> frozenset:
    """S(x, y) = elements where the two vectors carry opposite nonzero signs."""
    if x.n != y.n:
        raise DimensionError(f"length mismatch {x.n} != {y.n}")
    mask = (x.pos & y.neg) | (x.neg & y.pos)
    return frozenset(e for e in range(x.n) if mask >> e & 1)


def face_leq(x: SignVector, y: SignVector) -> bool:
    """Conformal order: x <= y iff x agrees with y on supp(x)."""
    if x.n != y.n:
        raise DimensionError(f"length mismatch {x.n} != {y.n}")
    return (x.pos | y.pos) == y.pos and (x.neg | y.neg) == y.neg


@dataclass(frozen=True)
class AxiomReport:
    zero: bool
    negation: bool
    composition: bool
    elimination: bool
    witness: tuple | None

    @property
    def ok(self) -> bool:
        return self.zero and self.negation and self.composition and self.elimination


def validate_axioms(covectors, n: int | None = None) -> AxiomReport:
    """Brute-force check of the four covector axioms.

    The elimination axiom is verified by exhaustive search for the vector Z,
    which is cubic in the number of covectors; ground sets are desk-sized.
    """
    vs = list(covectors)
    if n is None:
        if not vs:
            raise InputError("empty covector set with unknown ground size")
        n = vs[0].n
    for v in vs:
        if v.n != n:
            raise DimensionError("covectors of mixed lengths")
    vset = set(vs)
    zero_ok = SignVector.zero(n) in vset
    witness = None

    neg_ok = all(-v in vset for v in vs)
    if not neg_ok and witness is None:
        witness = ("negation", next(v for v in vs if -v not in vset))

    comp_ok = True
    for x in vs:
        for y in vs:
            if compose(x, y) not in vset:
                comp_ok = False
                if witness is None:
                    witness = ("composition", x, y)
                break
        if not comp_ok:
            break

    elim_ok = True
    for x, y in combinations(vs, 2):
        sep = (x.pos & y.neg) | (x.neg & y.pos)
        if not sep:
            continue
        for e in range(n):
            if not sep >> e & 1:
                continue
            for f in range(n):
                xf, yf = x.sign(f), y.sign(f)
                # strong elimination: f outside the separation set
                if f == e or (xf == 0 and yf == 0) or (xf != 0 and xf == -yf):
                    continue
                found = False
                for z in vs:
                    if z.sign(e) != 0 or z.sign(f) == 0:
                        continue
                    if all(z.sign(i) in (0, x.sign(i), y.sign(i)) for i in range(n)):
                        found = True
                        break
                if not found:
                    elim_ok = False
                    if witness is None:
                        witness = ("elimination", x, y, e, f)
                    break
            if not elim_ok:
                break
        if not elim_ok:
            break

    return AxiomReport(zero_ok, neg_ok, comp_ok, elim_ok, witness)


class OrientedMatroid:
    """Ground set {0..n-1} plus a deduplicated, canonically sorted covector set."""

    def __init__(self, n: int, covectors, validate: bool = False):
        vs = sorted(set(covectors), key=SignVector.key)
        for v in vs:
            if v.n != n:
                raise DimensionError("covector length differs from ground size")
        self.n = n
        self.covectors = tuple(vs)
        self._set = frozenset(vs)
        self._topes = None
        if validate:
            report = validate_axioms(self.covectors, n)
            if not report.ok:
                raise ValidationError(f"covector axioms fail: {report.witness}")

    def __contains__(self, v) -> bool:
        return v in self._set

    def __len__(self) -> int:
        return len(self.covectors)

    def __eq__(self, other) -> bool:
        return isinstance(other, OrientedMatroid) and self.n == other.n \
            and self.covectors == other.covectors

    def __hash__(self):
        return hash((self.n, self.covectors))

    @property
    def topes(self) -> tuple:
        """Maximal covectors in the conformal order."""
        if self._topes is None:
            tp = [v for v in self.covectors
                  if not any(w is not v and v != w and face_leq(v, w)
                             for w in self.covectors)]
            self._topes = tuple(tp)
        return self._topes

    def is_tope(self, v: SignVector) -> bool:
        return v in self._set and v in set(self.topes)

    def zero_covector(self) -> SignVector:
        return SignVector.zero(self.n)

    def tope_pushed_into_face(self, t: SignVector, f: SignVector) -> SignVector:
        """T_F = F o T, the tope adjacent to F on T's side."""
        if f not in self._set:
            raise InputError(f"{f} is not a covector")
        result = compose(f, t)
        if result not in self._set:
            raise ValidationError(f"{f} o {t} escapes the covector set")
        return result

    def flat_supports(self) -> tuple:
        """Zero sets of covectors; these are exactly the flat supports."""
        return tuple(sorted({v.zero_set() for v in self.covectors},
                            key=lambda s: (len(s), sorted(s))))

    def contraction(self, support) -> tuple:
        """Contract by a flat with the given support.

        Returns (matroid on E minus support, index map new -> old).
        """
        support = frozenset(support)
        if support not in set(self.flat_supports()):
            raise InputError(f"{sorted(support)} is not the support of a flat")
        keep = tuple(e for e in range(self.n) if e not in support)
        zmask = 0
        for e in support:
            zmask |= 1 << e
        vs = [v.restrict(keep) for v in self.covectors
              if not (v.pos | v.neg) & zmask]
        return OrientedMatroid(len(keep), vs), keep

    def parallel_classes(self) -> tuple:
        """Partition of the ground set into parallel classes with orientations.

        Returns a tuple of (representative, {element: sign relative to rep}).
        Loops are rejected: every element must appear in some covector.
        """
        classes = []
        assigned = set()
        for e in range(self.n):
            if e in assigned:
                continue
            members = {e: 1}
            for f in range(e + 1, self.n):
                if f in assigned:
                    continue
                rel = None
                ok = True
                for v in self.covectors:
                    se, sf = v.sign(e), v.sign(f)
                    if se == 0 and sf == 0:
                        continue
                    if se == 0 or sf == 0:
                        ok = False
                        break
                    r = se * sf
                    if rel is None:
                        rel = r
                    elif rel != r:
                        ok = False
                        break
                if ok and rel is not None:
                    members[f] = rel
            if all(v.sign(e) == 0 for v in self.covectors):
                raise ValidationError(f"element {e} is a loop")
            assigned.update(members)
            classes.append((e, members))
        return tuple(classes)

    def simplify(self) -> tuple:
        """Collapse parallel classes onto their smallest representatives.

        Returns (simple matroid, representatives tuple, orientation map
        {old element: (rep position, sign)}).
        """
        classes = self.parallel_classes()
        reps = tuple(rep for rep, _ in classes)
        orient = {}
        for pos, (rep, members) in enumerate(classes):
            for e, sgn in members.items():
                orient[e] = (pos, sgn)
        vs = [v.restrict(reps) for v in self.covectors]
        return OrientedMatroid(len(reps), vs), reps, orient


def parse_covector_file(text: str) -> OrientedMatroid:
    """One sign vector per line over + - 0; lines starting with # ignored."""
    vs = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        vs.append(SignVector.from_string(line))
    if not vs:
        raise InputError("no covectors in input")
    n = vs[0].n
    m = OrientedMatroid(n, vs)
    report = validate_axioms(m.covectors, n)
    if not report.ok:
        raise ValidationError(f"covector axioms fail: {report.witness}")
    return m
