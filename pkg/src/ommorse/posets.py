"""Finite posets, matchings, acyclicity, recursive coatom orderings.

Elements carry opaque hashable labels so the same engine serves face
posets, tope posets and Salvetti cell posets.  Covers are stored as pairs
(p, q) with p covering q.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import InputError, StructureError, ValidationError


class FinitePoset:
    """Immutable poset given by its Hasse diagram."""

    def __init__(self, elements, covers, check_covers=True):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise InputError("duplicate elements")
        self.covers = frozenset((p, q) for p, q in covers)
        for p, q in self.covers:
            if p not in self.index or q not in self.index:
                raise InputError(f"cover ({p!r}, {q!r}) uses unknown elements")
        self.above = {e: [] for e in self.elements}   # covers of e
        self.below = {e: [] for e in self.elements}   # coatoms of e
        for p, q in sorted(self.covers, key=lambda c: (self.index[c[0]], self.index[c[1]])):
            self.above[q].append(p)
            self.below[p].append(q)
        self._descendants = None
        self._heights = None
        if check_covers:
            self._check_acyclic_and_reduced()

    # ------------------------------------------------------------ structure

    def _check_acyclic_and_reduced(self):
        order = self._topo()
        if order is None:
            raise ValidationError("cover relation contains a directed cycle")
        desc = self.descendants()
        for p, q in self.covers:
            for x in self.below[p]:
                if x != q and q in desc[x]:
                    raise ValidationError(f"transitive cover ({p!r}, {q!r})")

    def _topo(self):
        indeg = {e: len(self.below[e]) for e in self.elements}
        queue = deque(e for e in self.elements if indeg[e] == 0)
        order = []
        while queue:
            e = queue.popleft()
            order.append(e)
            for p in self.above[e]:
                indeg[p] -= 1
                if indeg[p] == 0:
                    queue.append(p)
        return order if len(order) == len(self.elements) else None

    def descendants(self):
        """For each element, the set of elements strictly below it."""
        if self._descendants is None:
            desc = {}
            for e in self._topo():
                s = set()
                for q in self.below[e]:
                    s.add(q)
                    s |= desc[q]
                desc[e] = s
            self._descendants = desc
        return self._descendants

    def leq(self, a, b) -> bool:
        return a == b or a in self.descendants()[b]

    def maximal_elements(self):
        return tuple(e for e in self.elements if not self.above[e])

    def minimal_elements(self):
        return tuple(e for e in self.elements if not self.below[e])

    def interval(self, a, b):
        """Elements x with a <= x <= b."""
        desc = self.descendants()
        return [x for x in self.elements
                if (x == a or a in desc[x]) and (x == b or x in desc[b])]

    @classmethod
    def from_order(cls, elements, leq):
        """Build the Hasse diagram of an explicit order relation."""
        elements = tuple(elements)
        less = {e: [f for f in elements if f != e and leq(f, e)] for e in elements}
        covers = []
        for p in elements:
            lower = less[p]
            lower_sets = {q: set(less[q]) for q in lower}
            for q in lower:
                if not any(q in lower_sets[x] for x in lower if x != q):
                    covers.append((p, q))
        return cls(elements, covers, check_covers=False)

    def with_bottom(self, label="0^"):
        """Adjoin a minimum below the current minimal elements."""
        if label in self.index:
            raise InputError(f"label {label!r} already used")
        covers = list(self.covers) + [(m, label) for m in self.minimal_elements()]
        return FinitePoset(self.elements + (label,), covers, check_covers=False)

    # -------------------------------------------------------------- heights

    def heights(self):
        """Longest-chain heights; error when some lower ideal is not ranked."""
        if self._heights is None:
            h = {}
            for e in self._topo():
                h[e] = 0 if not self.below[e] else 1 + max(h[q] for q in self.below[e])
            for p, q in self.covers:
                if h[p] != h[q] + 1:
                    raise ValidationError(
                        f"not locally ranked: cover ({p!r}, {q!r}) spans "
                        f"heights {h[p]} and {h[q]}")
            self._heights = h
        return self._heights

    def height(self) -> int:
        return max(self.heights().values(), default=0)

    def level_sets(self):
        """P_i = elements of height h(P) - i, one tuple per level."""
        h = self.heights()
        top = self.height()
        levels = [[] for _ in range(top + 1)]
        for e in self.elements:
            levels[top - h[e]].append(e)
        return [tuple(lv) for lv in levels]


# ------------------------------------------------------------------ matching

@dataclass(frozen=True)
class Matching:
    """Set of vertex-disjoint cover pairs (p, q) with p covering q."""

    pairs: frozenset

    @classmethod
    def of(cls, pairs):
        return cls(frozenset(tuple(p) for p in pairs))

    def validate(self, poset: FinitePoset):
        used = set()
        for p, q in self.pairs:
            if (p, q) not in poset.covers:
                raise StructureError(f"pair ({p!r}, {q!r}) is not a cover")
            for x in (p, q):
                if x in used:
                    raise StructureError(f"element {x!r} matched twice")
                used.add(x)

    def matched(self):
        out = set()
        for p, q in self.pairs:
            out.add(p)
            out.add(q)
        return out

    def critical(self, poset: FinitePoset):
        taken = self.matched()
        return tuple(e for e in poset.elements if e not in taken)


@dataclass(frozen=True)
class AcyclicityReport:
    acyclic: bool
    extension: tuple | None      # linear extension with matched pairs adjacent
    cycle: tuple | None          # alternating cycle ((p1,q1),...,(pk,qk))


def is_acyclic(matching: Matching, poset: FinitePoset) -> AcyclicityReport:
    """Check the matched digraph for cycles.

    Cover edges point downward except matched ones, which point upward.
    On success also returns a linear extension of the poset in which every
    matched q immediately precedes its partner p, the certificate of
    Kozlov's criterion; on failure returns the alternating cycle.
    """
    matching.validate(poset)
    partner = {}
    for p, q in matching.pairs:
        partner[p] = q
        partner[q] = p

    # contract matched pairs; an edge super(u) -> super(v) for every
    # unmatched cover u > v between different supernodes
    rep = {}
    for e in poset.elements:
        if e in partner:
            p, q = (e, partner[e]) if (e, partner[e]) in matching.pairs else (partner[e], e)
            rep[e] = (p, q)
        else:
            rep[e] = (e,)
    nodes = sorted({rep[e] for e in poset.elements},
                   key=lambda s: poset.index[s[0]])
    out_edges = {s: set() for s in nodes}
    indeg = {s: 0 for s in nodes}
    for p, q in sorted(poset.covers, key=lambda c: (poset.index[c[0]], poset.index[c[1]])):
        if (p, q) in matching.pairs:
            continue
        sp, sq = rep[p], rep[q]
        if sp == sq:
            continue
        if sq not in out_edges[sp]:
            out_edges[sp].add(sq)
            indeg[sq] += 1

    # Kahn; deterministic by smallest element index
    ready = sorted((s for s in nodes if indeg[s] == 0),
                   key=lambda s: poset.index[s[0]])
    topo = []
    while ready:
        s = ready.pop(0)
        topo.append(s)
        added = False
        for t in sorted(out_edges[s], key=lambda s_: poset.index[s_[0]]):
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
                added = True
        if added:
            ready.sort(key=lambda s_: poset.index[s_[0]])
    if len(topo) == len(nodes):
        # sinks are the low elements: read off in reverse for an ascending order
        ext = []
        for s in reversed(topo):
            if len(s) == 2:
                ext.extend([s[1], s[0]])     # q immediately before p
            else:
                ext.append(s[0])
        ext = tuple(ext)
        _assert_extension(poset, matching, ext)
        return AcyclicityReport(True, ext, None)

    cycle = _find_cycle(nodes, out_edges, indeg)
    pairs = tuple(s for s in cycle if len(s) == 2)
    return AcyclicityReport(False, None, pairs)


def _find_cycle(nodes, out_edges, indeg):
    # Kahn leftovers all have an incoming edge from the leftover set,
    # so walking backwards must close a cycle.
    remaining = {s for s in nodes if indeg[s] > 0}
    incoming = {s: [] for s in remaining}
    for s in remaining:
        for t in out_edges[s]:
            if t in remaining:
                incoming[t].append(s)
    start = min(remaining, key=lambda s: s[0] if isinstance(s[0], int) else str(s[0]))
    seen = {}
    path = [start]
    while path[-1] not in seen:
        seen[path[-1]] = len(path) - 1
        path.append(incoming[path[-1]][0])
    cyc = path[seen[path[-1]]:]
    cyc.reverse()
    return cyc


def _assert_extension(poset, matching, ext):
    position = {e: i for i, e in enumerate(ext)}
    if len(position) != len(poset.elements):
        raise StructureError("extension misses elements")
    for p, q in poset.covers:
        if position[q] > position[p]:
            raise StructureError(f"extension violates {p!r} > {q!r}")
    for p, q in matching.pairs:
        if position[p] != position[q] + 1:
            raise StructureError(f"matched pair ({p!r},{q!r}) not adjacent")


# ------------------------------------------------- recursive coatom orderings

@dataclass(frozen=True)
class RcoReport:
    ok: bool
    interval: tuple | None
    reason: str | None


def verify_rco(poset: FinitePoset, orderings) -> RcoReport:
    """Check a family of coatom orderings for the recursive coatom property.

    orderings maps an element p to a total order of its coatoms; the same
    order is reused for every interval [0^, p], which is exactly how the
    orderings produced by the shelling engine are indexed.  Both defining
    conditions are checked on every interval reachable from the top.
    """
    maxima = poset.maximal_elements()
    minima = poset.minimal_elements()
    if len(maxima) != 1 or len(minima) != 1:
        raise InputError("verify_rco needs a bounded poset")
    top = maxima[0]

    def order_of(p):
        if callable(orderings):
            return tuple(orderings(p))
        return tuple(orderings[p])

    desc = poset.descendants()
    internal_ok = {}

    def check(t):
        if t in internal_ok:
            return internal_ok[t]
        internal_ok[t] = RcoReport(True, None, None)  # guard for reentry
        coat = poset.below[t]
        if len(poset.interval(minima[0], t)) <= 2:
            return internal_ok[t]
        try:
            order = order_of(t)
        except KeyError:
            rep = RcoReport(False, (minima[0], t), f"no ordering for {t!r}")
            internal_ok[t] = rep
            return rep
        if sorted(order, key=poset.index.get) != sorted(coat, key=poset.index.get):
            rep = RcoReport(False, (minima[0], t),
                            f"ordering of {t!r} is not a permutation of its coatoms")
            internal_ok[t] = rep
            return rep
        pos = {x: i for i, x in enumerate(order)}
        # condition (2): earlier coatoms see common lower bounds through coat(q)
        for i, p in enumerate(order):
            for q in order[i + 1:]:
                for y in desc[p] & desc[q]:
                    if not any(pos[pp] < pos[q] and
                               any(z in desc[pp] and (z == y or y in desc[z])
                                   for z in poset.below[q])
                               for pp in order):
                        return _fail(t, p, q, y, internal_ok, minima[0])
        # condition (1): prefix property plus recursion
        for i, p in enumerate(order):
            earlier = set()
            for q in order[:i]:
                earlier.update(poset.below[q])
            try:
                sub = order_of(p) if poset.below[p] else ()
            except KeyError:
                rep = RcoReport(False, (minima[0], p), f"no ordering for {p!r}")
                internal_ok[t] = rep
                return rep
            need = set(poset.below[p]) & earlier
            if set(sub[:len(need)]) != need:
                rep = RcoReport(False, (minima[0], p),
                                f"coatoms of earlier intervals not first in {p!r}")
                internal_ok[t] = rep
                return rep
            rep = check(p)
            if not rep.ok:
                internal_ok[t] = rep
                return rep
        return internal_ok[t]

    def _fail(t, p, q, y, memo, bottom):
        rep = RcoReport(False, (bottom, t),
                        f"condition (2) fails for {p!r} < {q!r} over {y!r}")
        memo[t] = rep
        return rep

    return check(top)


# ------------------------------------------------------------------ CW check

def is_cw_poset(poset: FinitePoset) -> bool:
    """Diamond condition: with a (virtual) minimum, every length-2 interval
    has exactly four elements and lower ideals are graded."""
    try:
        h = dict(poset.heights())
    except ValidationError:
        return False
    work = poset
    if len(poset.minimal_elements()) != 1:
        work = poset.with_bottom("__bottom__")
        try:
            h = dict(work.heights())
        except ValidationError:
            return False
    desc = work.descendants()
    for z in work.elements:
        for x in desc[z]:
            if h[z] - h[x] == 2:
                middle = [y for y in desc[z] if x in desc[y]]
                if len(middle) != 2:
                    return False
    return True


# ------------------------------------------------------------------ file I/O

def parse_poset_file(text: str) -> FinitePoset:
    """Cover lines 'p > q' with string labels; # starts a comment."""
    covers = []
    elements = []
    seen = set()

    def add(label):
        if label not in seen:
            seen.add(label)
            elements.append(label)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ">" not in line:
            raise InputError(f"expected 'p > q', got {line!r}")
        left, right = (part.strip() for part in line.split(">", 1))
        if not left or not right:
            raise InputError(f"expected 'p > q', got {line!r}")
        add(left)
        add(right)
        covers.append((left, right))
    return FinitePoset(elements, covers)


def matching_to_json(matching: Matching, poset: FinitePoset) -> str:
    pairs = sorted([list(map(str, pair)) for pair in matching.pairs])
    critical = sorted(map(str, matching.critical(poset)))
    return json.dumps({"pairs": pairs, "critical": critical}, sort_keys=True)
