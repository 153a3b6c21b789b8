"""Shelling-type orderings and the acyclic matchings they induce.

Given a locally ranked poset, an order on its maximal elements and an
ordering oracle for coatom sets, the engine builds the per-level total
orders, the last-coatom maps pi_i, one global total order, and the greedy
matching whose critical elements are the homology facets on shellable
CW-posets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, StructureError, TheoremViolationError
from .posets import FinitePoset, Matching, is_acyclic


def canonical_oracle(poset: FinitePoset, element, prefix):
    """Prefix first, then the remaining coatoms by element index."""
    rest = [x for x in poset.below[element] if x not in set(prefix)]
    rest.sort(key=poset.index.get)
    return tuple(prefix) + tuple(rest)


def oracle_from_orders(orders):
    """Oracle reading per-element coatom orders from a mapping.

    The stored order fixes the relative order of the free coatoms; the
    mandatory prefix is emitted first in its own order.
    """
    def oracle(poset, element, prefix):
        mandatory = set(prefix)
        stored = orders[element]
        rest = [x for x in stored if x not in mandatory]
        return tuple(prefix) + tuple(rest)
    return oracle


@dataclass
class ShellingTypeOrdering:
    """Per-level orders, block decomposition, pi maps and the global order."""

    poset: FinitePoset
    level_orders: tuple          # tuple of tuples, level 0 on top
    order: tuple                 # the global total order
    pi: dict                     # element -> last coatom in the next level
    blocks: dict                 # element -> tuple of its new coatoms
    owner: dict                  # element -> block owner (None for roots)
    interval_orders: dict        # element -> coatom order used by the oracle

    def level_of(self):
        h = self.poset.heights()
        top = self.poset.height()
        return {e: top - h[e] for e in self.poset.elements}

    def position(self):
        return {e: i for i, e in enumerate(self.order)}


def build_shelling_type_ordering(poset: FinitePoset, top_order, oracle) -> ShellingTypeOrdering:
    """Run the level-by-level construction.

    top_order must list every maximal element exactly once.  The oracle is
    called once per element with the mandatory prefix (its already placed
    coatoms, in placement order) and must return a total order of the
    element's coatoms extending that prefix.  The engine enforces the
    partition of each level into blocks of new coatoms and errors out when
    the oracle breaks it.
    """
    heights = poset.heights()
    maxima = poset.maximal_elements()
    top_order = tuple(top_order)
    if sorted(top_order, key=poset.index.get) != sorted(maxima, key=poset.index.get):
        raise InputError("top_order must enumerate the maximal elements")
    if len(maxima) > 1 and len(poset.minimal_elements()) != 1 \
            and all(not poset.below[m] for m in maxima):
        raise InputError("degenerate antichain poset")

    levels = poset.level_sets()
    top = poset.height()
    max_pos = {m: i for i, m in enumerate(top_order)}
    # last maximal element above each element, in top_order
    last_max_above = {}
    desc = poset.descendants()
    for e in poset.elements:
        above = [m for m in maxima if m == e or e in desc[m]]
        if not above:
            raise StructureError(f"element {e!r} below no maximal element")
        last_max_above[e] = max(above, key=max_pos.get)

    level_orders = [tuple(m for m in top_order if heights[m] == top)]
    if not level_orders[0]:
        raise InputError("no maximal elements of top height")

    placed_pos = {e: i for i, e in enumerate(level_orders[0])}
    blocks = {}
    owner = {}
    interval_orders = {}
    placed_coatoms = set()          # union of coat(p) over processed p

    for i in range(top):
        current = level_orders[i]
        next_level = []
        covered_so_far = set()
        for p in current:
            coat = poset.below[p]
            prefix = sorted((x for x in coat if x in covered_so_far),
                            key=lambda x: placed_pos.get(x, len(placed_pos)))
            in_new = {x for x in coat if x not in covered_so_far}
            order_p = tuple(oracle(poset, p, tuple(prefix)))
            _validate_oracle_output(poset, p, order_p, coat, prefix)
            interval_orders[p] = order_p
            block = order_p[len(prefix):]
            if set(block) != in_new:
                raise StructureError(
                    f"block of {p!r} is {block!r} but the unplaced coatoms "
                    f"are {sorted(map(str, in_new))}; first block wins")
            blocks[p] = tuple(block)
            for x in block:
                owner[x] = p
                next_level.append(x)
            covered_so_far.update(coat)
        # lower maximal elements enter this level by the m_x rule
        incoming = [m for m in top_order if heights[m] == top - (i + 1)]
        for y in incoming:
            blocks.setdefault(y, ())
            owner[y] = None
            cut = len(next_level)
            while cut > 0 and max_pos[last_max_above[next_level[cut - 1]]] >= max_pos[y]:
                cut -= 1
            prefix_ok = all(max_pos[last_max_above[x]] < max_pos[y]
                            for x in next_level[:cut])
            if not prefix_ok:
                raise StructureError(
                    f"maximal element {y!r} cannot be inserted consistently")
            next_level.insert(cut, y)
        if set(next_level) != set(levels[i + 1]):
            missing = set(levels[i + 1]) - set(next_level)
            raise StructureError(
                f"level {i + 1} not partitioned by blocks; missing "
                f"{sorted(map(str, missing))}")
        level_orders.append(tuple(next_level))
        for idx, x in enumerate(next_level):
            placed_pos[x] = idx

    for p in levels[top]:
        interval_orders.setdefault(p, ())
        blocks.setdefault(p, ())

    # pi_i: last coatom with respect to the next level order
    pi = {}
    for i in range(top):
        pos_next = {x: k for k, x in enumerate(level_orders[i + 1])}
        for p in level_orders[i]:
            coat = poset.below[p]
            pi[p] = max(coat, key=pos_next.get) if coat else None
    for p in level_orders[top]:
        pi[p] = None

    order = _global_order(poset, top_order, blocks)
    sto = ShellingTypeOrdering(poset, tuple(level_orders), order, pi,
                               blocks, owner, interval_orders)
    _check_levels(sto)
    return sto


def _validate_oracle_output(poset, p, order_p, coat, prefix):
    if sorted(order_p, key=poset.index.get) != sorted(coat, key=poset.index.get) \
            or len(set(order_p)) != len(order_p):
        raise StructureError(
            f"oracle order for {p!r} is not a permutation of its coatoms")
    if set(order_p[:len(prefix)]) != set(prefix):
        raise StructureError(
            f"oracle order for {p!r} does not put the mandatory prefix first")


def _global_order(poset, top_order, blocks):
    """Preorder of the block forest, with a unique global minimum last."""
    minima = poset.minimal_elements()
    bottom = minima[0] if len(minima) == 1 and len(poset.elements) > 1 else None
    out = []

    def visit(x):
        if x is bottom:
            return
        out.append(x)
        for c in blocks.get(x, ()):
            visit(c)

    for root in top_order:
        visit(root)
    if bottom is not None:
        out.append(bottom)
    if len(out) != len(poset.elements):
        raise StructureError("global order misses elements")
    return tuple(out)


def _check_levels(sto: ShellingTypeOrdering):
    pos = sto.position()
    for level in sto.level_orders:
        ranks = [pos[x] for x in level]
        if ranks != sorted(ranks):
            raise StructureError("global order disagrees with a level order")


# ------------------------------------------------------------------ matching

def matching_from_ordering(sto: ShellingTypeOrdering, exclude=()) -> Matching:
    """Greedy pairing (p, pi(p)) scanned level by level.

    Elements in exclude (typically the artificial bottom cell) are treated
    as absent: they are never matched and pairs onto them are dropped.
    """
    exclude = set(exclude)
    matched = set(exclude)
    pairs = []
    for level in sto.level_orders[:-1]:
        seen_pi = set()
        for p in level:
            q = sto.pi[p]
            if q is None:
                continue
            if p not in matched and q not in seen_pi and q not in exclude:
                pairs.append((p, q))
                matched.add(p)
                matched.add(q)
            seen_pi.add(q)
    return Matching.of(pairs)


def homology_facets(poset: FinitePoset, facet_order):
    """Facets whose entire boundary lies below earlier facets."""
    facet_order = tuple(facet_order)
    seen = []
    out = []
    desc = poset.descendants()
    for m in facet_order:
        if poset.below[m] and all(
                any(x == m2 or x in desc[m2] for m2 in seen)
                for x in poset.below[m]):
            out.append(m)
        seen.append(m)
    return tuple(out)


def critical_cells(matching: Matching, poset: FinitePoset, facet_order=None,
                   check=True):
    """Unmatched elements; optionally checked against the homology facets.

    The check encodes the theorem that on a shellable CW-poset (bottom
    included in the matching) the critical cells are exactly the homology
    facets of the shelling; it raises on non-shellable input.
    """
    crit = matching.critical(poset)
    if facet_order is not None and check:
        hf = homology_facets(poset, facet_order)
        if sorted(map(str, crit)) != sorted(map(str, hf)):
            raise TheoremViolationError(
                f"critical cells {sorted(map(str, crit))} differ from "
                f"homology facets {sorted(map(str, hf))}")
    heights = poset.heights()
    return tuple(sorted(((c, heights[c]) for c in crit),
                        key=lambda t: poset.index[t[0]]))


def assert_matching_invariants(sto: ShellingTypeOrdering, matching: Matching):
    """Count identity and acyclicity with the adjacency certificate."""
    poset = sto.poset
    crit = matching.critical(poset)
    if len(poset.elements) - 2 * len(matching.pairs) != len(crit):
        raise StructureError("count identity violated")
    report = is_acyclic(matching, poset)
    if not report.acyclic:
        raise TheoremViolationError(f"matching has a cycle: {report.cycle}")
    return report
